#pragma once

#include "birthcut/ansatz.hpp"
#include "birthcut/equilibrium.hpp"
#include "birthcut/orthopoly.hpp"
#include "birthcut/rht.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace birthcut {

class LabError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// How t approaches 1 as n grows.
//   supercritical: t = 1 + U+ log n / n
//   subcritical:   t = 1 + U- n^{-k}, U- <= 0, k >= 1 - 1/(2 nu)
//   critical:      t = 1
struct ScalingRegime {
    enum class Kind { supercritical, subcritical, critical };
    Kind kind = Kind::critical;
    Real U_plus = Real(0);
    Real k = Real(0.5);
    Real U_minus = Real(0);

    static ScalingRegime supercritical(const Real& U_plus);
    static ScalingRegime subcritical(const Real& k, const Real& U_minus);
    static ScalingRegime critical();

    Real target_t(long n) const;
    std::string name() const;
};

// N = round(n / target_t), then t := n/N so that t is exactly a ratio of integers.
struct Coupling {
    long n = 0;
    long N = 0;
    Real t;
};
Coupling couple(const ScalingRegime& r, long n);

struct ExperimentConfig {
    std::string potential_file;  // empty: synthesize from x_star, nu
    Real x_star = Real(3);
    int nu = 1;
    ScalingRegime regime = ScalingRegime::supercritical(Real(0.675));
    std::vector<long> n_list = {16, 32, 48};
    int grid = 17;
    Real z_min = Real(-2), z_max = Real(2);
    unsigned bits = 0;  // 0: recommended_bits(n), at least 128
    long n_cap = 48;
    std::string out_dir = "out";
    bool inject_fault = false;  // identity suite only

    // INI-style key = value file; see README for the keys
    static ExperimentConfig read(std::istream& in, const std::string& origin = "<stream>");
    static ExperimentConfig load(const std::string& path);
    void write(std::ostream& out) const;
    void validate() const;

    std::vector<Real> z_grid() const;
    unsigned bits_for(long n) const;
};

// The t = 1 potential with its critical point, ready for the sweeps.
struct BirthSetup {
    Potential V;
    OneCutMeasure measure;
    CriticalReport report;
    Real varphi_star;  // linearization of the conformal map at x*
    Real u;            // 2 nu phi(x*) U+, zero outside the supercritical regime
    long ubar = 0;
};
BirthSetup prepare_setup(const ExperimentConfig& cfg, const PrecisionContext& ctx);

struct SweepRow {
    long n = 0;
    long N = 0;
    Real t;
    Real z, zp;
    Real K_scaled;
    Real K_model;
    Real abs_err;
};

struct UniversalityPoint {
    long n = 0;
    long N = 0;
    Real t;
    unsigned bits = 0;
    Real U_effective;  // (t - 1) n / log n after rounding N
    Real u_effective;  // 2 nu phi(x*) U_effective
    Real sup_err;
    Real orthogonality_residual;
    double seconds = 0;
};

struct UniversalityResult {
    BirthSetup setup;
    std::vector<SweepRow> rows;
    std::vector<UniversalityPoint> points;
    bool strictly_decreasing = false;
    Real final_sup_err;
};

UniversalityResult run_universality_sweep(const ExperimentConfig& cfg);
// sup |K_scaled - K_model| per n and the monotonicity verdict, from rows alone
void summarize_sweep(UniversalityResult& r);

struct SubcriticalRow {
    long n = 0;
    long N = 0;
    Real t;
    Real z, zp;
    Real K;        // K_{n,N} at the rescaled arguments, no prefactor
    Real K_c1;     // e^{c*} K
    Real K_c2;     // e^{2 c*} K
    Real K_limit;  // e^{-(z^{2nu} + z'^{2nu})/2} (1/8pi)(1/(x*-beta_t) - 1/(x*-alpha_t))
};

struct SubcriticalPoint {
    long n = 0;
    long N = 0;
    Real t;
    unsigned bits = 0;
    Real alpha_t, beta_t;
    Real c_star;
    Real tau_star;             // tau(x*), the linear tilt of the local exponent
    Real constant_finite;      // (1/8pi)(1/(x*-beta_t) - 1/(x*-alpha_t))
    Real constant_limit;       // same with alpha, beta of t = 1
    Real constant_c1, constant_c2;  // prefactored K at z = z' = 0
    Real variance_c1, variance_c2;  // of log(prefactored K(z,z)) + z^{2nu} along the diagonal
    Real variance_tilted;           // same with tau z removed, e^{2c*} prefactor
    Real conformal_residual;        // sup |log K(x,x) - n E_t(x) - log C(x)| on the diagonal
    double seconds = 0;
};

struct SubcriticalResult {
    BirthSetup setup;
    std::vector<SubcriticalRow> rows;
    std::vector<SubcriticalPoint> points;
    // 1 for e^{c*}, 2 for e^{2c*}: the one whose K(0,0) varies least across n
    int stable_prefactor = 0;
};

SubcriticalResult run_subcritical_sweep(const ExperimentConfig& cfg);

struct IdentityRow {
    std::string suite;
    std::string name;
    Real residual;
    Real tolerance;
    bool pass = false;
};

std::vector<IdentityRow> run_identity_suite(const ExperimentConfig& cfg);

// CSV and SVG writers. Every CSV starts with '#' metadata lines and a header.
void write_sweep_csv(const UniversalityResult& r, const ExperimentConfig& cfg, std::ostream& out);
void write_sweep_summary_csv(const UniversalityResult& r, std::ostream& out);
void write_subcritical_csv(const SubcriticalResult& r, const ExperimentConfig& cfg, std::ostream& out);
void write_subcritical_summary_csv(const SubcriticalResult& r, std::ostream& out);
void write_identities_csv(const std::vector<IdentityRow>& rows, std::ostream& out);
void write_error_svg(const std::vector<long>& n, const std::vector<Real>& err, const std::string& title,
                     std::ostream& out);
// two heatmaps side by side: K_scaled and K_model of the largest n
void write_kernel_svg(const UniversalityResult& r, std::ostream& out);

// Writes the files for one result into dir, creating it if needed, and
// returns the paths written.
std::vector<std::string> emit_outputs(const UniversalityResult& r, const ExperimentConfig& cfg, const std::string& dir);
std::vector<std::string> emit_outputs(const SubcriticalResult& r, const ExperimentConfig& cfg, const std::string& dir);
std::vector<std::string> emit_outputs(const std::vector<IdentityRow>& rows, const std::string& dir);

}  // namespace birthcut
