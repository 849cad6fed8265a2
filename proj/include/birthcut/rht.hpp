#pragma once

#include "birthcut/ansatz.hpp"
#include "birthcut/band_measure.hpp"
#include "birthcut/equilibrium.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace birthcut {

class RhtError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Mat2 {
    std::array<std::array<Complex, 2>, 2> m;

    static Mat2 identity();
    static Mat2 diag(const Complex& a, const Complex& d);
    static Mat2 of(const Complex& a, const Complex& b, const Complex& c, const Complex& d);
    Complex det() const;
    Mat2 operator*(const Mat2& o) const;
    Mat2 operator-(const Mat2& o) const;
    Real max_abs() const;
};

enum class Regime { supercritical, subcritical };

// g(z) = int log(z - s) dmu(s) + (u/n) log(z - x*). In the supercritical case
// mu is the main band plus iota * c times the unit-mass semicircle on
// [alpha, beta] (c = -delta_t / log delta_t), so the total mass including the
// point charge is one. Subcritically mu is the equilibrium measure and u = 0.
struct GFunction {
    Regime regime = Regime::subcritical;
    Real t;
    Real alpha, beta;
    Real x_star;
    long n = 0;
    Real u_t;
    long ubar = 0;
    Real iota_t;
    Real scale;    // c = -delta_t / log delta_t, zero subcritically
    Real l_tilde;  // the band equality reads g+ + g- - V/t - l_tilde/t = 0 at leading order
    Potential V;
    BandMeasure band;

    Complex operator()(const Complex& z) const;
    // value from above (side = +1) or below (side = -1) on the real line
    Complex boundary(const Real& x, int side) const;
    // g+ + g- on the real line
    Real boundary_sum(const Real& x) const;
    // n/2 (g+ + g- - V/t - l_tilde/t)
    Real D_n(const Real& x) const;
    Real total_mass() const;  // band mass plus u/n
};

GFunction make_gfunction(const AnsatzParams& p, const OneCutMeasure& critical, const Potential& V,
                         const PrecisionContext& ctx);
GFunction make_gfunction(const OneCutMeasure& m, const Potential& V, long n, const Real& x_star);

struct GineqRow {
    Real x;
    bool on_band = false;
    Real raw;         // g+ + g- - V/t - l_tilde/t
    Real normalized;  // raw divided by delta_t / log delta_t on the band
};
std::vector<GineqRow> gineq_residuals(const GFunction& gf, const std::vector<Real>& grid);

// F(z) = log((R* - S(z)) / (R* + S(z))), S(z) = sqrt(z-alpha) sqrt(z-beta) / (z - beta),
// R* = sqrt((x*-alpha)/(x*-beta)). Cut on [alpha, x*].
Complex F_map(const Complex& z, const Real& alpha, const Real& beta, const Real& x_star);
Complex F_map_boundary(const Real& x, int side, const Real& alpha, const Real& beta, const Real& x_star);
Real F0(const Real& alpha, const Real& beta, const Real& x_star);

// Solution of K+ + K- = 2D on [alpha, beta], bounded at infinity, by the
// Cauchy integral against 1/sqrt((s-alpha)(beta-s)). D is given as a Chebyshev
// series on the band so that D(z) continues off the axis.
Complex szego_K(const Complex& z, const ChebSeries& D, const PrecisionContext& ctx);
Complex szego_K_boundary(const Real& x, int side, const ChebSeries& D, const PrecisionContext& ctx);
// sum_k d_k Phi(xi)^{-k}: the same function through the Chebyshev coefficients
Complex szego_K_series(const Complex& z, const ChebSeries& D);
// -(1/2 pi i) int 2D / sqrt_+ by quadrature
Real szego_K0(const ChebSeries& D, const PrecisionContext& ctx);

// gamma = ((z - beta)/(z - alpha))^{1/4}
Mat2 pi_matrix(const Complex& z, const Real& alpha, const Real& beta);
Mat2 pi_matrix_boundary(const Real& x, int side, const Real& alpha, const Real& beta);

struct ParametrixFrame {
    Regime regime = Regime::subcritical;
    Real alpha, beta, x_star;
    int nu = 1;
    long n = 0;
    Real u_t;
    long ubar = 0;
    Real F0;
    Real K0;
    Real Z_t;
    Real varphi_at_xstar;
    ChebSeries D;  // D_n on [alpha, beta]; zero series subcritically
};

ParametrixFrame make_frame(const GFunction& gf, const CriticalReport& critical, const PrecisionContext& ctx);

// S = e^{(K0 + (u-ubar)F0) s3} Pi e^{-(K + (u-ubar)F) s3}
Mat2 global_parametrix(const Complex& z, const ParametrixFrame& fr, const PrecisionContext& ctx);
Mat2 global_parametrix_boundary(const Real& x, int side, const ParametrixFrame& fr, const PrecisionContext& ctx);

// (phi(z))^{2nu} = int_0^1 Q(x* + w v) v^{2nu-1} sqrt(. - a) sqrt(. - b) dv, w = z - x*,
// so that -E(z) = w^{2nu} varphi(z)^{2nu} without cancellation near x*.
Complex varphi(const Complex& z, const CriticalReport& critical, const PrecisionContext& ctx);
Real varphi_at_xstar(const CriticalReport& critical);
Complex conformal_zeta(const Complex& z, const CriticalReport& critical, long n, const PrecisionContext& ctx);
// largest admissible |z - x*|
Real zeta_disk_radius(const CriticalReport& critical);

struct TauZ {
    Regime regime = Regime::subcritical;
    Real Z_t;
    GFunction gf;
    CriticalReport critical;
    PrecisionContext ctx;

    Complex tau(const Complex& z) const;
    // the defining quotient, without the removable-singularity treatment
    Complex tau_direct(const Complex& z) const;
    // n(g - V/2t - l/2t) - (-zeta^{2nu}/2 + tau zeta/2 + u log zeta + Z)
    Complex identity_residual(const Complex& z) const;
};

TauZ tau_Z(const GFunction& gf, const CriticalReport& critical, const PrecisionContext& ctx);

// [[1, (1/2 pi i) int e^{-s^{2nu} + tau s}/(s - zeta) ds], [0, 1]]
Mat2 cauchy_parametrix(const Complex& zeta, const Complex& tau, int nu, const PrecisionContext& ctx);
Mat2 cauchy_parametrix_boundary(const Real& x, int side, const Complex& tau, int nu, const PrecisionContext& ctx);

struct JumpResidual {
    std::string object;
    std::string piece;
    Real point;
    std::vector<Real> eps;
    Real residual;
};

// Boundary values of a vector-valued function at x from one side,
// Richardson-extrapolated from x + i side eps.
std::vector<Complex> boundary_limit(const std::function<std::vector<Complex>(const Complex&)>& f, const Real& x,
                                    int side, const std::vector<Real>& eps);

struct JumpSuiteOptions {
    int points_per_piece = 5;
    std::vector<double> eps = {1e-4, 1e-5, 1e-6};
};

// Every jump relation of g, F, K, Pi, S and the Cauchy parametrix, plus
// det Pi, checked at interior points of each contour piece.
std::vector<JumpResidual> jump_suite(const GFunction& gf, const ParametrixFrame& fr, const PrecisionContext& ctx,
                                     const JumpSuiteOptions& opt = {});
void write_csv(const std::vector<JumpResidual>& rows, std::ostream& out);

}  // namespace birthcut
