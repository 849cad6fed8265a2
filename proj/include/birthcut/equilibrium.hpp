#pragma once

#include "birthcut/band_measure.hpp"
#include "birthcut/numerics.hpp"
#include "birthcut/polynomial.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace birthcut {

class EquilibriumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Polynomial confining potential V. Even degree, positive leading coefficient.
struct Potential {
    Polynomial poly;
    std::string provenance;

    Potential() = default;
    Potential(Polynomial p, std::string note);

    Real operator()(const Real& x) const { return poly(x); }
    Polynomial derivative() const { return poly.derivative(); }
    void validate() const;

    void write(std::ostream& out) const;
    static Potential read(std::istream& in);
    static Potential load(const std::string& path);
    void save(const std::string& path) const;
};

// Equilibrium measure of V/t supported on one interval:
//   rho(x) = hpoly(x) sqrt((b - x)(x - a)) / (2 pi t)
struct OneCutMeasure {
    Real t;
    Real a, b;
    Polynomial hpoly;
    Real l_t;
    BandMeasure mu;

    Interval support() const { return Interval(a, b); }
    Real density(const Real& x) const;
    Real mass() const { return mu.mass(); }
    // int log|x - s| rho(s) ds
    Real log_potential(const Real& x) const { return mu.log_abs_potential(x); }
    // int rho(s)/(z - s) ds
    Complex stieltjes(const Complex& z) const { return mu.stieltjes(z); }
};

// Pol( p(z) * ((z - c)^2 - r^2)^{power/2} ) for power = +1 or -1, the root
// branch behaving like (z - c) at infinity.
Polynomial polynomial_part_with_root(const Polynomial& p, const Real& c, const Real& r, int power);

OneCutMeasure solve_one_cut(const Potential& V, const Real& t, const PrecisionContext& ctx);

// E_t(x) = 2 int log|x-s| rho^t(s) ds - V(x)/t - l_t
Real effective_potential(const OneCutMeasure& m, const Potential& V, const Real& x);
// dE_t/dx off the support, exact from the density factor
Real effective_potential_derivative(const OneCutMeasure& m, const Real& x);

struct CriticalReport {
    Real x_star;
    int nu = 0;
    Real Q_at_xstar;
    Real phi_at_xstar;
    // -E_t(x*)/2; the kernel prefactor constant is n times this value
    Real c_star_per_n;
    Real margin;  // min of -E over off-support samples away from x*
    Real E_at_xstar;
    double order_slope = 0;  // fitted log-log slope, close to 2 nu
    Real t;
    Interval support;
    Polynomial hpoly;
    Polynomial Q;  // hpoly / (t (x - x*)^{2 nu - 1})

    Real c_star(long n) const { return Real(n) * c_star_per_n; }
};

struct DetectOptions {
    double critical_tol = 1e-10;
    double collar = 0.05;
    double exclusion = 0.1;  // radius around x* skipped by the margin scan
    int grid = 400;
};

CriticalReport detect_critical_point(const OneCutMeasure& m, const Potential& V, const Interval& search,
                                     const PrecisionContext& ctx, const DetectOptions& opt = {});

// int_{-2}^{2} log|x - s| ds / (pi sqrt(4 - s^2)); zero on [-2, 2]
Real arcsine_log_potential(const Real& x);
// log((x + sqrt(x^2 - 4))/2) for x > 2, the arcsine log potential with the
// principal logarithm; the Robin constant of [-2, 2] vanishes.
Real phi(const Real& x);
// Same quantity for the arcsine measure of a general interval.
Real green_exterior(const Interval& iv, const Real& x);

struct BrRow {
    Real t;
    Real residual;
};

// sup over interior points of |(t rho^t - rho)/(t - 1) - w| for each t < 1.
std::vector<BrRow> br_derivative_check(const Potential& V, const std::vector<Real>& t_list,
                                       const PrecisionContext& ctx, int samples = 50);

struct Synthesis {
    Potential V;
    CriticalReport report;
    OneCutMeasure measure;
    Real q0, q1;
    Real normalization_residual;
    Real E_at_xstar;
};

// Builds a potential whose t = 1 equilibrium measure lives on [-2, 2] and whose
// effective potential touches zero at x_star to order 2 nu.
Synthesis synthesize_birth_potential(const Real& x_star, int nu, const PrecisionContext& ctx);

// |q_t(x) from the difference-quotient integral - q_t(x) from the squared
// Cauchy transform| at a point off the support.
struct QIdentity {
    Real from_difference_quotient;
    Real from_stieltjes;
    Real residual;
};
QIdentity q_identity_check(const OneCutMeasure& m, const Potential& V, const Real& x, const PrecisionContext& ctx);

}  // namespace birthcut
