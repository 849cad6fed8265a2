#pragma once

#include "birthcut/equilibrium.hpp"

#include <vector>

namespace birthcut {

class AnsatzError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Approximate equilibrium measure for t = 1 + delta_t slightly above the
// birth of a cut: a deformed main band [alpha, beta] and a newborn band
// [x* - sigma, x* + sigma]. Built from a critical report at t = 1 whose
// support is [-2, 2].
struct AnsatzParams {
    Real delta_t;
    Real t;
    Real scale;  // -delta_t / log(delta_t)
    Real alpha_t, beta_t;
    Real y;
    Real sigma_t;
    Polynomial H_coeffs;  // H_t in powers of (x - x*)
    Polynomial eta_poly;
    Real xi_minus2, xi_plus2;
    long n = 0;
    Real u_t;
    long ubar_t = 0;
    Real u_asymptotic;  // n * scale * 2 nu phi(x*)
    Real iota_t;
    Real main_mass, newborn_mass;
    BandMeasure main_band, newborn_band;
    CriticalReport report;

    Real H(const Real& x) const { return H_coeffs(Real(x - report.x_star)); }
    Complex H(const Complex& z) const { return H_coeffs(Complex(z - Complex(report.x_star, Real(0)))); }
};

AnsatzParams build_params(const CriticalReport& report, const Real& delta_t, long n, const PrecisionContext& ctx);

// 1 / ((x - x*)^{2 nu - 1} Q(x))
Real xi_function(const CriticalReport& report, const Real& x);

// The three-term expression; near x = +-2 the removable singularity is
// evaluated through the equivalent polynomial form.
Real eta(const Real& x, const CriticalReport& report);
Real eta_three_term(const Real& x, const CriticalReport& report);
Polynomial eta_polynomial(const CriticalReport& report);

// sqrt(q~) with sqrt((x-alpha)(x-beta)) positive on (beta, inf) and the inner
// root positive on (x* + sigma, inf)
Complex sqrt_q_tilde(const Complex& x, const AnsatzParams& p);
// sqrt(q) = Q(x) (x - x*)^{2 nu - 1} sqrt(x^2 - 4) / 2 at t = 1
Complex sqrt_q(const Complex& x, const CriticalReport& report);

Real rho_tilde(const Real& x, const AnsatzParams& p);
// log potential of both bands, principal branch
Complex h_tilde(const Complex& z, const AnsatzParams& p);
// h~_+ + h~_- on the real line
Real h_tilde_sum(const Real& x, const AnsatzParams& p);

// P(xi) = sum_{j<nu} binom(2j, j) y^{2j} xi^{2(nu-1-j)}
Polynomial P_polynomial(int nu, const Real& y);
Real P_at_2y_closed(int nu, const Real& y);

struct FillingIdentity {
    Real lhs, rhs;
};
FillingIdentity filling_identity(int nu, const Real& y, const PrecisionContext& ctx);

// max relative coefficient gap between H_t and its rescaled-P form
Real H_form_gap(const AnsatzParams& p);

struct ThineqRow {
    Real x;
    Real upsilon;
};
// (h~_+ + h~_- - V/t - l/t) log(delta_t)/delta_t on a grid of the main band
std::vector<ThineqRow> check_thineq(const AnsatzParams& p, const OneCutMeasure& m1, const Potential& V,
                                    const std::vector<Real>& grid);

// sqrt(q~) - sqrt(q) + delta_t / sqrt(x^2 - 4) off the special points
Real qtilde_expansion_residual(const AnsatzParams& p, const Real& x);
// h~(x) - h(x)/t - (delta_t/t) int w(s) log(x - s) ds
Real htilde_expansion_residual(const AnsatzParams& p, const OneCutMeasure& m1, const Real& x);
// main-band potential at x* - V(x*)/2t - l/2t - delta_t phi(x*)
Real xstar_potential_residual(const AnsatzParams& p, const OneCutMeasure& m1, const Potential& V);

}  // namespace birthcut
