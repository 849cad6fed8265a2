#include "birthcut/ansatz.hpp"

#include <cmath>

namespace birthcut {

namespace {

Real factorial(int k) {
    Real f(1);
    for (int j = 2; j <= k; ++j) f *= j;
    return f;
}

Real central_binomial(int k) { return factorial(2 * k) / (factorial(k) * factorial(k)); }

void require_normalized(const CriticalReport& r) {
    if (abs(r.support.lo + 2) > Real(1e-8) || abs(r.support.hi - 2) > Real(1e-8))
        throw AnsatzError("the ansatz needs a t = 1 support normalized to [-2, 2]");
    if (r.nu < 1) throw AnsatzError("critical report has no vanishing order");
}

Real odd_power(const Real& x, int nu) { return pow(x, 2 * nu - 1); }

}  // namespace

Real xi_function(const CriticalReport& report, const Real& x) {
    return 1 / (odd_power(x - report.x_star, report.nu) * report.Q(x));
}

Polynomial eta_polynomial(const CriticalReport& report) {
    const Real& xs = report.x_star;
    const int nu = report.nu;
    const Polynomial h = report.Q * Polynomial::linear_power(xs, static_cast<unsigned>(2 * nu - 1));
    // eta = (A - 1/2)/(x - 2) + (B + 1/2)/(x + 2) with A(2) = 1/2, B(-2) = -1/2
    const Polynomial A = h * (1 / (2 * report.Q(Real(2)) * odd_power(2 - xs, nu)));
    const Polynomial B = h * (1 / (2 * report.Q(Real(-2)) * odd_power(2 + xs, nu)));
    const Polynomial half = Polynomial::constant(Real(0.5));
    return (A - half).divide_linear(Real(2)) + (B + half).divide_linear(Real(-2));
}

Real eta_three_term(const Real& x, const CriticalReport& report) {
    const Real& xs = report.x_star;
    const int nu = report.nu;
    const Real hx = report.Q(x) * odd_power(x - xs, nu);
    return hx / (2 * report.Q(Real(2)) * odd_power(2 - xs, nu) * (x - 2)) +
           hx / (2 * report.Q(Real(-2)) * odd_power(2 + xs, nu) * (x + 2)) - 2 / (x * x - 4);
}

Real eta(const Real& x, const CriticalReport& report) {
    if (abs(x - 2) < Real(1e-2) || abs(x + 2) < Real(1e-2)) return eta_polynomial(report)(x);
    return eta_three_term(x, report);
}

Polynomial P_polynomial(int nu, const Real& y) {
    std::vector<Real> c(2 * nu - 1, Real(0));
    for (int j = 0; j < nu; ++j) c[2 * (nu - 1 - j)] = central_binomial(j) * pow(y, 2 * j);
    return Polynomial(std::move(c));
}

Real P_at_2y_closed(int nu, const Real& y) {
    return pow(y, 2 * nu - 2) * factorial(2 * nu) / (2 * factorial(nu - 1) * factorial(nu));
}

FillingIdentity filling_identity(int nu, const Real& y, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    if (nu < 1 || !(y > 0)) throw AnsatzError("filling_identity needs nu >= 1 and y > 0");
    const Polynomial P = P_polynomial(nu, y);
    FillingIdentity f;
    f.lhs = integrate_weighted([&](const Real& s) { return P(s); }, Interval(-2 * y, 2 * y), RuleKind::sqrt_endpoints,
                               ctx);
    f.rhs = 2 * pi() * y * y * P_at_2y_closed(nu, y) / nu;
    return f;
}

AnsatzParams build_params(const CriticalReport& report, const Real& delta_t, long n, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    require_normalized(report);
    if (!(delta_t > 0) || !(delta_t < exp(Real(-1)))) throw AnsatzError("build_params needs 0 < delta_t < 1/e");
    const int nu = report.nu;
    const Real& xs = report.x_star;

    AnsatzParams p;
    p.report = report;
    p.delta_t = delta_t;
    p.t = 1 + delta_t;
    p.n = n;
    p.scale = -delta_t / log(delta_t);
    p.xi_minus2 = xi_function(report, Real(-2));
    p.xi_plus2 = xi_function(report, Real(2));
    p.alpha_t = -2 - p.xi_minus2 * delta_t;
    p.beta_t = 2 + p.xi_plus2 * delta_t;

    const Real root = sqrt(xs * xs - 4);
    p.y = pow(4 * Real(nu * nu) * report.phi_at_xstar * factorial(nu - 1) * factorial(nu) /
                  (report.Q_at_xstar * root * factorial(2 * nu)),
              Real(1) / (2 * nu));
    p.sigma_t = 2 * p.y * pow(p.scale, Real(1) / (2 * nu));

    std::vector<Real> hc(2 * nu - 1, Real(0));
    for (int k = 0; k < nu; ++k)
        hc[2 * nu - 2 - 2 * k] = central_binomial(k) * pow(p.y, 2 * k) * pow(p.scale, Real(k) / nu);
    p.H_coeffs = Polynomial(std::move(hc));
    p.eta_poly = eta_polynomial(report);

    const Real two_pi_t = 2 * pi() * p.t;
    const Real sigma2 = p.sigma_t * p.sigma_t;
    // main band: the inner root continues as -sqrt((x-x*)^2 - sigma^2) left of the new band
    p.main_band = BandMeasure::from_sqrt_factor(
        [&](const Real& x) {
            Real w = x - xs;
            Real inner = -report.Q(x) * p.H_coeffs(w) * sqrt(w * w - sigma2) + p.eta_poly(x) * delta_t;
            return inner / two_pi_t;
        },
        Interval(p.alpha_t, p.beta_t), ctx);
    p.newborn_band = BandMeasure::from_sqrt_factor(
        [&](const Real& x) {
            return sqrt((x - p.alpha_t) * (x - p.beta_t)) * report.Q(x) * p.H_coeffs(Real(x - xs)) / two_pi_t;
        },
        Interval(xs - p.sigma_t, xs + p.sigma_t), ctx);
    p.main_mass = p.main_band.mass();
    p.newborn_mass = p.newborn_band.mass();
    p.u_t = Real(n) * p.newborn_mass;
    p.ubar_t = p.u_t >= 0 ? static_cast<long>(floor(p.u_t + Real(0.5)).convert_to<long>()) : 0;
    p.u_asymptotic = Real(n) * p.scale * 2 * nu * report.phi_at_xstar;
    p.iota_t = (p.main_mass + p.newborn_mass - 1) / (-p.scale);
    return p;
}

Complex sqrt_q_tilde(const Complex& x, const AnsatzParams& p) {
    const Complex xs(p.report.x_star, Real(0));
    const Complex w = x - xs;
    const Complex s(p.sigma_t, Real(0));
    const Complex outer = std::sqrt(x - Complex(p.alpha_t, 0)) * std::sqrt(x - Complex(p.beta_t, 0));
    const Complex inner = p.report.Q(x) * p.H_coeffs(w) * std::sqrt(w - s) * std::sqrt(w + s) +
                          p.eta_poly(x) * Complex(p.delta_t, 0);
    return outer * inner / Complex(Real(2), Real(0));
}

Complex sqrt_q(const Complex& x, const CriticalReport& report) {
    const Complex two(Real(2), Real(0));
    return report.hpoly(x) / Complex(report.t, 0) * std::sqrt(x - two) * std::sqrt(x + two) / two;
}

Real rho_tilde(const Real& x, const AnsatzParams& p) {
    return p.main_band.density(x) + p.newborn_band.density(x);
}

Complex h_tilde(const Complex& z, const AnsatzParams& p) {
    return p.main_band.log_potential(z) + p.newborn_band.log_potential(z);
}

Real h_tilde_sum(const Real& x, const AnsatzParams& p) {
    return 2 * (p.main_band.log_abs_potential(x) + p.newborn_band.log_abs_potential(x));
}

Real H_form_gap(const AnsatzParams& p) {
    const int nu = p.report.nu;
    const Polynomial P = P_polynomial(nu, p.y);
    // c^{1 - 1/nu} P(w c^{-1/2nu}) coefficient by coefficient
    Real gap(0);
    for (int k = 0; k <= 2 * nu - 2; ++k) {
        Real viaP = pow(p.scale, 1 - Real(1) / nu) * P.coeff(k) * pow(p.scale, -Real(k) / (2 * nu));
        Real direct = p.H_coeffs.coeff(k);
        Real denom = abs(direct) > 0 ? abs(direct) : Real(1);
        gap = std::max(gap, Real(abs(viaP - direct) / denom));
    }
    return gap;
}

std::vector<ThineqRow> check_thineq(const AnsatzParams& p, const OneCutMeasure& m1, const Potential& V,
                                    const std::vector<Real>& grid) {
    std::vector<ThineqRow> rows;
    for (const auto& x : grid) {
        Real v = h_tilde_sum(x, p) - V(x) / p.t - m1.l_t / p.t;
        rows.push_back({x, v / (-p.scale)});
    }
    return rows;
}

Real qtilde_expansion_residual(const AnsatzParams& p, const Real& x) {
    Complex z(x, Real(0));
    Complex d = sqrt_q_tilde(z, p) - sqrt_q(z, p.report);
    // same branch as sqrt_q: negative left of -2
    Real root = x > 0 ? sqrt(x * x - 4) : -sqrt(x * x - 4);
    return d.real() + p.delta_t / root;
}

Real htilde_expansion_residual(const AnsatzParams& p, const OneCutMeasure& m1, const Real& x) {
    Complex z(x, Real(0));
    Real ht = h_tilde(z, p).real();
    Real h = m1.mu.log_potential(z).real();
    return ht - h / p.t - p.delta_t / p.t * arcsine_log_potential(x);
}

Real xstar_potential_residual(const AnsatzParams& p, const OneCutMeasure& m1, const Potential& V) {
    const Real& xs = p.report.x_star;
    Real main = p.main_band.log_abs_potential(xs);
    return main - V(xs) / (2 * p.t) - m1.l_t / (2 * p.t) - p.delta_t * p.report.phi_at_xstar;
}

}  // namespace birthcut
