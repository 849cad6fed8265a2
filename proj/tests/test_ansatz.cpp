#include "doctest.h"

#include "birthcut/ansatz.hpp"

using namespace birthcut;

namespace {
const PrecisionContext ctx = PrecisionContext::with_bits(128);

const Synthesis& nu1() {
    static const Synthesis s = [] {
        PrecisionScope scope(ctx);
        return synthesize_birth_potential(Real(3), 1, ctx);
    }();
    return s;
}

Real rel(const Real& got, const Real& want) { return abs(got - want) / abs(want); }
}  // namespace

TEST_CASE("filling identity for the rescaled H polynomial") {
    PrecisionScope s(ctx);
    for (int nu = 1; nu <= 4; ++nu)
        for (Real y : {Real(0.25), Real(1), Real(2)}) {
            FillingIdentity f = filling_identity(nu, y, ctx);
            CHECK(rel(f.lhs, f.rhs) < Real(1e-25));
        }
    // nu = 2, y = 1: int (s^2 + 2) sqrt(4 - s^2) ds = 6 pi
    CHECK(rel(filling_identity(2, Real(1), ctx).lhs, 6 * pi()) < Real(1e-25));
}

TEST_CASE("P at 2y in closed form") {
    PrecisionScope s(ctx);
    for (int nu = 1; nu <= 5; ++nu) {
        const Real y(0.7);
        CHECK(rel(P_polynomial(nu, y)(2 * y), P_at_2y_closed(nu, y)) < Real(1e-28));
    }
}

TEST_CASE("H coefficients agree with the rescaled P form") {
    PrecisionScope s(ctx);
    for (Real dt : {Real(1e-3), Real(1e-5)}) {
        AnsatzParams p = build_params(nu1().report, dt, 20, ctx);
        CHECK(H_form_gap(p) < Real(1e-25));
        // nu = 1: H is identically one
        CHECK(p.H_coeffs.degree() == 0);
        CHECK(abs(p.H(Real(1.3)) - 1) < Real(1e-30));
    }
    PrecisionScope s2(ctx);
    const Synthesis two = synthesize_birth_potential(Real(3), 2, ctx);
    AnsatzParams p2 = build_params(two.report, Real(1e-6), 20, ctx);
    CHECK(H_form_gap(p2) < Real(1e-25));
    CHECK(p2.H_coeffs.degree() == 2);
}

TEST_CASE("eta: three-term and polynomial forms agree, no poles at +-2") {
    PrecisionScope s(ctx);
    const CriticalReport& r = nu1().report;
    const Polynomial P = eta_polynomial(r);
    for (Real x : {Real(-5), Real(-1.5), Real(0), Real(0.7), Real(1.9), Real(3), Real(6)})
        CHECK(abs(eta_three_term(x, r) - P(x)) < Real(1e-25) * (1 + abs(P(x))));
    for (Real x : {Real(2), Real(-2), Real(2) + Real(1e-12), Real(-2) - Real(1e-9)}) CHECK(abs(eta(x, r) - P(x)) < Real(1e-20));
    CHECK(abs(eta(Real(2) + Real(0.02), r) - eta(Real(2) - Real(0.02), r)) < Real(0.2));
}

TEST_CASE("endpoint shifts follow Xi at +-2") {
    PrecisionScope s(ctx);
    const Real dt(1e-4);
    AnsatzParams p = build_params(nu1().report, dt, 20, ctx);
    CHECK(abs(p.alpha_t - (-2 - xi_function(p.report, Real(-2)) * dt)) < Real(1e-30));
    CHECK(abs(p.beta_t - (2 + xi_function(p.report, Real(2)) * dt)) < Real(1e-30));
    CHECK(p.beta_t - p.alpha_t > 4);
}

TEST_CASE("density of the ansatz is nonnegative on both bands") {
    PrecisionScope s(ctx);
    for (Real dt : {Real(1e-3), Real(1e-5)}) {
        AnsatzParams p = build_params(nu1().report, dt, 20, ctx);
        for (int k = 1; k < 200; ++k) {
            Real x = p.alpha_t + (p.beta_t - p.alpha_t) * Real(k) / 200;
            CHECK(rho_tilde(x, p) >= 0);
        }
        const Real xs = p.report.x_star;
        for (int k = 1; k < 50; ++k) {
            Real x = xs - p.sigma_t + 2 * p.sigma_t * Real(k) / 50;
            CHECK(rho_tilde(x, p) > 0);
        }
    }
}

TEST_CASE("normalized expansion residuals settle as delta_t shrinks") {
    PrecisionScope s(ctx);
    std::vector<Real> q, x_star, iota;
    for (Real dt : {Real(1e-4), Real(1e-5), Real(1e-6)}) {
        AnsatzParams p = build_params(nu1().report, dt, 20, ctx);
        q.push_back(qtilde_expansion_residual(p, Real(-3)) / p.scale);
        x_star.push_back(xstar_potential_residual(p, nu1().measure, nu1().V) / p.scale);
        iota.push_back(p.iota_t);
    }
    for (auto* seq : {&q, &x_star, &iota}) {
        const auto& v = *seq;
        CHECK(abs(v[2] - v[1]) < abs(v[1] - v[0]) + Real(1e-6));
        CHECK(abs(v[2] - v[1]) < Real(0.1) * (1 + abs(v[2])));
    }
}

TEST_CASE("newborn mass matches its asymptotic size") {
    PrecisionScope s(ctx);
    const long n = 1000;
    AnsatzParams p = build_params(nu1().report, Real(1e-5), n, ctx);
    CHECK(rel(p.u_t, p.u_asymptotic) < Real(0.01));
    CHECK(abs(p.main_mass + p.newborn_mass - 1 + p.iota_t * p.scale) < Real(1e-25));
}

TEST_CASE("out-of-range inputs are rejected") {
    PrecisionScope s(ctx);
    CHECK_THROWS_AS(build_params(nu1().report, exp(Real(-1)), 10, ctx), AnsatzError);
    CHECK_THROWS_AS(build_params(nu1().report, Real(0), 10, ctx), AnsatzError);
    CHECK_THROWS_AS(filling_identity(0, Real(1), ctx), AnsatzError);
    CriticalReport shifted = nu1().report;
    shifted.support = Interval(Real(-1), Real(3));
    CHECK_THROWS_AS(build_params(shifted, Real(1e-4), 10, ctx), AnsatzError);
}

TEST_CASE("under the supercritical coupling sigma shrinks and u_t drifts toward 2 nu phi(x*) U+") {
    PrecisionScope s(ctx);
    const Real u(1.3);
    const Real U = u / (2 * nu1().report.phi_at_xstar);
    std::vector<Real> sigma, gap;
    for (int e : {10, 20, 40}) {
        const Real n = pow(Real(2), e);
        // n enters only through u_t = n * newborn mass
        AnsatzParams p = build_params(nu1().report, U * log(n) / n, 1, ctx);
        sigma.push_back(p.sigma_t);
        gap.push_back(abs(n * p.newborn_mass - u));
        CHECK(rel(n * p.newborn_mass, n * p.scale * 2 * nu1().report.phi_at_xstar) < Real(0.05));
    }
    CHECK(sigma[1] < sigma[0]);
    CHECK(sigma[2] < sigma[1]);
    CHECK(gap[1] < gap[0]);
    CHECK(gap[2] < gap[1]);
}
