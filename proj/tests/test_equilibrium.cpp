#include "doctest.h"

#include "birthcut/equilibrium.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <sstream>

using namespace birthcut;

namespace {
const PrecisionContext ctx = PrecisionContext::with_bits(128);
Potential gaussian() { return Potential(Polynomial({Real(0), Real(0), Real(0.5)}), "x^2/2"); }
}  // namespace

TEST_CASE("semicircle from the one-cut solver") {
    PrecisionScope s(ctx);
    OneCutMeasure m = solve_one_cut(gaussian(), Real(1), ctx);
    CHECK(abs(m.a + 2) < Real(1e-25));
    CHECK(abs(m.b - 2) < Real(1e-25));
    CHECK(abs(m.mass() - 1) < Real(1e-25));
    for (int k = 1; k < 50; ++k) {
        Real x = Real(-2) + Real(4) * Real(k) / 50;
        CHECK(abs(m.density(x) - sqrt(4 - x * x) / (2 * pi())) < Real(1e-25));
        CHECK(abs(effective_potential(m, gaussian(), x)) < Real(1e-25));
    }
    // l from the variational equality at x = 0: 2 U(0) - 0 = l with U(0) = -1/2
    CHECK(abs(m.l_t + 1) < Real(1e-25));
}

TEST_CASE("semicircle endpoints scale like 2 sqrt(t)") {
    PrecisionScope s(ctx);
    OneCutMeasure m = solve_one_cut(gaussian(), Real(0.25), ctx);
    CHECK(abs(m.a + 1) < Real(1e-25));
    CHECK(abs(m.b - 1) < Real(1e-25));
}

TEST_CASE("endpoint equation solved by bracketed root finding") {
    PrecisionScope s(ctx);
    // for V = x^2/2 with symmetric support [-r, r] the mass condition reads r^2/4 = 1
    Real r = find_root([](const Real& r) { return r * r / 4 - 1; }, Interval(Real(1), Real(3)), ctx);
    CHECK(abs(-r + 2) < Real(1e-30));
}

TEST_CASE("effective potential off the semicircle support against a quadrature oracle") {
    using B = boost::multiprecision::cpp_bin_float_50;
    boost::math::quadrature::tanh_sinh<B> ts;
    B u = ts.integrate([](B s) -> B { return sqrt(4 - s * s) * log(B(3) - s); }, B(-2), B(2)) /
          (2 * boost::math::constants::pi<B>());
    double oracle = (2 * u - B(4.5) + 1).convert_to<double>();
    PrecisionScope s(ctx);
    OneCutMeasure m = solve_one_cut(gaussian(), Real(1), ctx);
    Real e = effective_potential(m, gaussian(), Real(3));
    CHECK(e < 0);
    CHECK(std::abs(to_double(e) - oracle) < 1e-14);
    // derivative form against a central difference
    Real h(1e-12);
    Real fd = (effective_potential(m, gaussian(), Real(3) + h) - effective_potential(m, gaussian(), Real(3) - h)) / (2 * h);
    CHECK(abs(fd - effective_potential_derivative(m, Real(3))) < Real(1e-10));
    CHECK(abs(effective_potential_derivative(m, Real(3)) + sqrt(Real(5))) < Real(1e-25));
}

TEST_CASE("semicircle has no critical point") {
    PrecisionScope s(ctx);
    OneCutMeasure m = solve_one_cut(gaussian(), Real(1), ctx);
    CHECK_THROWS_WITH_AS(detect_critical_point(m, gaussian(), Interval(Real(2), Real(6)), ctx),
                         doctest::Contains("no critical point"), EquilibriumError);
}

TEST_CASE("arcsine log potential and phi") {
    using B = boost::multiprecision::cpp_bin_float_50;
    boost::math::quadrature::tanh_sinh<B> ts;
    for (double x : {0.0, 1.0, -1.0}) {
        auto f = [&](B s) -> B { return log(abs(B(x) - s)) / (boost::math::constants::pi<B>() * sqrt(4 - s * s)); };
        B v = ts.integrate(f, B(-2), B(x)) + ts.integrate(f, B(x), B(2));
        CHECK(std::abs(v.convert_to<double>()) < 1e-12);
        CHECK(arcsine_log_potential(Real(x)) == 0);
    }
    B v3 = ts.integrate([](B s) -> B { return log(B(3) - s) / (boost::math::constants::pi<B>() * sqrt(4 - s * s)); },
                        B(-2), B(2));
    CHECK(std::abs(to_double(phi(Real(3))) - v3.convert_to<double>()) < 1e-14);
    CHECK(abs(phi(Real(3)) - log((3 + sqrt(Real(5))) / 2)) < Real(1e-30));
    CHECK(abs(phi(Real(1e6)) - log(Real(1e6))) < Real(1e-11));
    CHECK_THROWS(phi(Real(2)));
}

TEST_CASE("q function two ways") {
    PrecisionScope s(ctx);
    OneCutMeasure m = solve_one_cut(gaussian(), Real(1), ctx);
    QIdentity q3 = q_identity_check(m, gaussian(), Real(3), ctx);
    CHECK(q3.residual < Real(1e-25));
    QIdentity q5 = q_identity_check(m, gaussian(), Real(5), ctx);
    CHECK(abs(q5.from_stieltjes - Real(21) / 4) < Real(1e-25));
    CHECK(abs(q5.from_difference_quotient - Real(21) / 4) < Real(1e-25));
    QIdentity qb = q_identity_check(m, gaussian(), m.b, ctx);
    CHECK(abs(qb.from_difference_quotient) < Real(1e-25));
}

TEST_CASE("derivative of t rho^t at t = 1 is the arcsine density") {
    PrecisionScope s(ctx);
    std::vector<BrRow> rows = br_derivative_check(gaussian(), {Real(0.99), Real(0.995)}, ctx);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].residual < rows[0].residual);
    double ratio = to_double(rows[1].residual / rows[0].residual);
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
    CHECK_THROWS(br_derivative_check(gaussian(), {Real(1)}, ctx));
}

TEST_CASE("monotonicity of the support and of t rho^t") {
    PrecisionScope s(ctx);
    Potential V(Polynomial({Real(0), Real(0.3), Real(0.5), Real(0), Real(0.05)}), "test quartic");
    OneCutMeasure m1 = solve_one_cut(V, Real(0.5), ctx);
    OneCutMeasure m2 = solve_one_cut(V, Real(0.8), ctx);
    CHECK(m2.a <= m1.a);
    CHECK(m1.b <= m2.b);
    CHECK(abs(m1.mass() - 1) < Real(1e-20));
    for (int k = 1; k < 20; ++k) {
        Real x = m1.a + (m1.b - m1.a) * Real(k) / 20;
        CHECK(m2.t * m2.density(x) >= m1.t * m1.density(x) - Real(1e-8));
        CHECK(abs(effective_potential(m1, V, x)) < Real(1e-20));
    }
}

TEST_CASE("synthesis round trip for nu = 1 and nu = 2") {
    PrecisionScope s(ctx);
    for (int nu : {1, 2}) {
        Synthesis syn = synthesize_birth_potential(Real(3), nu, ctx);
        CHECK(syn.V.poly.degree() == 2 * nu + 2);
        CHECK(abs(syn.measure.a + 2) < Real(1e-20));
        CHECK(abs(syn.measure.b - 2) < Real(1e-20));
        CHECK(syn.normalization_residual < Real(1e-20));
        CHECK(abs(syn.E_at_xstar) < Real(1e-20));
        CHECK(syn.report.nu == nu);
        CHECK(abs(syn.report.x_star - 3) < Real(1e-6));
        CHECK(syn.report.Q_at_xstar > 0);
        CHECK(syn.report.margin > 0);
        CHECK(syn.report.c_star_per_n > -Real(1e-12));
        // the density factor equals Q (x - x*)^{2 nu - 1}
        Polynomial h = Polynomial({syn.q0, syn.q1}) * Polynomial::linear_power(Real(3), 2 * nu - 1);
        for (double x : {-1.5, 0.0, 1.2}) CHECK(abs(h(Real(x)) - syn.measure.hpoly(Real(x))) < Real(1e-20));
        // off-support samples are strictly negative away from x*
        for (int k = 0; k <= 50; ++k) {
            Real x = Real(-8) + Real(16) * Real(k) / 50;
            if (abs(x) < Real(2.05) || abs(x - 3) < Real(0.1)) continue;
            CHECK(effective_potential(syn.measure, syn.V, x) < 0);
        }
    }
    CHECK_THROWS_AS(synthesize_birth_potential(Real(2), 1, ctx), EquilibriumError);
}

TEST_CASE("potential file round trip") {
    PrecisionScope s(ctx);
    Synthesis syn = synthesize_birth_potential(Real(3), 1, ctx);
    std::stringstream ss;
    syn.V.write(ss);
    Potential back = Potential::read(ss);
    CHECK(back.provenance == syn.V.provenance);
    REQUIRE(back.poly.degree() == syn.V.poly.degree());
    for (int k = 0; k <= back.poly.degree(); ++k)
        CHECK(abs(back.poly.coeff(k) - syn.V.poly.coeff(k)) <= abs(syn.V.poly.coeff(k)) * Real(1e-35));
    std::stringstream bad("# header\n1\n0\n-1\n");
    CHECK_THROWS_AS(Potential::read(bad), EquilibriumError);
}
