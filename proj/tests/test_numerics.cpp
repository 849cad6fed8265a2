#include "doctest.h"

#include "birthcut/band_measure.hpp"
#include "birthcut/numerics.hpp"
#include "birthcut/polynomial.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

using namespace birthcut;

namespace {
const PrecisionContext ctx = PrecisionContext::with_bits(128);
bool close(const Real& a, const Real& b, double tol) { return abs(a - b) <= tol * (1 + abs(b)); }
}  // namespace

TEST_CASE("plain quadrature of a polynomial") {
    PrecisionScope s(ctx);
    Real v = integrate([](const Real& x) { return x * x; }, Interval(Real(0), Real(1)), RuleKind::plain, ctx);
    CHECK(close(v, Real(1) / 3, 1e-30));
}

TEST_CASE("semicircle area with endpoint-aware rules") {
    PrecisionScope s(ctx);
    Interval iv(Real(-2), Real(2));
    Real a = integrate_weighted([](const Real&) { return Real(1); }, iv, RuleKind::sqrt_endpoints, ctx);
    CHECK(close(a, 2 * pi(), 1e-30));
    Real b = integrate([](const Real& x) { return sqrt(4 - x * x); }, iv, RuleKind::sqrt_endpoints, ctx);
    CHECK(close(b, 2 * pi(), 1e-30));
    Real c = integrate([](const Real& x) { return 1 / sqrt(4 - x * x); }, iv, RuleKind::chebyshev_first_kind, ctx);
    CHECK(close(c, pi(), 1e-30));
}

TEST_CASE("principal values") {
    PrecisionScope s(ctx);
    Real v = integrate_pv([](const Real&) { return Real(1); }, Real(0.5), Interval(Real(0), Real(1)), ctx);
    CHECK(close(v, Real(0), 1e-25));
    Real w = integrate_pv([](const Real&) { return Real(1); }, Real(0.5), Interval(Real(0), Real(2)), ctx);
    CHECK(close(w, log(Real(3)), 1e-25));
    // PV int s/((s-1) sqrt(4-s^2)) = pi
    Real u = integrate_pv([](const Real& x) { return x / sqrt(4 - x * x); }, Real(1), Interval(Real(-2), Real(2)), ctx,
                          RuleKind::chebyshev_first_kind);
    CHECK(close(u, pi(), 1e-25));
}

TEST_CASE("bracketed root finding") {
    PrecisionScope s(ctx);
    Real r = find_root([](const Real& x) { return x * x - 2; }, Interval(Real(0), Real(2)), ctx);
    CHECK(close(r, sqrt(Real(2)), 1e-30));
    Real q = find_root([](const Real& x) { return cos(x); }, Interval(Real(1), Real(2)), ctx);
    CHECK(close(q, pi() / 2, 1e-30));
}

TEST_CASE("polynomial algebra") {
    Polynomial p({Real(1), Real(-3), Real(0), Real(2)});
    Real rem;
    Polynomial q = p.divide_linear(Real(1), &rem);
    CHECK(rem == 0);
    CHECK(close(q(Real(3)) * 2, p(Real(3)), 1e-30));
    Polynomial sh = p.shifted(Real(1));
    CHECK(close(sh(Real(2)), p(Real(3)), 1e-30));
    CHECK(p.derivative().antiderivative()(Real(2)) == p(Real(2)) - p(Real(0)));
}

TEST_CASE("semicircle log potential and Cauchy transform") {
    PrecisionScope s(ctx);
    Interval iv(Real(-2), Real(2));
    BandMeasure m = BandMeasure::from_sqrt_factor([](const Real&) { return 1 / (2 * pi()); }, iv, ctx);
    CHECK(close(m.mass(), Real(1), 1e-30));
    for (double x : {-1.7, -0.3, 0.0, 0.9, 1.95}) {
        Real xr(x);
        CHECK(close(m.log_abs_potential(xr), xr * xr / 4 - Real(0.5), 1e-28));
        CHECK(close(m.stieltjes_pv(xr), xr / 2, 1e-28));
    }
    Complex z(Real(3), Real(1));
    Complex g = m.stieltjes(z);
    Complex exact = (z - std::sqrt(z * z - Complex(Real(4), Real(0)))) / Complex(Real(2), Real(0));
    CHECK(abs(g - exact) < Real(1e-28));
}

TEST_CASE("log potential matches an independent tanh-sinh oracle off the cut") {
    using B = boost::multiprecision::cpp_bin_float_50;
    boost::math::quadrature::tanh_sinh<B> ts;
    const double x0 = 0.3;
    auto f = [&](B t) -> B { return sqrt(4 - t * t) * log(abs(B(x0) - t)); };
    B oracle = (ts.integrate(f, B(-2), B(x0)) + ts.integrate(f, B(x0), B(2))) / (2 * boost::math::constants::pi<B>());
    PrecisionScope s(ctx);
    BandMeasure m = BandMeasure::from_sqrt_factor([](const Real&) { return 1 / (2 * pi()); },
                                                  Interval(Real(-2), Real(2)), ctx);
    CHECK(std::abs(to_double(m.log_abs_potential(Real(x0))) - oracle.convert_to<double>()) < 1e-14);
    // exterior point: Re log potential
    const double x1 = 3.1;
    B oracle1 = ts.integrate([&](B t) -> B { return sqrt(4 - t * t) * log(B(x1) - t); }, B(-2), B(2)) /
                (2 * boost::math::constants::pi<B>());
    CHECK(std::abs(to_double(m.log_potential(Complex(Real(x1), Real(0))).real()) - oracle1.convert_to<double>()) <
          1e-14);
}

TEST_CASE("boundary values of the log potential jump by 2 pi i times the mass to the right") {
    PrecisionScope s(ctx);
    BandMeasure m = BandMeasure::from_sqrt_factor([](const Real&) { return 1 / (2 * pi()); },
                                                  Interval(Real(-2), Real(2)), ctx);
    Real x(0.5);
    Complex up = m.log_potential_boundary(x, 1), dn = m.log_potential_boundary(x, -1);
    // semicircle mass on (x, 2) from the antiderivative t sqrt(4-t^2)/2 + 2 asin(t/2)
    Real right = (pi() - x * sqrt(4 - x * x) / 2 - 2 * asin(x / 2)) / (2 * pi());
    CHECK(close((up - dn).imag(), 2 * pi() * right, 1e-28));
    CHECK(close(up.real(), x * x / 4 - Real(0.5), 1e-28));
}
