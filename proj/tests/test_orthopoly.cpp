#include "doctest.h"

#include "birthcut/orthopoly.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <sstream>

using namespace birthcut;

namespace {
const PrecisionContext ctx = PrecisionContext::with_bits(128);

Real rel(const Real& got, const Real& want) { return abs(got - want) / abs(want); }
}  // namespace

TEST_CASE("Hermite weight reproduces a = 0, b_k = k/2") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(1);
    const RecurrenceTable t = stieltjes_recurrence(w, 40, ctx);
    CHECK(rel(t.b[0], sqrt(pi())) < Real(1e-20));
    Real h = sqrt(pi());
    for (int k = 0; k <= 40; ++k) {
        CHECK(abs(t.a[k]) < Real(1e-20));
        if (k > 0) {
            CHECK(rel(t.b[k], Real(k) / 2) < Real(1e-20));
            h *= Real(k) / 2;
        }
        CHECK(rel(t.h[k], h) < Real(1e-20));
    }
    CHECK(t.orthogonality_residual < Real(1e-20));
}

TEST_CASE("even quartic weight gives vanishing a_k and h_0 = 2 Gamma(5/4)") {
    PrecisionScope s(ctx);
    const RecurrenceTable t = stieltjes_recurrence(WeightSpec::model(2), 20, ctx);
    CHECK(rel(t.h[0], 2 * boost::math::tgamma(Real(1.25))) < Real(1e-25));
    for (int k = 0; k <= 20; ++k) CHECK(abs(t.a[k]) < Real(1e-25));
    // h_1 = int x^2 e^{-x^4} = Gamma(3/4)/2
    CHECK(rel(t.h[1], boost::math::tgamma(Real(0.75)) / 2) < Real(1e-25));
}

TEST_CASE("Gaussian ensemble weight scales with N") {
    PrecisionScope s(ctx);
    const long N = 12;
    const WeightSpec w = WeightSpec::ensemble(Potential(Polynomial({Real(0), Real(0), Real(0.5)}), "x^2/2"), N);
    const RecurrenceTable t = stieltjes_recurrence(w, 16, ctx);
    CHECK(rel(t.h[0], sqrt(2 * pi() / N)) < Real(1e-25));
    for (int k = 1; k <= 16; ++k) CHECK(rel(t.b[k], Real(k) / N) < Real(1e-25));
}

TEST_CASE("tilted model weight has shifted Hermite coefficients") {
    PrecisionScope s(ctx);
    // e^{-x^2 + tau x} = e^{tau^2/4} e^{-(x - tau/2)^2}
    const Real tau(0.6);
    const RecurrenceTable t = stieltjes_recurrence(WeightSpec::model(1, tau), 10, ctx);
    for (int k = 0; k <= 10; ++k) CHECK(abs(t.a[k] - tau / 2) < Real(1e-25));
    CHECK(rel(t.h[0], sqrt(pi()) * exp(tau * tau / 4)) < Real(1e-25));
}

TEST_CASE("kernel trace and reproducing property") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(2);
    const RecurrenceTable t = stieltjes_recurrence(w, 16, ctx);
    for (int n : {8, 16}) {
        Real tr = integrate([&](const Real& x) { return cd_kernel(t, w, n, x, x); }, t.support, RuleKind::plain, ctx);
        CHECK(abs(tr - n) < Real(1e-20));
        const Real x(0.3), y(-0.7);
        Real rep = integrate([&](const Real& u) { return cd_kernel(t, w, n, x, u) * cd_kernel(t, w, n, u, y); },
                             t.support, RuleKind::plain, ctx);
        CHECK(abs(rep - cd_kernel(t, w, n, x, y)) < Real(1e-20));
    }
}

TEST_CASE("kernel closed forms at the origin") {
    PrecisionScope s(ctx);
    CHECK(rel(model_kernel(1, 1, Real(0), Real(0), ctx), 1 / sqrt(pi())) < Real(1e-25));
    // pi_1(0) = 0 by symmetry, so K_2(0,0) = 1/h_0
    CHECK(rel(model_kernel(2, 2, Real(0), Real(0), ctx), 1 / (2 * boost::math::tgamma(Real(1.25)))) < Real(1e-25));
}

TEST_CASE("confluent kernel matches the nearby off-diagonal value") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(1);
    const RecurrenceTable t = stieltjes_recurrence(w, 12, ctx);
    const Real x(0.4);
    Real direct(0);
    for (int j = 0; j < 12; ++j) direct += t.monic(j, x) * t.monic(j, x) / t.h[j];
    direct *= w.weight(x);
    CHECK(rel(cd_kernel(t, w, 12, x, x), direct) < Real(1e-25));
    CHECK(rel(cd_kernel(t, w, 12, x, x + Real(1e-8)), direct) < Real(1e-7));
}

TEST_CASE("correlation determinants") {
    PrecisionScope s(ctx);
    CHECK(abs(determinant({{Real(2), Real(1)}, {Real(1), Real(3)}}) - 5) < Real(1e-30));
    CHECK(abs(determinant({{Real(0), Real(1)}, {Real(1), Real(0)}}) + 1) < Real(1e-30));
    const WeightSpec w = WeightSpec::model(1);
    const RecurrenceTable t = stieltjes_recurrence(w, 8, ctx);
    KernelFn K1 = [&](const Real& x, const Real& y) { return cd_kernel(t, w, 1, x, y); };
    KernelFn K8 = [&](const Real& x, const Real& y) { return cd_kernel(t, w, 8, x, y); };
    // rank one kernel: every 2-point correlation vanishes
    CHECK(abs(correlation_det(K1, {Real(0.1), Real(0.5)})) < Real(1e-30));
    CHECK(correlation_det(K8, {Real(0.1), Real(0.5), Real(-1)}) > 0);
    CHECK(abs(correlation_det(K8, {Real(0.2)}) - K8(Real(0.2), Real(0.2))) < Real(1e-30));
    CHECK_THROWS_AS(correlation_det(K8, std::vector<Real>(7, Real(0))), OrthopolyError);
}

TEST_CASE("Cauchy transform of the Gaussian at i") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(1);
    const RecurrenceTable t = stieltjes_recurrence(w, 4, ctx);
    // int e^{-s^2}/(s - z) ds = i pi e^{-z^2} erfc(-iz); at z = i this is i pi e erfc(1)
    Complex c = weighted_cauchy_transform(t, w, 0, Complex(Real(0), Real(1)), ctx);
    Real want = exp(Real(1)) * boost::math::erfc(Real(1)) / 2;
    CHECK(abs(c - Complex(want, Real(0))) < Real(1e-25));
    // same value through the subtraction branch, just below the switch
    const Real y(0.2);
    Complex near = weighted_cauchy_transform(t, w, 0, Complex(Real(0), y), ctx);
    Real want2 = exp(y * y) * boost::math::erfc(y) / 2;
    CHECK(abs(near - Complex(want2, Real(0))) < Real(1e-25));
}

TEST_CASE("Cauchy transform decays like -h_k / (2 pi i z^{k+1})") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(1);
    const RecurrenceTable t = stieltjes_recurrence(w, 6, ctx);
    const Complex z(Real(0), Real(200));
    for (int k = 0; k <= 5; ++k) {
        Complex c = weighted_cauchy_transform(t, w, k, z, ctx);
        Complex zk(Real(1), Real(0));
        for (int j = 0; j <= k; ++j) zk *= z;
        Complex lead = -Complex(t.h[k], Real(0)) / (Complex(Real(0), 2 * pi()) * zk);
        CHECK(abs(c / lead - Complex(Real(1), Real(0))) < Real(1e-3));
    }
}

TEST_CASE("boundary values: Plemelj jump and approach from above") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(2, Real(0.3));
    const RecurrenceTable t = stieltjes_recurrence(w, 6, ctx);
    for (int k : {0, 3, 6}) {
        const Real x(0.35);
        Complex up = weighted_cauchy_boundary(t, w, k, x, +1, ctx);
        Complex dn = weighted_cauchy_boundary(t, w, k, x, -1, ctx);
        Real f = t.monic(k, x) * w.weight(x);
        CHECK(abs(up - dn - Complex(f, Real(0))) < Real(1e-25));
        Complex eps = weighted_cauchy_transform(t, w, k, Complex(x, Real(1e-10)), ctx);
        CHECK(abs(eps - up) < Real(1e-8));
        Complex below = weighted_cauchy_transform(t, w, k, Complex(x, Real(-1e-10)), ctx);
        CHECK(abs(below - dn) < Real(1e-8));
    }
}

TEST_CASE("near-axis evaluation is refused below the floor") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(1);
    const RecurrenceTable t = stieltjes_recurrence(w, 2, ctx);
    CHECK_THROWS_AS(weighted_cauchy_transform(t, w, 0, Complex(Real(0.1), Real(1e-30)), ctx), TooCloseToAxis);
}

TEST_CASE("corrupted recurrence coefficient shows up in the orthogonality residual") {
    PrecisionScope s(ctx);
    const WeightSpec w = WeightSpec::model(1);
    RecurrenceTable t = stieltjes_recurrence(w, 10, ctx);
    CHECK(orthogonality_residual(t, w, ctx) < Real(1e-25));
    t.b[5] *= Real(1.001);
    CHECK(orthogonality_residual(t, w, ctx) > Real(1e-5));
    CHECK(recommended_bits(48) >= 448);
}

TEST_CASE("recurrence table CSV is labeled") {
    PrecisionScope s(ctx);
    const RecurrenceTable t = stieltjes_recurrence(WeightSpec::model(1), 3, ctx);
    std::ostringstream out;
    t.write_csv(out);
    CHECK(out.str().find("# bits: 128") != std::string::npos);
    CHECK(out.str().find("k,a_k,b_k,h_k") != std::string::npos);
}
