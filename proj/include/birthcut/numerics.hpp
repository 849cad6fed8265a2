#pragma once

#include "birthcut/real.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace birthcut {

struct Interval {
    Real lo, hi;
    Interval() = default;
    Interval(Real l, Real h);
    Real mid() const { return (lo + hi) / 2; }
    Real radius() const { return (hi - lo) / 2; }
    Real length() const { return hi - lo; }
    bool contains(const Real& x) const { return lo <= x && x <= hi; }
};

// plain: composite Gauss-Legendre.
// sqrt_endpoints: Gauss-Chebyshev of the second kind, for integrands that vanish
//   like sqrt((b-x)(x-a)) at both ends.
// chebyshev_first_kind: Gauss-Chebyshev of the first kind, for integrands that
//   blow up like 1/sqrt((b-x)(x-a)).
enum class RuleKind { plain, sqrt_endpoints, chebyshev_first_kind };

const char* rule_kind_name(RuleKind kind);

struct QuadratureRule {
    std::vector<Real> nodes;
    std::vector<Real> weights;
    RuleKind kind = RuleKind::plain;
};

using RealFn = std::function<Real(const Real&)>;
using ComplexFn = std::function<Complex(const Complex&)>;

class NumericsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureNotConverged : public NumericsError {
public:
    QuadratureNotConverged(const std::string& what, Real last, Real previous)
        : NumericsError(what), last_estimate(std::move(last)), previous_estimate(std::move(previous)) {}
    Real last_estimate;
    Real previous_estimate;
};

struct QuadratureOptions {
    std::size_t initial_nodes = 16;
    std::size_t max_nodes = std::size_t(1) << 15;
};

// Rule applied to the full integrand f. For the two Chebyshev kinds the weights
// already divide out the endpoint factor, so sum w_k f(x_k) is the integral of f.
QuadratureRule make_rule(RuleKind kind, const Interval& iv, std::size_t n);

// Rule for the smooth factor g only: sum w_k g(x_k) approximates
// the integral of g times the kind's endpoint factor (1 for plain).
QuadratureRule make_weighted_rule(RuleKind kind, const Interval& iv, std::size_t n);

// Gauss-Legendre nodes/weights on [-1,1], cached per (n, precision).
const QuadratureRule& gauss_legendre(std::size_t n);

Real apply_rule(const QuadratureRule& rule, const RealFn& f);

// Integral of f over iv; f is the full integrand, with endpoint behavior
// matched to the rule kind. Node doubling until successive estimates agree.
Real integrate(const RealFn& f, const Interval& iv, RuleKind kind, const PrecisionContext& ctx,
               const QuadratureOptions& opt = {});

// Integral of g times the kind's endpoint factor.
Real integrate_weighted(const RealFn& g, const Interval& iv, RuleKind kind, const PrecisionContext& ctx,
                        const QuadratureOptions& opt = {});

Complex integrate_complex(const std::function<Complex(const Real&)>& f, const Interval& iv,
                          const PrecisionContext& ctx, const QuadratureOptions& opt = {});

// Principal value of the integral of f(x)/(x - pole) over iv. With kind plain
// f must be smooth near the pole; with the Chebyshev kinds f carries the
// matching endpoint factor.
Real integrate_pv(const RealFn& f, const Real& pole, const Interval& iv, const PrecisionContext& ctx,
                  RuleKind kind = RuleKind::plain, const QuadratureOptions& opt = {});

// Bracketed root: bisection with secant steps.
Real find_root(const RealFn& f, const Interval& bracket, const PrecisionContext& ctx);

// Locate a bracket by scanning [lo,hi] on a uniform grid; returns false if no
// sign change is found.
bool scan_bracket(const RealFn& f, const Interval& range, int samples, Interval& out);

// Neville/Richardson extrapolation to h -> 0 for samples whose error expands
// in integer powers of h.
Complex richardson_limit(const std::vector<Real>& h, const std::vector<Complex>& values);
Real richardson_limit(const std::vector<Real>& h, const std::vector<Real>& values);

// Principal branch helpers. sqrt_pair(z - a, z - b) style products with the
// cut on [a, b] are written as sqrt(z-a)*sqrt(z-b) at call sites.
Complex csqrt(const Complex& z);
Complex clog(const Complex& z);

}  // namespace birthcut
