#include "birthcut/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

namespace birthcut {

namespace {

constexpr std::size_t kPanelOrder = 16;

Real tolerance_for(const Real& value, const PrecisionContext& ctx) {
    Real a = ctx.abs_tolerance();
    Real r = ctx.rel_tolerance() * abs(value);
    return a > r ? a : r;
}

void require_interval(const Interval& iv) {
    if (!(iv.lo < iv.hi)) throw NumericsError("interval requires lo < hi");
}

}  // namespace

Interval::Interval(Real l, Real h) : lo(std::move(l)), hi(std::move(h)) {}

const char* rule_kind_name(RuleKind kind) {
    switch (kind) {
        case RuleKind::plain: return "plain";
        case RuleKind::sqrt_endpoints: return "sqrt-endpoints";
        case RuleKind::chebyshev_first_kind: return "chebyshev-first-kind";
    }
    return "?";
}

const QuadratureRule& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, unsigned>, QuadratureRule> cache;
    const unsigned digits = Real::default_precision();
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, digits);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    QuadratureRule rule;
    rule.kind = RuleKind::plain;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const Real eps = epsilon_at_current_precision();
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        Real x(std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5)));
        Real dp;
        for (int iter = 0; iter < 100; ++iter) {
            Real p0(1), p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                Real p2 = (Real(static_cast<long>(2 * k - 1)) * x * p1 - Real(static_cast<long>(k - 1)) * p0) /
                          Real(static_cast<long>(k));
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = Real(1);
            dp = Real(static_cast<long>(n)) * (x * p1 - p0) / (x * x - 1);
            Real dx = p1 / dp;
            x -= dx;
            if (abs(dx) <= 4 * eps) {
                // one more pass for the derivative at the converged node
                Real q0(1), q1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    Real q2 = (Real(static_cast<long>(2 * k - 1)) * x * q1 - Real(static_cast<long>(k - 1)) * q0) /
                              Real(static_cast<long>(k));
                    q0 = q1;
                    q1 = q2;
                }
                dp = Real(static_cast<long>(n)) * (x * q1 - q0) / (x * x - 1);
                break;
            }
        }
        Real w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0;
    return cache.emplace(key, std::move(rule)).first->second;
}

QuadratureRule make_weighted_rule(RuleKind kind, const Interval& iv, std::size_t n) {
    require_interval(iv);
    if (n < 2) throw NumericsError("quadrature rule needs at least 2 nodes");
    QuadratureRule rule;
    rule.kind = kind;
    const Real c = iv.mid(), r = iv.radius();
    const Real p = pi();
    switch (kind) {
        case RuleKind::plain: {
            std::size_t panels = (n + kPanelOrder - 1) / kPanelOrder;
            const QuadratureRule& gl = gauss_legendre(kPanelOrder);
            Real h = iv.length() / Real(static_cast<long>(panels));
            for (std::size_t j = 0; j < panels; ++j) {
                Real a = iv.lo + h * Real(static_cast<long>(j));
                Real mid = a + h / 2;
                for (std::size_t k = 0; k < kPanelOrder; ++k) {
                    rule.nodes.push_back(mid + h / 2 * gl.nodes[k]);
                    rule.weights.push_back(h / 2 * gl.weights[k]);
                }
            }
            break;
        }
        case RuleKind::sqrt_endpoints: {
            // integral of g(x) sqrt((b-x)(x-a)) = r^2 * integral of g(c+ru) sqrt(1-u^2)
            Real np1(static_cast<long>(n + 1));
            for (std::size_t k = 1; k <= n; ++k) {
                Real th = p * Real(static_cast<long>(k)) / np1;
                Real s = sin(th);
                rule.nodes.push_back(c + r * cos(th));
                rule.weights.push_back(r * r * p / np1 * s * s);
            }
            break;
        }
        case RuleKind::chebyshev_first_kind: {
            Real nn(static_cast<long>(n));
            for (std::size_t k = 1; k <= n; ++k) {
                Real th = p * Real(static_cast<long>(2 * k - 1)) / (2 * nn);
                rule.nodes.push_back(c + r * cos(th));
                rule.weights.push_back(p / nn);
            }
            break;
        }
    }
    return rule;
}

QuadratureRule make_rule(RuleKind kind, const Interval& iv, std::size_t n) {
    QuadratureRule rule = make_weighted_rule(kind, iv, n);
    if (kind == RuleKind::plain) return rule;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        Real factor = sqrt((iv.hi - rule.nodes[k]) * (rule.nodes[k] - iv.lo));
        if (kind == RuleKind::sqrt_endpoints)
            rule.weights[k] /= factor;
        else
            rule.weights[k] *= factor;
    }
    return rule;
}

Real apply_rule(const QuadratureRule& rule, const RealFn& f) {
    Real s(0);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(rule.nodes[k]);
    return s;
}

namespace {

template <class RuleMaker>
Real doubling_loop(const RealFn& f, RuleMaker make, const PrecisionContext& ctx, const QuadratureOptions& opt,
                   const char* what) {
    std::size_t n = opt.initial_nodes < 2 ? 2 : opt.initial_nodes;
    Real prev = apply_rule(make(n), f);
    for (;;) {
        std::size_t next = 2 * n;
        if (next > opt.max_nodes) {
            Real last = prev;
            std::ostringstream os;
            os << what << ": no convergence within " << opt.max_nodes << " nodes";
            throw QuadratureNotConverged(os.str(), last, prev);
        }
        Real cur = apply_rule(make(next), f);
        if (abs(cur - prev) <= tolerance_for(cur, ctx)) return cur;
        if (2 * next > opt.max_nodes) {
            std::ostringstream os;
            os << what << ": no convergence within " << opt.max_nodes << " nodes (last two estimates "
               << format_real(cur, 20) << ", " << format_real(prev, 20) << ")";
            throw QuadratureNotConverged(os.str(), cur, prev);
        }
        prev = cur;
        n = next;
    }
}

}  // namespace

Real integrate(const RealFn& f, const Interval& iv, RuleKind kind, const PrecisionContext& ctx,
               const QuadratureOptions& opt) {
    PrecisionScope scope(ctx);
    require_interval(iv);
    return doubling_loop(f, [&](std::size_t n) { return make_rule(kind, iv, n); }, ctx, opt, "integrate");
}

Real integrate_weighted(const RealFn& g, const Interval& iv, RuleKind kind, const PrecisionContext& ctx,
                        const QuadratureOptions& opt) {
    PrecisionScope scope(ctx);
    require_interval(iv);
    return doubling_loop(g, [&](std::size_t n) { return make_weighted_rule(kind, iv, n); }, ctx, opt,
                         "integrate_weighted");
}

Complex integrate_complex(const std::function<Complex(const Real&)>& f, const Interval& iv,
                          const PrecisionContext& ctx, const QuadratureOptions& opt) {
    PrecisionScope scope(ctx);
    require_interval(iv);
    std::size_t n = opt.initial_nodes < 2 ? 2 : opt.initial_nodes;
    auto eval = [&](std::size_t m) {
        QuadratureRule rule = make_weighted_rule(RuleKind::plain, iv, m);
        Complex s(Real(0), Real(0));
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += Complex(rule.weights[k], Real(0)) * f(rule.nodes[k]);
        return s;
    };
    Complex prev = eval(n);
    while (2 * n <= opt.max_nodes) {
        n *= 2;
        Complex cur = eval(n);
        if (abs(cur - prev) <= tolerance_for(Real(abs(cur)), ctx)) return cur;
        prev = cur;
    }
    throw QuadratureNotConverged("integrate_complex: no convergence", Real(abs(prev)), Real(abs(prev)));
}

Real integrate_pv(const RealFn& f, const Real& pole, const Interval& iv, const PrecisionContext& ctx, RuleKind kind,
                  const QuadratureOptions& opt) {
    PrecisionScope scope(ctx);
    require_interval(iv);
    if (!(iv.lo < pole && pole < iv.hi)) throw NumericsError("integrate_pv: pole must lie strictly inside the interval");

    if (kind == RuleKind::plain) {
        Real d = pole - iv.lo < iv.hi - pole ? pole - iv.lo : iv.hi - pole;
        // symmetric window: integrand (f(p+h) - f(p-h))/h is regular at h = 0
        Real inner = integrate(
            [&](const Real& h) { return (f(pole + h) - f(pole - h)) / h; }, Interval(Real(0), d), RuleKind::plain,
            ctx, opt);
        Real outer(0);
        auto g = [&](const Real& x) { return f(x) / (x - pole); };
        if (pole + d < iv.hi) outer += integrate(g, Interval(pole + d, iv.hi), RuleKind::plain, ctx, opt);
        if (iv.lo < pole - d) outer += integrate(g, Interval(iv.lo, pole - d), RuleKind::plain, ctx, opt);
        return inner + outer;
    }

    // f = g * W with W the kind's endpoint factor: subtract g(pole) and add the
    // closed-form principal value of W/(x - pole).
    const Real c = iv.mid(), r = iv.radius();
    auto weight = [&](const Real& x) {
        Real s = sqrt((iv.hi - x) * (x - iv.lo));
        return kind == RuleKind::sqrt_endpoints ? s : Real(1) / s;
    };
    auto g = [&](const Real& x) { return f(x) / weight(x); };
    const Real gp = g(pole);
    Real regular = integrate_weighted(
        [&](const Real& x) {
            Real dx = x - pole;
            if (dx == 0) return Real(0);
            return (g(x) - gp) / dx;
        },
        iv, kind, ctx, opt);
    // PV of sqrt(1-u^2)/(u - xi) is -pi*xi, PV of 1/(sqrt(1-u^2)(u - xi)) is 0
    Real pv_weight = kind == RuleKind::sqrt_endpoints ? -pi() * (pole - c) : Real(0);
    (void)r;
    return regular + gp * pv_weight;
}

Real find_root(const RealFn& f, const Interval& bracket, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    Real a = bracket.lo, b = bracket.hi;
    Real fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if ((fa > 0) == (fb > 0)) throw NumericsError("find_root: no sign change on bracket");
    const Real tol = ctx.abs_tolerance();
    const Real eps = epsilon_at_current_precision();
    int stalled = 0;
    for (int iter = 0; iter < 4 * static_cast<int>(ctx.bits) + 200; ++iter) {
        Real width = b - a;
        Real scale = abs(a) > abs(b) ? abs(a) : abs(b);
        if (width <= 8 * eps * (scale > 1 ? scale : Real(1))) break;
        Real x;
        bool use_secant = stalled < 2 && fb != fa;
        if (use_secant) {
            x = b - fb * (b - a) / (fb - fa);
            Real margin = width / 64;
            if (!(x > a + margin && x < b - margin)) use_secant = false;
        }
        if (!use_secant) x = (a + b) / 2;
        Real fx = f(x);
        if (fx == 0 || (abs(fx) <= tol && width <= Real(1e-3) * (scale > 1 ? scale : Real(1)))) return x;
        Real before = b - a;
        if ((fx > 0) == (fa > 0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        stalled = (b - a) > before / 2 ? stalled + 1 : 0;
    }
    return abs(fa) < abs(fb) ? a : b;
}

bool scan_bracket(const RealFn& f, const Interval& range, int samples, Interval& out) {
    Real h = range.length() / Real(samples);
    Real xp = range.lo, fp = f(xp);
    for (int k = 1; k <= samples; ++k) {
        Real x = range.lo + h * Real(k);
        Real fx = f(x);
        if ((fp > 0) != (fx > 0) || fx == 0) {
            out = Interval(xp, x);
            return true;
        }
        xp = x;
        fp = fx;
    }
    return false;
}

Complex richardson_limit(const std::vector<Real>& h, const std::vector<Complex>& values) {
    if (h.size() != values.size() || h.empty()) throw NumericsError("richardson_limit: size mismatch");
    std::vector<Complex> t = values;
    const std::size_t m = t.size();
    for (std::size_t k = 1; k < m; ++k)
        for (std::size_t i = m - 1; i >= k; --i) {
            Real hi = h[i], hk = h[i - k];
            t[i] = (Complex(hk, 0) * t[i] - Complex(hi, 0) * t[i - 1]) / Complex(hk - hi, 0);
            if (i == k) break;
        }
    return t[m - 1];
}

Real richardson_limit(const std::vector<Real>& h, const std::vector<Real>& values) {
    std::vector<Complex> v;
    for (const auto& x : values) v.emplace_back(x, Real(0));
    return richardson_limit(h, v).real();
}

Complex csqrt(const Complex& z) { return std::sqrt(z); }
Complex clog(const Complex& z) { return std::log(z); }

}  // namespace birthcut
