#include "birthcut/orthopoly.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace birthcut {

namespace {

Real pow_int(const Real& x, int p) {
    Real r(1);
    for (int k = 0; k < p; ++k) r *= x;
    return r;
}

Complex pow_int(const Complex& z, int p) {
    Complex r(Real(1), Real(0));
    for (int k = 0; k < p; ++k) r *= z;
    return r;
}

struct Coefficients {
    std::vector<Real> a, b, h;
};

Coefficients discretized_stieltjes(const WeightSpec& w, const Interval& iv, int max_degree, std::size_t M) {
    QuadratureRule rule = make_weighted_rule(RuleKind::plain, iv, M);
    const std::size_t m = rule.nodes.size();
    std::vector<Real> wt(m), p(m, Real(1)), prev(m, Real(0));
    for (std::size_t i = 0; i < m; ++i) wt[i] = rule.weights[i] * w.weight(rule.nodes[i]);
    Coefficients c;
    for (int k = 0; k <= max_degree; ++k) {
        Real hk(0), xk(0);
        for (std::size_t i = 0; i < m; ++i) {
            Real q = wt[i] * p[i] * p[i];
            hk += q;
            xk += q * rule.nodes[i];
        }
        if (!(hk > 0)) throw OrthopolyError("precision exhausted; raise bits (nonpositive norm)");
        Real ak = xk / hk;
        Real bk = k == 0 ? hk : hk / c.h.back();
        c.a.push_back(ak);
        c.b.push_back(bk);
        c.h.push_back(hk);
        if (k == max_degree) break;
        for (std::size_t i = 0; i < m; ++i) {
            Real next = (rule.nodes[i] - ak) * p[i] - bk * prev[i];
            if (k == 0) next = (rule.nodes[i] - ak) * p[i];
            prev[i] = p[i];
            p[i] = next;
        }
    }
    return c;
}

bool agree(const std::vector<Real>& x, const std::vector<Real>& y, const Real& tol, const Real& scale) {
    for (std::size_t k = 0; k < x.size(); ++k)
        if (abs(x[k] - y[k]) > tol * (abs(y[k]) + scale)) return false;
    return true;
}

}  // namespace

WeightSpec WeightSpec::ensemble(Potential V, long N) {
    if (N < 1) throw OrthopolyError("ensemble weight needs N >= 1");
    V.validate();
    WeightSpec w;
    w.kind = Kind::ensemble;
    w.V = std::move(V);
    w.N = N;
    return w;
}

WeightSpec WeightSpec::model(int nu, const Real& tau) {
    if (nu < 1) throw OrthopolyError("model weight needs nu >= 1");
    WeightSpec w;
    w.kind = Kind::model;
    w.nu = nu;
    w.tau = tau;
    return w;
}

Real WeightSpec::log_weight(const Real& x) const {
    if (kind == Kind::ensemble) return -Real(N) * V(x);
    return -pow_int(x, 2 * nu) + tau * x;
}

Real WeightSpec::log_weight_derivative(const Real& x) const {
    if (kind == Kind::ensemble) return -Real(N) * V.poly.derivative()(x);
    return -Real(2 * nu) * pow_int(x, 2 * nu - 1) + tau;
}

Complex WeightSpec::log_weight(const Complex& z) const {
    if (kind == Kind::ensemble) return -Complex(Real(N), Real(0)) * V.poly(z);
    return -pow_int(z, 2 * nu) + Complex(tau, Real(0)) * z;
}

Interval WeightSpec::truncation(int max_degree, const PrecisionContext& ctx) const {
    PrecisionScope scope(ctx);
    const Real K(2 * max_degree);
    auto envelope = [&](const Real& x) { return log_weight(x) + K * log(2 + abs(x)); };
    const Real drop = Real(ctx.digits10() + 10) * log(Real(10)) + K * log(Real(4));

    Real R(4), best;
    Real xbest(0);
    for (int grow = 0; grow < 60; ++grow) {
        const int samples = 4000;
        bool have = false;
        for (int k = 0; k <= samples; ++k) {
            Real x = -R + 2 * R * Real(k) / samples;
            Real e = envelope(x);
            if (!have || e > best) {
                best = e;
                xbest = x;
                have = true;
            }
        }
        if (envelope(-R) < best - drop && envelope(R) < best - drop) break;
        R *= 2;
    }
    auto g = [&](const Real& x) { return envelope(x) - (best - drop); };
    Real lo = find_root(g, Interval(-R, xbest), ctx);
    Real hi = find_root(g, Interval(xbest, R), ctx);
    return Interval(lo, hi);
}

std::string WeightSpec::describe() const {
    std::ostringstream s;
    if (kind == Kind::ensemble) {
        s << "ensemble exp(-N V(x)), N=" << N << ", V coefficients ascending:";
        for (const auto& c : V.poly.coeffs()) s << " " << format_real(c, 20);
    } else {
        s << "model exp(-x^" << 2 * nu << " + tau x), nu=" << nu << ", tau=" << format_real(tau, 20);
    }
    return s.str();
}

void RecurrenceTable::evaluate(int k, const Real& x, Real& pk, Real& pk1) const {
    if (k > max_degree + 1) throw OrthopolyError("recurrence table too short for requested degree");
    Real prev(0), cur(1);
    for (int j = 0; j < k; ++j) {
        Real next = (x - a[j]) * cur - (j == 0 ? Real(0) : b[j] * prev);
        prev = cur;
        cur = next;
    }
    pk = cur;
    pk1 = prev;
}

void RecurrenceTable::evaluate(int k, const Complex& z, Complex& pk, Complex& pk1) const {
    if (k > max_degree + 1) throw OrthopolyError("recurrence table too short for requested degree");
    Complex prev(Real(0), Real(0)), cur(Real(1), Real(0));
    for (int j = 0; j < k; ++j) {
        Complex next = (z - Complex(a[j], Real(0))) * cur - (j == 0 ? Complex(Real(0), Real(0)) : b[j] * prev);
        prev = cur;
        cur = next;
    }
    pk = cur;
    pk1 = prev;
}

void RecurrenceTable::evaluate_with_derivative(int k, const Real& x, Real& pk, Real& pk1, Real& dpk,
                                               Real& dpk1) const {
    if (k > max_degree + 1) throw OrthopolyError("recurrence table too short for requested degree");
    Real prev(0), cur(1), dprev(0), dcur(0);
    for (int j = 0; j < k; ++j) {
        Real bj = j == 0 ? Real(0) : b[j];
        Real next = (x - a[j]) * cur - bj * prev;
        Real dnext = cur + (x - a[j]) * dcur - bj * dprev;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    pk = cur;
    pk1 = prev;
    dpk = dcur;
    dpk1 = dprev;
}

Real RecurrenceTable::monic(int k, const Real& x) const {
    Real pk, pk1;
    evaluate(k, x, pk, pk1);
    return pk;
}

void RecurrenceTable::write_csv(std::ostream& out) const {
    out << "# weight: " << weight << "\n";
    out << "# bits: " << bits << "\n";
    out << "# max_degree: " << max_degree << "\n";
    out << "# quadrature: composite Gauss-Legendre, " << nodes << " nodes on [" << format_real(support.lo, 20) << ", "
        << format_real(support.hi, 20) << "]\n";
    out << "k,a_k,b_k,h_k\n";
    for (std::size_t k = 0; k < a.size(); ++k)
        out << k << "," << format_real(a[k], 25) << "," << format_real(b[k], 25) << "," << format_real(h[k], 25)
            << "\n";
}

unsigned recommended_bits(int max_degree) { return static_cast<unsigned>(64 + 8 * std::max(max_degree, 8)); }

RecurrenceTable stieltjes_recurrence(const WeightSpec& w, int max_degree, const PrecisionContext& ctx,
                                     const StieltjesOptions& opt) {
    PrecisionScope scope(ctx);
    if (max_degree < 1) throw OrthopolyError("stieltjes_recurrence needs max_degree >= 1");
    const Interval iv = w.truncation(max_degree, ctx);
    const Real tol = ctx.rel_tolerance() * Real(1024);

    std::size_t M = opt.initial_nodes;
    Coefficients prev = discretized_stieltjes(w, iv, max_degree, M);
    bool converged = false;
    while (M < opt.max_nodes) {
        M *= 2;
        Coefficients cur = discretized_stieltjes(w, iv, max_degree, M);
        // a_k measured against the interval scale, since it can vanish by symmetry
        bool same = agree(cur.a, prev.a, tol, iv.radius()) && agree(cur.b, prev.b, tol, Real(0)) &&
                    agree(cur.h, prev.h, tol, Real(0));
        prev = std::move(cur);
        if (same) {
            converged = true;
            break;
        }
    }
    if (!converged) throw OrthopolyError("stieltjes_recurrence: coefficients did not stabilize within the node cap");

    RecurrenceTable t;
    t.a = std::move(prev.a);
    t.b = std::move(prev.b);
    t.h = std::move(prev.h);
    t.bits = ctx.bits;
    t.max_degree = max_degree;
    t.weight = w.describe();
    t.support = iv;
    t.nodes = M;
    for (const auto& bk : t.b)
        if (!(bk > 0)) throw OrthopolyError("precision exhausted; raise bits (nonpositive recurrence coefficient)");
    t.orthogonality_residual = orthogonality_residual(t, w, ctx);
    const Real limit = pow(Real(10), -Real(static_cast<long>(ctx.digits10() / 2)));
    if (t.orthogonality_residual > limit) throw OrthopolyError("precision exhausted; raise bits");
    return t;
}

Real orthogonality_residual(const RecurrenceTable& table, const WeightSpec& w, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    const int K = table.max_degree;
    QuadratureRule rule = make_weighted_rule(RuleKind::plain, table.support, 2 * table.nodes);
    const std::size_t m = rule.nodes.size();
    std::vector<std::vector<Real>> P(K + 1, std::vector<Real>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const Real& x = rule.nodes[i];
        Real prev(0), cur(1);
        for (int j = 0; j <= K; ++j) {
            P[j][i] = cur;
            Real next = (x - table.a[j]) * cur - (j == 0 ? Real(0) : table.b[j] * prev);
            prev = cur;
            cur = next;
        }
    }
    std::vector<Real> wt(m);
    for (std::size_t i = 0; i < m; ++i) wt[i] = rule.weights[i] * w.weight(rule.nodes[i]);
    Real worst(0);
    for (int j = 0; j <= K; ++j)
        for (int k = j + 1; k <= K; ++k) {
            Real s(0);
            for (std::size_t i = 0; i < m; ++i) s += wt[i] * P[j][i] * P[k][i];
            Real r = abs(s) / sqrt(table.h[j] * table.h[k]);
            if (r > worst) worst = r;
        }
    return worst;
}

Real cd_kernel_polynomial(const RecurrenceTable& table, int n, const Real& x, const Real& xp) {
    if (n <= 0) return Real(0);
    if (n > table.max_degree) throw OrthopolyError("cd_kernel: n exceeds the table degree");
    const Real& hn1 = table.h[n - 1];
    const Real confluent = pow(Real(10), -Real(static_cast<long>(Real::default_precision() / 3)));
    if (abs(x - xp) <= confluent * (1 + abs(x))) {
        Real mid = (x + xp) / 2;
        Real pk, pk1, dpk, dpk1;
        table.evaluate_with_derivative(n, mid, pk, pk1, dpk, dpk1);
        return (dpk * pk1 - pk * dpk1) / hn1;
    }
    Real px, px1, py, py1;
    table.evaluate(n, x, px, px1);
    table.evaluate(n, xp, py, py1);
    return (px * py1 - py * px1) / (hn1 * (x - xp));
}

Real cd_kernel(const RecurrenceTable& table, const WeightSpec& w, int n, const Real& x, const Real& xp) {
    return exp((w.log_weight(x) + w.log_weight(xp)) / 2) * cd_kernel_polynomial(table, n, x, xp);
}

Real model_kernel(int nu, int m, const Real& z, const Real& zp, const PrecisionContext& ctx) {
    if (m <= 0) return Real(0);
    PrecisionScope scope(ctx);
    const WeightSpec w = WeightSpec::model(nu);
    const RecurrenceTable t = stieltjes_recurrence(w, std::max(m, 1), ctx);
    return cd_kernel(t, w, m, z, zp);
}

Real determinant(std::vector<std::vector<Real>> m) {
    const std::size_t n = m.size();
    Real det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0) return Real(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            Real f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

Real correlation_det(const KernelFn& K, const std::vector<Real>& points) {
    if (points.empty() || points.size() > 6) throw OrthopolyError("correlation_det supports 1 to 6 points");
    std::vector<std::vector<Real>> m(points.size(), std::vector<Real>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j)
        for (std::size_t k = 0; k < points.size(); ++k) m[j][k] = K(points[j], points[k]);
    return determinant(std::move(m));
}

Real cauchy_axis_floor(const PrecisionContext& ctx) {
    return pow(Real(10), -Real(static_cast<long>(ctx.digits10() / 3)));
}

Complex cauchy_transform(const std::function<Complex(const Complex&)>& f, const Interval& iv, const Complex& z,
                         const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    const Real im = abs(z.imag());
    if (im < cauchy_axis_floor(ctx)) throw TooCloseToAxis("too close to the real axis; use boundary-value mode");
    const Complex L(iv.lo, Real(0)), R(iv.hi, Real(0));
    if (im >= Real(0.25)) {
        return integrate_complex([&](const Real& s) { return f(Complex(s, Real(0))) / (Complex(s, Real(0)) - z); },
                                 iv, ctx);
    }
    // subtract f(z): the remaining integrand is smooth uniformly as z nears the axis
    const Complex fz = f(z);
    Complex body = integrate_complex(
        [&](const Real& s) {
            Complex sc(s, Real(0));
            return (f(sc) - fz) / (sc - z);
        },
        iv, ctx);
    return body + fz * std::log((R - z) / (L - z));
}

Complex cauchy_boundary(const std::function<Complex(const Complex&)>& f,
                        const std::function<Complex(const Real&)>& df, const Interval& iv, const Real& x, int side,
                        const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    if (!(x > iv.lo && x < iv.hi)) throw OrthopolyError("boundary point must lie inside the truncation interval");
    const Complex fx = f(Complex(x, Real(0)));
    Complex body = integrate_complex(
        [&](const Real& s) {
            if (s == x) return df(x);
            return (f(Complex(s, Real(0))) - fx) / Complex(s - x, Real(0));
        },
        iv, ctx);
    Complex pv = body + fx * Complex(log((iv.hi - x) / (x - iv.lo)), Real(0));
    // (1/2 pi i) PV +- f/2
    const Complex half = fx / Complex(Real(2), Real(0));
    return pv / Complex(Real(0), 2 * pi()) + (side > 0 ? half : -half);
}

Complex weighted_cauchy_transform(const RecurrenceTable& table, const WeightSpec& w, int k, const Complex& z,
                                  const PrecisionContext& ctx) {
    auto f = [&](const Complex& s) {
        Complex pk, pk1;
        table.evaluate(k, s, pk, pk1);
        return pk * w.weight(s);
    };
    Complex integral = cauchy_transform(f, table.support, z, ctx);
    return integral / Complex(Real(0), 2 * pi());
}

Complex weighted_cauchy_boundary(const RecurrenceTable& table, const WeightSpec& w, int k, const Real& x, int side,
                                 const PrecisionContext& ctx) {
    auto f = [&](const Complex& s) {
        Complex pk, pk1;
        table.evaluate(k, s, pk, pk1);
        return pk * w.weight(s);
    };
    auto df = [&](const Real& s) {
        Real pk, pk1, dpk, dpk1;
        table.evaluate_with_derivative(k, s, pk, pk1, dpk, dpk1);
        return Complex((dpk + pk * w.log_weight_derivative(s)) * w.weight(s), Real(0));
    };
    return cauchy_boundary(f, df, table.support, x, side, ctx);
}

}  // namespace birthcut
