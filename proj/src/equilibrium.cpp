#include "birthcut/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace birthcut {

namespace {

// arcsine means (1/pi) int f(s) ds / sqrt((b-s)(s-a)) by Gauss-Chebyshev;
// exact for polynomial f of degree < 2n
struct ArcsineNodes {
    std::vector<Real> u;
    explicit ArcsineNodes(std::size_t n) {
        const Real p = pi();
        for (std::size_t k = 1; k <= n; ++k) u.push_back(cos(p * Real(long(2 * k - 1)) / Real(long(2 * n))));
    }
};

struct EndpointSystem {
    Real F0, F1;
    Real J00, J01, J10, J11;
};

EndpointSystem endpoint_system(const Polynomial& p, const Polynomial& dp, const ArcsineNodes& nodes, const Real& c,
                               const Real& r) {
    Real m0(0), m1(0), d0(0), du(0), duu(0);
    for (const auto& u : nodes.u) {
        Real x = c + r * u;
        Real px = p(x), dpx = dp(x);
        m0 += px;
        m1 += u * px;
        d0 += dpx;
        du += u * dpx;
        duu += u * u * dpx;
    }
    const Real n(long(nodes.u.size()));
    m0 /= n;
    m1 /= n;
    d0 /= n;
    du /= n;
    duu /= n;
    EndpointSystem s;
    s.F0 = m0;
    s.F1 = r * m1 - 2;
    s.J00 = d0;
    s.J01 = du;
    s.J10 = r * du;
    s.J11 = m1 + r * duu;
    return s;
}

Real residual_norm(const EndpointSystem& s) { return abs(s.F0) + abs(s.F1); }

// Newton on the endpoint conditions from (c, r); returns false on failure.
bool newton_endpoints(const Polynomial& p, const ArcsineNodes& nodes, Real& c, Real& r, const PrecisionContext& ctx) {
    const Polynomial dp = p.derivative();
    const Real tol = ctx.abs_tolerance();
    EndpointSystem s = endpoint_system(p, dp, nodes, c, r);
    Real res = residual_norm(s);
    for (int iter = 0; iter < 200; ++iter) {
        if (res <= tol) return true;
        Real det = s.J00 * s.J11 - s.J01 * s.J10;
        if (det == 0) return false;
        Real dc = -(s.J11 * s.F0 - s.J01 * s.F1) / det;
        Real dr = -(-s.J10 * s.F0 + s.J00 * s.F1) / det;
        Real lambda(1);
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            Real cn = c + lambda * dc, rn = r + lambda * dr;
            if (rn > 0) {
                EndpointSystem sn = endpoint_system(p, dp, nodes, cn, rn);
                Real rn_res = residual_norm(sn);
                if (rn_res < res || rn_res <= tol) {
                    c = cn;
                    r = rn;
                    s = sn;
                    res = rn_res;
                    accepted = true;
                    break;
                }
            }
            lambda /= 2;
        }
        if (!accepted) return res <= 1024 * tol;
    }
    return res <= tol;
}

// Global minimizer of a confining polynomial, from the real critical points.
Real global_minimizer(const Polynomial& V, const PrecisionContext& ctx) {
    Polynomial dV = V.derivative();
    Real bound(1);
    for (int k = 0; k < dV.degree(); ++k) bound = std::max(bound, Real(1 + abs(dV.coeff(k) / dV.leading())));
    const int samples = 4000;
    Real best_x = 0, best_v;
    bool have = false;
    Real h = 2 * bound / samples;
    Real xp = -bound, fp = dV(xp);
    for (int k = 1; k <= samples; ++k) {
        Real x = -bound + h * k;
        Real fx = dV(x);
        if (fp < 0 && fx >= 0) {
            Real root = fx == 0 ? x : find_root([&](const Real& s) { return dV(s); }, Interval(xp, x), ctx);
            Real v = V(root);
            if (!have || v < best_v) {
                best_x = root;
                best_v = v;
                have = true;
            }
        }
        xp = x;
        fp = fx;
    }
    if (!have) throw EquilibriumError("could not locate a minimizer of V");
    return best_x;
}

std::string full_precision(const Real& x) { return x.str(0, std::ios_base::scientific); }

}  // namespace

Potential::Potential(Polynomial p, std::string note) : poly(std::move(p)), provenance(std::move(note)) {}

void Potential::validate() const {
    int d = poly.degree();
    if (d < 2 || d % 2 != 0) throw EquilibriumError("potential must have even degree >= 2");
    if (!(poly.leading() > 0)) throw EquilibriumError("potential must have a positive leading coefficient");
}

void Potential::write(std::ostream& out) const {
    out << "# provenance: " << provenance << "\n";
    out << "# coefficients in ascending degree, one per line\n";
    for (const auto& c : poly.coeffs()) out << full_precision(c) << "\n";
}

Potential Potential::read(std::istream& in) {
    std::string line, note = "user-supplied";
    std::vector<Real> coeffs;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const std::string key = "# provenance:";
            if (line.compare(first, key.size(), key) == 0) {
                note = line.substr(first + key.size());
                note.erase(0, note.find_first_not_of(' '));
            }
            continue;
        }
        auto last = line.find_last_not_of(" \t\r");
        try {
            coeffs.emplace_back(line.substr(first, last - first + 1));
        } catch (const std::exception&) {
            throw EquilibriumError("potential file: cannot parse coefficient '" + line + "'");
        }
    }
    Potential V(Polynomial(std::move(coeffs)), note);
    V.validate();
    return V;
}

Potential Potential::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EquilibriumError("cannot open potential file " + path);
    try {
        return read(in);
    } catch (const EquilibriumError& e) {
        throw EquilibriumError(path + ": " + e.what());
    }
}

void Potential::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw EquilibriumError("cannot write potential file " + path);
    write(out);
}

Real OneCutMeasure::density(const Real& x) const {
    if (x <= a || x >= b) return Real(0);
    return hpoly(x) * sqrt((b - x) * (x - a)) / (2 * pi() * t);
}

Polynomial polynomial_part_with_root(const Polynomial& p, const Real& c, const Real& r, int power) {
    if (power != 1 && power != -1) throw std::invalid_argument("polynomial_part_with_root: power must be +-1");
    const Polynomial pw = p.shifted(c);
    const int deg = pw.degree();
    if (deg < 0) return Polynomial();
    // ((w^2 - r^2))^{power/2} = w^power sum_j s_j r^{2j} w^{-2j}
    const int jmax = deg + 1;
    std::vector<Real> s(jmax + 1);
    s[0] = 1;
    for (int j = 1; j <= jmax; ++j) {
        Real jj(j);
        s[j] = power == 1 ? s[j - 1] * Real(2 * j - 3) / (2 * jj) : s[j - 1] * Real(2 * j - 1) / (2 * jj);
    }
    const Real r2 = r * r;
    std::vector<Real> out(deg + 2, Real(0));
    for (int k = 0; k <= deg; ++k) {
        Real rp(1);
        for (int j = 0; j <= jmax; ++j) {
            int m = k + power - 2 * j;
            if (m < 0) break;
            out[m] += pw.coeff(k) * s[j] * rp;
            rp *= r2;
        }
    }
    return Polynomial(std::move(out)).shifted(-c);
}

OneCutMeasure solve_one_cut(const Potential& V, const Real& t, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    V.validate();
    if (!(t > 0)) throw EquilibriumError("solve_one_cut needs t > 0");
    const Polynomial dV = V.derivative();
    const ArcsineNodes nodes(static_cast<std::size_t>(dV.degree()) + 4);
    auto scaled = [&](const Real& tt) { return dV * (Real(1) / tt); };

    // Continuation in t from a narrow band around the global minimizer; a
    // direct Newton attempt from the small-t guess comes first.
    const Real x0 = global_minimizer(V.poly, ctx);
    Real r0(0.01);
    auto t_of_r = [&](const Real& r) {
        Real m(0);
        for (const auto& u : nodes.u) m += u * dV(x0 + r * u);
        return r * m / Real(long(nodes.u.size())) / 2;
    };
    Real t0 = t_of_r(r0);
    for (int k = 0; k < 20 && !(t0 > 0); ++k) {
        r0 *= 2;
        t0 = t_of_r(r0);
    }
    if (!(t0 > 0)) throw EquilibriumError("solve_one_cut: degenerate minimum of V");

    Real c = x0, r = r0;
    if (t <= t0) {
        r = r0 * sqrt(t / t0);
        if (!newton_endpoints(scaled(t), nodes, c, r, ctx))
            throw EquilibriumError("solve_one_cut: endpoint system did not converge");
    } else {
        if (!newton_endpoints(scaled(t0), nodes, c, r, ctx))
            throw EquilibriumError("solve_one_cut: endpoint system did not converge at the start of continuation");
        Real tk = t0;
        Real ratio(2);
        int steps = 0;
        while (tk < t) {
            if (++steps > 2000) throw EquilibriumError("solve_one_cut: continuation in t stalled");
            Real tn = tk * ratio;
            if (tn > t) tn = t;
            Real cn = c, rn = r * sqrt(tn / tk);
            if (newton_endpoints(scaled(tn), nodes, cn, rn, ctx)) {
                c = cn;
                r = rn;
                tk = tn;
                if (ratio < 4) ratio = ratio * ratio > 4 ? Real(4) : ratio * ratio;
            } else {
                ratio = sqrt(ratio);
                if (ratio < Real(1) + Real(1e-6)) throw EquilibriumError("solve_one_cut: endpoint system has no root along the continuation path");
            }
        }
    }

    OneCutMeasure m;
    m.t = t;
    m.a = c - r;
    m.b = c + r;
    m.hpoly = polynomial_part_with_root(dV, c, r, -1);

    // positivity of the density factor on the open support
    Real hmax(0);
    const int checks = 400;
    std::vector<Real> hv;
    for (int k = 0; k <= checks; ++k) {
        Real x = m.a + (m.b - m.a) * Real(k) / checks;
        hv.push_back(m.hpoly(x));
        hmax = std::max(hmax, Real(abs(hv.back())));
    }
    for (const auto& v : hv)
        if (v < -Real(1e-12) * hmax) throw EquilibriumError("not one-cut for this (V,t): density factor changes sign");

    const Real two_pi_t = 2 * pi() * t;
    const Polynomial g = m.hpoly * (Real(1) / two_pi_t);
    m.mu = BandMeasure::from_sqrt_factor([&](const Real& x) { return g(x); }, m.support(), ctx);
    m.l_t = 2 * m.mu.log_abs_potential(m.b) - V(m.b) / t;
    return m;
}

Real effective_potential(const OneCutMeasure& m, const Potential& V, const Real& x) {
    return 2 * m.log_potential(x) - V(x) / m.t - m.l_t;
}

Real effective_potential_derivative(const OneCutMeasure& m, const Real& x) {
    if (x > m.b) return -m.hpoly(x) * sqrt((x - m.a) * (x - m.b)) / m.t;
    if (x < m.a) return m.hpoly(x) * sqrt((x - m.a) * (x - m.b)) / m.t;
    return Real(0);
}

Real green_exterior(const Interval& iv, const Real& x) {
    Real xi = abs((x - iv.mid()) / iv.radius());
    if (xi <= 1) return Real(0);
    return log(xi + sqrt(xi * xi - 1));
}

Real arcsine_log_potential(const Real& x) { return green_exterior(Interval(Real(-2), Real(2)), x); }

Real phi(const Real& x) {
    if (!(x > 2)) throw std::domain_error("phi is defined for x > 2");
    return log((x + sqrt(x * x - 4)) / 2);
}

CriticalReport detect_critical_point(const OneCutMeasure& m, const Potential& V, const Interval& search,
                                     const PrecisionContext& ctx, const DetectOptions& opt) {
    PrecisionScope scope(ctx);
    const bool right = search.lo >= m.b;
    if (!right && !(search.hi <= m.a)) throw EquilibriumError("search interval must be disjoint from the support");
    const Real collar(opt.collar);
    Interval s = right ? Interval(std::max(search.lo, Real(m.b + collar)), search.hi)
                       : Interval(search.lo, std::min(search.hi, Real(m.a - collar)));
    if (!(s.lo < s.hi)) throw EquilibriumError("search interval lies inside the endpoint collar");

    auto E = [&](const Real& x) { return effective_potential(m, V, x); };
    int imax = 0;
    Real emax;
    std::vector<Real> xs;
    for (int k = 0; k <= opt.grid; ++k) {
        xs.push_back(s.lo + s.length() * Real(k) / opt.grid);
        Real e = E(xs.back());
        if (k == 0 || e > emax) {
            emax = e;
            imax = k;
        }
    }
    if (imax == 0 || imax == opt.grid) throw EquilibriumError("no critical point: maximizer on the search boundary");

    Real x_star = find_root([&](const Real& x) { return m.hpoly(x); }, Interval(xs[imax - 1], xs[imax + 1]), ctx);
    Real e_star = E(x_star);
    if (e_star < -Real(opt.critical_tol)) throw EquilibriumError("no critical point: effective potential strictly negative");
    if (e_star > Real(opt.critical_tol))
        throw EquilibriumError("effective potential positive off the support; not an equilibrium measure");

    // vanishing order from the symmetric average, which cancels the odd terms
    const int J = 8;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < J; ++j) {
        Real h = Real(0.1) / Real(1L << j);
        Real v = abs(E(x_star + h) + E(x_star - h)) / 2;
        double lx = std::log(to_double(h)), ly = to_double(log(v));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double slope = (J * sxy - sx * sy) / (J * sxx - sx * sx);
    double even = 2 * std::round(slope / 2);
    if (even < 2 || std::abs(slope - even) > 0.2) throw EquilibriumError("vanishing order ambiguous");
    const int nu = static_cast<int>(even) / 2;

    // for higher order, refine on the simple zero of the (2 nu - 2)-th derivative
    if (nu >= 2) {
        Polynomial d = m.hpoly;
        for (int k = 0; k < 2 * nu - 2; ++k) d = d.derivative();
        Interval br;
        Real w(0.02);
        if (scan_bracket([&](const Real& x) { return d(x); }, Interval(x_star - w, x_star + w), 64, br))
            x_star = find_root([&](const Real& x) { return d(x); }, br, ctx);
        e_star = E(x_star);
    }

    CriticalReport rep;
    rep.x_star = x_star;
    rep.nu = nu;
    rep.order_slope = slope;
    rep.t = m.t;
    rep.support = m.support();
    rep.hpoly = m.hpoly;
    Polynomial q = m.hpoly;
    for (int k = 0; k < 2 * nu - 1; ++k) q = q.divide_linear(x_star);
    rep.Q = q * (Real(1) / m.t);
    rep.Q_at_xstar = rep.Q(x_star);
    rep.phi_at_xstar = green_exterior(m.support(), x_star);
    rep.E_at_xstar = e_star;
    rep.c_star_per_n = -e_star / 2;

    // strictness margin on both sides of the support
    const Real width = std::max(Real(m.b - m.a), Real(2 * abs(x_star - (m.a + m.b) / 2)));
    Real margin;
    bool have = false;
    const int samples = 50;
    for (int side = 0; side < 2; ++side) {
        Real lo = side == 0 ? m.a - width : m.b + collar;
        Real hi = side == 0 ? m.a - collar : std::max(Real(m.b + width), Real(x_star + 1));
        for (int k = 0; k <= samples; ++k) {
            Real x = lo + (hi - lo) * Real(k) / samples;
            if (abs(x - x_star) < Real(opt.exclusion)) continue;
            Real v = -E(x);
            if (!have || v < margin) {
                margin = v;
                have = true;
            }
        }
    }
    rep.margin = margin;
    if (!(rep.Q_at_xstar > 0)) throw EquilibriumError("critical point has Q(x*) <= 0");
    return rep;
}

std::vector<BrRow> br_derivative_check(const Potential& V, const std::vector<Real>& t_list,
                                       const PrecisionContext& ctx, int samples) {
    PrecisionScope scope(ctx);
    const OneCutMeasure m1 = solve_one_cut(V, Real(1), ctx);
    const Real c = (m1.a + m1.b) / 2, r = (m1.b - m1.a) / 2;
    std::vector<BrRow> rows;
    for (const auto& t : t_list) {
        if (!(t < 1)) throw EquilibriumError("br_derivative_check: every t must satisfy t < 1");
        const OneCutMeasure mt = solve_one_cut(V, t, ctx);
        Real worst(0);
        for (int k = 0; k < samples; ++k) {
            Real x = c + r * Real(0.75) * (Real(2 * k + 1) / samples - 1);
            Real w = 1 / (pi() * sqrt((m1.b - x) * (x - m1.a)));
            Real res = abs((t * mt.density(x) - m1.density(x)) / (t - 1) - w);
            worst = std::max(worst, res);
        }
        rows.push_back({t, worst});
    }
    return rows;
}

Synthesis synthesize_birth_potential(const Real& x_star, int nu, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    if (!(x_star > 2)) throw EquilibriumError("synthesize_birth_potential needs x_star > 2");
    if (nu < 1) throw EquilibriumError("synthesize_birth_potential needs nu >= 1");
    const unsigned odd = static_cast<unsigned>(2 * nu - 1);
    const Polynomial base = Polynomial::linear_power(x_star, odd);
    const Interval band(Real(-2), Real(2));

    // (i) unit mass on [-2,2]; (ii) E(x*) = -int_2^{x*} h(s) sqrt(s^2-4) ds = 0
    Real A[2], B[2];
    const Real vmax = sqrt(x_star - 2);
    for (int j = 0; j < 2; ++j) {
        A[j] = integrate_weighted([&](const Real& s) { return pow(s, j) * base(s); }, band, RuleKind::sqrt_endpoints,
                                  ctx) /
               (2 * pi());
        // s = 2 + v^2 removes the square-root endpoint
        B[j] = integrate(
            [&](const Real& v) {
                Real s = 2 + v * v;
                return pow(s, j) * base(s) * v * sqrt(4 + v * v) * 2 * v;
            },
            Interval(Real(0), vmax), RuleKind::plain, ctx);
    }
    Real det = A[0] * B[1] - A[1] * B[0];
    if (det == 0) throw EquilibriumError("synthesis failed; widen Q degree");
    Synthesis out;
    out.q0 = B[1] / det;
    out.q1 = -B[0] / det;
    const Polynomial Q({out.q0, out.q1});
    const Polynomial h = Q * base;

    if (!(out.q1 > 0)) throw EquilibriumError("synthesis failed; widen Q degree (V' leading coefficient not positive)");
    for (int k = 1; k < 200; ++k) {
        Real x = Real(-2) + Real(4) * Real(k) / 200;
        if (!(h(x) > 0)) throw EquilibriumError("synthesis failed; widen Q degree (density changes sign)");
    }

    const Polynomial dV = polynomial_part_with_root(h, Real(0), Real(2), 1);
    std::ostringstream note;
    note << "synthesized birth-of-cut potential, x_star=" << full_precision(x_star) << ", nu=" << nu;
    out.V = Potential(dV.antiderivative(), note.str());
    out.V.validate();

    out.measure = solve_one_cut(out.V, Real(1), ctx);
    out.normalization_residual = abs(out.measure.mass() - 1);
    out.E_at_xstar = effective_potential(out.measure, out.V, x_star);

    const Real reach = std::max(Real(x_star + 2), Real(2 * x_star));
    try {
        out.report = detect_critical_point(out.measure, out.V, Interval(out.measure.b, reach), ctx);
    } catch (const EquilibriumError& e) {
        throw EquilibriumError(std::string("synthesis failed; widen Q degree (") + e.what() + ")");
    }
    if (out.report.nu != nu || abs(out.report.x_star - x_star) > Real(1e-6))
        throw EquilibriumError("synthesis failed; widen Q degree (critical point not reproduced)");
    if (!(out.report.margin > 0))
        throw EquilibriumError("synthesis failed; widen Q degree (second zero of E off the support)");
    return out;
}

QIdentity q_identity_check(const OneCutMeasure& m, const Potential& V, const Real& x, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    const Polynomial dV = V.derivative();
    const Real vx = dV(x);
    // (V'(y) - V'(x))/(y - x) is a polynomial in y
    const Polynomial dq = dV.divide_linear(x);
    const Polynomial weight = dq * m.hpoly * (Real(1) / (2 * pi() * m.t));
    Real integral = integrate_weighted([&](const Real& y) { return weight(y); }, m.support(),
                                       RuleKind::sqrt_endpoints, ctx);
    QIdentity q;
    Real half = vx / (2 * m.t);
    q.from_difference_quotient = half * half - integral / m.t;
    Real cauchy = -m.stieltjes(Complex(x, Real(0))).real();
    q.from_stieltjes = (cauchy + half) * (cauchy + half);
    q.residual = abs(q.from_difference_quotient - q.from_stieltjes);
    return q;
}

}  // namespace birthcut
