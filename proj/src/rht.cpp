#include "birthcut/rht.hpp"

#include "birthcut/orthopoly.hpp"

#include <cmath>
#include <ostream>

namespace birthcut {

namespace {

const Complex kI(Real(0), Real(1));

Complex cr(const Real& x) { return Complex(x, Real(0)); }

// log v from above (side +1) or below (side -1) for real v
Complex log_side(const Real& v, int side) {
    if (v > 0) return cr(log(v));
    return Complex(log(-v), side > 0 ? pi() : Real(-pi()));
}

Complex clenshaw_complex(const std::vector<Real>& c, const Complex& u) {
    if (c.empty()) return cr(Real(0));
    Complex b1 = cr(Real(0)), b2 = cr(Real(0));
    const Complex two = cr(Real(2));
    for (std::size_t k = c.size(); k-- > 1;) {
        Complex b0 = two * u * b1 - b2 + cr(c[k]);
        b2 = b1;
        b1 = b0;
    }
    return u * b1 - b2 + cr(c[0]);
}

Complex series_at(const ChebSeries& D, const Complex& z) {
    const Interval& iv = D.interval();
    return clenshaw_complex(D.coeffs(), (z - cr(iv.mid())) / cr(iv.radius()));
}

// sqrt(z-a) sqrt(z-b), cut on [a, b]
Complex band_root(const Complex& z, const Real& a, const Real& b) { return std::sqrt(z - cr(a)) * std::sqrt(z - cr(b)); }

Real golden_point(const Real& lo, const Real& hi, int k) {
    Real f = Real(k + 1) * (sqrt(Real(5)) - 1) / 2;
    f -= floor(f);
    return lo + (hi - lo) * f;
}

long nearest_count(const Real& u) {
    if (!(u > 0)) return 0;
    return floor(u + Real(0.5)).convert_to<long>();
}

Mat2 exp_s3(const Complex& a) { return Mat2::diag(std::exp(a), std::exp(-a)); }

}  // namespace

Mat2 Mat2::identity() { return diag(cr(Real(1)), cr(Real(1))); }

Mat2 Mat2::diag(const Complex& a, const Complex& d) { return of(a, cr(Real(0)), cr(Real(0)), d); }

Mat2 Mat2::of(const Complex& a, const Complex& b, const Complex& c, const Complex& d) {
    Mat2 r;
    r.m[0][0] = a;
    r.m[0][1] = b;
    r.m[1][0] = c;
    r.m[1][1] = d;
    return r;
}

Complex Mat2::det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

Mat2 Mat2::operator*(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
    return r;
}

Mat2 Mat2::operator-(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
}

Real Mat2::max_abs() const {
    Real best(0);
    for (const auto& row : m)
        for (const auto& x : row) best = std::max(best, Real(abs(x)));
    return best;
}

// ---------------------------------------------------------------- g-function

Complex GFunction::operator()(const Complex& z) const {
    Complex g = band.log_potential(z);
    if (n > 0 && u_t != 0) g += cr(u_t / Real(n)) * std::log(z - cr(x_star));
    return g;
}

Complex GFunction::boundary(const Real& x, int side) const {
    Complex g = band.log_potential_boundary(x, side);
    if (n > 0 && u_t != 0) {
        if (x == x_star) throw RhtError("g has a logarithmic singularity at x*");
        g += cr(u_t / Real(n)) * log_side(x - x_star, side);
    }
    return g;
}

Real GFunction::boundary_sum(const Real& x) const {
    Real s = 2 * band.log_abs_potential(x);
    if (n > 0 && u_t != 0) s += 2 * u_t / Real(n) * log(abs(x - x_star));
    return s;
}

Real GFunction::D_n(const Real& x) const { return Real(n) / 2 * (boundary_sum(x) - V(x) / t - l_tilde / t); }

Real GFunction::total_mass() const {
    Real m = band.mass();
    if (n > 0) m += u_t / Real(n);
    return m;
}

GFunction make_gfunction(const AnsatzParams& p, const OneCutMeasure& critical, const Potential& V,
                         const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    if (p.n <= 0) throw RhtError("supercritical g-function needs n > 0");
    GFunction g;
    g.regime = Regime::supercritical;
    g.t = p.t;
    g.alpha = p.alpha_t;
    g.beta = p.beta_t;
    g.x_star = p.report.x_star;
    g.n = p.n;
    g.u_t = p.u_t;
    g.ubar = nearest_count(p.u_t);
    g.iota_t = p.iota_t;
    g.scale = p.scale;
    // the Robin constant of [-2, 2] vanishes, so l~ = l at t = 1
    g.l_tilde = critical.l_t;
    g.V = V;
    const Interval iv(p.alpha_t, p.beta_t);
    const Real w = p.beta_t - p.alpha_t;
    const BandMeasure unit = BandMeasure::from_sqrt_factor([&](const Real&) { return 8 / (pi() * w * w); }, iv, ctx);
    std::vector<Real> F = p.main_band.unit_coeffs();
    const auto& U = unit.unit_coeffs();
    if (F.size() < U.size()) F.resize(U.size(), Real(0));
    for (std::size_t k = 0; k < U.size(); ++k) F[k] += p.iota_t * p.scale * U[k];
    g.band = BandMeasure::from_unit_coeffs(iv, std::move(F));
    return g;
}

GFunction make_gfunction(const OneCutMeasure& m, const Potential& V, long n, const Real& x_star) {
    if (m.t > 1) throw RhtError("the equilibrium g-function is the t <= 1 branch");
    GFunction g;
    g.regime = Regime::subcritical;
    g.t = m.t;
    g.alpha = m.a;
    g.beta = m.b;
    g.x_star = x_star;
    g.n = n;
    g.u_t = Real(0);
    g.ubar = 0;
    g.iota_t = Real(0);
    g.scale = Real(0);
    g.l_tilde = m.t * m.l_t;
    g.V = V;
    g.band = m.mu;
    return g;
}

std::vector<GineqRow> gineq_residuals(const GFunction& gf, const std::vector<Real>& grid) {
    std::vector<GineqRow> rows;
    for (const auto& x : grid) {
        GineqRow r;
        r.x = x;
        r.on_band = x > gf.alpha && x < gf.beta;
        r.raw = gf.boundary_sum(x) - gf.V(x) / gf.t - gf.l_tilde / gf.t;
        r.normalized = (r.on_band && gf.scale > 0) ? Real(r.raw / -gf.scale) : r.raw;
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------- F

namespace {
Real R_star(const Real& alpha, const Real& beta, const Real& x_star) {
    if (!(x_star > beta)) throw RhtError("F needs x* to the right of the band");
    return sqrt((x_star - alpha) / (x_star - beta));
}
}  // namespace

Complex F_map(const Complex& z, const Real& alpha, const Real& beta, const Real& x_star) {
    const Real R = R_star(alpha, beta, x_star);
    if (z == cr(x_star)) throw RhtError("F is logarithmically singular at x*");
    const Complex S = band_root(z, alpha, beta) / (z - cr(beta));
    return std::log((cr(R) - S) / (cr(R) + S));
}

Complex F_map_boundary(const Real& x, int side, const Real& alpha, const Real& beta, const Real& x_star) {
    const Real R = R_star(alpha, beta, x_star);
    if (x == alpha || x == beta || x == x_star) throw RhtError("F boundary value requested at a special point");
    if (x > alpha && x < beta) {
        // S_+- = -+ i sqrt((x - alpha)/(beta - x))
        const Complex S(Real(0), side > 0 ? Real(-sqrt((x - alpha) / (beta - x))) : sqrt((x - alpha) / (beta - x)));
        return std::log((cr(R) - S) / (cr(R) + S));
    }
    const Real S = x > beta ? sqrt((x - alpha) / (x - beta)) : sqrt((alpha - x) / (beta - x));
    return log_side((R - S) / (R + S), side);
}

Real F0(const Real& alpha, const Real& beta, const Real& x_star) {
    const Real R = R_star(alpha, beta, x_star);
    return log((R - 1) / (R + 1));
}

// ---------------------------------------------------------------- K

namespace {

// int_alpha^beta h(s) ds / sqrt((s - alpha)(beta - s)) with node doubling
Complex first_kind_integral(const std::function<Complex(const Real&)>& h, const Interval& iv,
                            const PrecisionContext& ctx) {
    auto eval = [&](std::size_t m) {
        QuadratureRule rule = make_weighted_rule(RuleKind::chebyshev_first_kind, iv, m);
        Complex s = cr(Real(0));
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += cr(rule.weights[k]) * h(rule.nodes[k]);
        return s;
    };
    std::size_t m = 32;
    Complex prev = eval(m);
    while (m < (std::size_t(1) << 16)) {
        m *= 2;
        Complex cur = eval(m);
        Real tol = std::max(ctx.abs_tolerance(), Real(ctx.rel_tolerance() * abs(cur)));
        if (abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    throw RhtError("Cauchy integral for K did not converge");
}

}  // namespace

Complex szego_K(const Complex& z, const ChebSeries& D, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    const Interval& iv = D.interval();
    const Complex R = band_root(z, iv.lo, iv.hi);
    const Real dist_re = z.real() < iv.lo ? Real(iv.lo - z.real()) : z.real() > iv.hi ? Real(z.real() - iv.hi) : Real(0);
    const Real dist = sqrt(dist_re * dist_re + z.imag() * z.imag());
    if (dist > iv.radius()) {
        // far from the band: direct Cauchy integral
        Complex I = first_kind_integral([&](const Real& s) { return cr(D(s)) / (cr(s) - z); }, iv, ctx);
        return -R / cr(pi()) * I;
    }
    // near the band: subtract D(z), whose Cauchy integral is -pi D(z) / R(z)
    const Complex Dz = series_at(D, z);
    Complex I = first_kind_integral([&](const Real& s) { return (cr(D(s)) - Dz) / (cr(s) - z); }, iv, ctx);
    return Dz - R / cr(pi()) * I;
}

Complex szego_K_boundary(const Real& x, int side, const ChebSeries& D, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    const Interval& iv = D.interval();
    if (!(x > iv.lo && x < iv.hi)) return szego_K(cr(x), D, ctx);
    // K_+- = D(x) -+ (i r(x)/pi) PV int D(s) / (r(s)(s - x)) ds, r = sqrt((s - alpha)(beta - s))
    Real pv = integrate_pv([&](const Real& s) { return D(s) / sqrt((s - iv.lo) * (iv.hi - s)); }, x, iv, ctx,
                           RuleKind::chebyshev_first_kind);
    const Real r = sqrt((x - iv.lo) * (iv.hi - x));
    Complex corr = kI * cr(r / pi() * pv);
    return cr(D(x)) + (side > 0 ? -corr : corr);
}

Complex szego_K_series(const Complex& z, const ChebSeries& D) {
    const Interval& iv = D.interval();
    const Complex xi = (z - cr(iv.mid())) / cr(iv.radius());
    const Complex w = cr(Real(1)) / joukowski_inverse(xi);
    Complex acc = cr(Real(0));
    const auto& d = D.coeffs();
    for (std::size_t k = d.size(); k-- > 0;) acc = acc * w + cr(d[k]);
    return acc;
}

Real szego_K0(const ChebSeries& D, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    return integrate_weighted([&](const Real& s) { return D(s); }, D.interval(), RuleKind::chebyshev_first_kind,
                              ctx) /
           pi();
}

// ---------------------------------------------------------------- Pi and S

namespace {
Mat2 pi_from_gamma(const Complex& g) {
    const Complex gi = cr(Real(1)) / g;
    const Complex A = (g + gi) / cr(Real(2));
    const Complex B = (g - gi) / (cr(Real(2)) * kI);
    return Mat2::of(A, B, -B, A);
}
}  // namespace

Mat2 pi_matrix(const Complex& z, const Real& alpha, const Real& beta) {
    if (z.imag() == 0 && z.real() >= alpha && z.real() <= beta)
        throw RhtError("Pi on its cut needs a side; use pi_matrix_boundary");
    const Complex quarter = cr(Real(0.25));
    return pi_from_gamma(std::exp(quarter * (std::log(z - cr(beta)) - std::log(z - cr(alpha)))));
}

Mat2 pi_matrix_boundary(const Real& x, int side, const Real& alpha, const Real& beta) {
    if (x == alpha || x == beta) throw RhtError("Pi is singular at the band ends");
    const Complex quarter = cr(Real(0.25));
    return pi_from_gamma(std::exp(quarter * (log_side(x - beta, side) - log_side(x - alpha, side))));
}

namespace {
Mat2 assemble_S(const ParametrixFrame& fr, const Mat2& P, const Complex& K, const Complex& F) {
    const Complex du = cr(fr.u_t - Real(fr.ubar));
    return exp_s3(cr(fr.K0) + du * cr(fr.F0)) * P * exp_s3(-(K + du * F));
}

bool has_point_charge(const ParametrixFrame& fr) { return fr.regime == Regime::supercritical; }
}  // namespace

Mat2 global_parametrix(const Complex& z, const ParametrixFrame& fr, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    if (z.imag() == 0 && z.real() >= fr.alpha && z.real() <= fr.x_star)
        throw RhtError("S on the real cut needs a side; use global_parametrix_boundary");
    const Mat2 P = pi_matrix(z, fr.alpha, fr.beta);
    if (!has_point_charge(fr)) return P;
    return assemble_S(fr, P, szego_K(z, fr.D, ctx), F_map(z, fr.alpha, fr.beta, fr.x_star));
}

Mat2 global_parametrix_boundary(const Real& x, int side, const ParametrixFrame& fr, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    const Mat2 P = pi_matrix_boundary(x, side, fr.alpha, fr.beta);
    if (!has_point_charge(fr)) return P;
    return assemble_S(fr, P, szego_K_boundary(x, side, fr.D, ctx),
                      F_map_boundary(x, side, fr.alpha, fr.beta, fr.x_star));
}

// ---------------------------------------------------------------- zeta

Real zeta_disk_radius(const CriticalReport& critical) { return (critical.x_star - critical.support.hi) / 2; }

Real varphi_at_xstar(const CriticalReport& c) {
    const Real root = sqrt((c.x_star - c.support.lo) * (c.x_star - c.support.hi));
    return pow(c.Q_at_xstar * root / (2 * c.nu), Real(1) / (2 * c.nu));
}

Complex varphi(const Complex& z, const CriticalReport& c, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    const Complex w = z - cr(c.x_star);
    if (abs(w) > zeta_disk_radius(c)) throw RhtError("radius too large for the conformal map; shrink delta");
    if (w == cr(Real(0))) return cr(varphi_at_xstar(c));
    const int p = 2 * c.nu - 1;
    Complex I = integrate_complex(
        [&](const Real& v) {
            const Complex s = cr(c.x_star) + w * cr(v);
            return c.Q(s) * cr(pow(v, p)) * band_root(s, c.support.lo, c.support.hi);
        },
        Interval(Real(0), Real(1)), ctx);
    if (!(I.real() > 0)) throw RhtError("conformal map degenerates in this disk; shrink delta");
    return std::exp(std::log(I) / cr(Real(2 * c.nu)));
}

Complex conformal_zeta(const Complex& z, const CriticalReport& c, long n, const PrecisionContext& ctx) {
    const Real scale = pow(Real(n), Real(1) / (2 * c.nu));
    return cr(scale) * (z - cr(c.x_star)) * varphi(z, c, ctx);
}

// ---------------------------------------------------------------- tau, Z

Complex TauZ::tau_direct(const Complex& z) const {
    PrecisionScope scope(ctx);
    const Real n(gf.n);
    const Complex zeta = conformal_zeta(z, critical, gf.n, ctx);
    const Complex g1 = gf.band.log_potential(z);
    Complex num = cr(n) * (cr(Real(2)) * g1 - gf.V.poly(z) / cr(gf.t) - cr(gf.l_tilde / gf.t)) - cr(2 * Z_t) +
                  std::pow(zeta, 2 * critical.nu);
    if (gf.u_t != 0) {
        const Complex lv = std::log(varphi(z, critical, ctx));
        num -= cr(2 * gf.u_t) * (cr(log(n) / (2 * critical.nu)) + lv);
    }
    return num / zeta;
}

Complex TauZ::tau(const Complex& z) const {
    PrecisionScope scope(ctx);
    const Real R = zeta_disk_radius(critical) / 4;
    const Complex w = z - cr(critical.x_star);
    if (abs(w) >= R / 2) return tau_direct(z);
    // removable singularity at x*: Cauchy integral over |w| = R
    const int M = 64;
    Complex acc = cr(Real(0));
    for (int j = 0; j < M; ++j) {
        const Real th = 2 * pi() * Real(j) / M;
        const Complex e = cr(R) * Complex(cos(th), sin(th));
        acc += tau_direct(cr(critical.x_star) + e) * e / (e - w);
    }
    return acc / cr(Real(M));
}

Complex TauZ::identity_residual(const Complex& z) const {
    PrecisionScope scope(ctx);
    const Real n(gf.n);
    const Complex zeta = conformal_zeta(z, critical, gf.n, ctx);
    const Complex lhs = cr(n) * (gf(z) - gf.V.poly(z) / cr(2 * gf.t) - cr(gf.l_tilde / (2 * gf.t)));
    Complex rhs = -std::pow(zeta, 2 * critical.nu) / cr(Real(2)) + tau(z) * zeta / cr(Real(2)) + cr(Z_t);
    if (gf.u_t != 0) rhs += cr(gf.u_t) * std::log(zeta);
    return lhs - rhs;
}

TauZ tau_Z(const GFunction& gf, const CriticalReport& critical, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    if ((gf.regime == Regime::supercritical) != (gf.t > 1)) throw RhtError("regime inconsistent with t");
    TauZ tz;
    tz.regime = gf.regime;
    tz.gf = gf;
    tz.critical = critical;
    tz.ctx = ctx;
    const Real& xs = critical.x_star;
    const Real n(gf.n);
    Real Z = n * (gf.band.log_abs_potential(xs) - gf.V(xs) / (2 * gf.t) - gf.l_tilde / (2 * gf.t));
    if (gf.u_t != 0) Z -= gf.u_t * (log(varphi_at_xstar(critical)) + log(n) / (2 * critical.nu));
    tz.Z_t = Z;
    return tz;
}

ParametrixFrame make_frame(const GFunction& gf, const CriticalReport& critical, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    ParametrixFrame fr;
    fr.regime = gf.regime;
    fr.alpha = gf.alpha;
    fr.beta = gf.beta;
    fr.x_star = gf.x_star;
    fr.nu = critical.nu;
    fr.n = gf.n;
    fr.u_t = gf.u_t;
    fr.ubar = gf.ubar;
    const Interval iv(gf.alpha, gf.beta);
    if (gf.regime == Regime::supercritical)
        fr.D = ChebSeries::fit([&](const Real& x) { return gf.D_n(x); }, iv, ctx);
    else
        fr.D = ChebSeries(iv, {Real(0)});
    fr.K0 = szego_K0(fr.D, ctx);
    fr.F0 = F0(gf.alpha, gf.beta, gf.x_star);
    fr.varphi_at_xstar = varphi_at_xstar(critical);
    fr.Z_t = tau_Z(gf, critical, ctx).Z_t;
    return fr;
}

// ---------------------------------------------------------------- Cauchy parametrix

namespace {
struct ModelWeight {
    int nu;
    Complex tau;
    Complex operator()(const Complex& s) const { return std::exp(-std::pow(s, 2 * nu) + tau * s); }
};

Interval model_interval(int nu, const Complex& tau, const PrecisionContext& ctx) {
    const Real drop = Real(ctx.digits10() + 10) * log(Real(10));
    const Real t = abs(tau);
    // peak of |tau| s - s^{2 nu} over s >= 0
    Real peak(0);
    for (int k = 0; k <= 400; ++k) {
        Real s = Real(k) / 100;
        peak = std::max(peak, Real(t * s - pow(s, 2 * nu)));
    }
    Real R(1);
    while (pow(R, 2 * nu) - t * R < drop + peak) R += Real(0.25);
    return Interval(-R, R);
}
}  // namespace

Mat2 cauchy_parametrix(const Complex& zeta, const Complex& tau, int nu, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    ModelWeight f{nu, tau};
    const Interval iv = model_interval(nu, tau, ctx);
    Complex C;
    try {
        C = cauchy_transform(f, iv, zeta, ctx) / Complex(Real(0), 2 * pi());
    } catch (const TooCloseToAxis& e) {
        throw RhtError(e.what());
    }
    return Mat2::of(cr(Real(1)), C, cr(Real(0)), cr(Real(1)));
}

Mat2 cauchy_parametrix_boundary(const Real& x, int side, const Complex& tau, int nu, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    ModelWeight f{nu, tau};
    const Interval iv = model_interval(nu, tau, ctx);
    auto df = [&](const Real& s) {
        const Complex sc = cr(s);
        return (cr(Real(-2 * nu)) * std::pow(sc, 2 * nu - 1) + tau) * f(sc);
    };
    Complex C = cauchy_boundary(f, df, iv, x, side, ctx);
    return Mat2::of(cr(Real(1)), C, cr(Real(0)), cr(Real(1)));
}

// ---------------------------------------------------------------- residual harness

std::vector<Complex> boundary_limit(const std::function<std::vector<Complex>(const Complex&)>& f, const Real& x,
                                    int side, const std::vector<Real>& eps) {
    std::vector<std::vector<Complex>> samples;
    for (const auto& e : eps) samples.push_back(f(Complex(x, side > 0 ? e : Real(-e))));
    std::vector<Complex> out;
    for (std::size_t c = 0; c < samples.front().size(); ++c) {
        std::vector<Complex> v;
        for (const auto& s : samples) v.push_back(s[c]);
        out.push_back(richardson_limit(eps, v));
    }
    return out;
}

namespace {

std::vector<Complex> flat(const Mat2& m) { return {m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1]}; }
Mat2 unflat(const std::vector<Complex>& v) { return Mat2::of(v[0], v[1], v[2], v[3]); }

Real relative_gap(const Mat2& a, const Mat2& b) {
    return (a - b).max_abs() / std::max(Real(1), b.max_abs());
}

}  // namespace

std::vector<JumpResidual> jump_suite(const GFunction& gf, const ParametrixFrame& fr, const PrecisionContext& ctx,
                                     const JumpSuiteOptions& opt) {
    PrecisionScope scope(ctx);
    std::vector<Real> eps;
    for (double e : opt.eps) eps.emplace_back(e);
    std::vector<JumpResidual> rows;
    auto add = [&](const std::string& obj, const std::string& piece, const Real& x, const Real& r) {
        rows.push_back({obj, piece, x, eps, r});
    };
    const int m = opt.points_per_piece;
    const Real& a = fr.alpha;
    const Real& b = fr.beta;
    const Real& xs = fr.x_star;
    const Real collar(0.1);
    struct Piece {
        std::string name;
        Real lo, hi;
    };
    const Piece left{"(-inf,alpha)", a - 2, a - collar};
    const Piece band{"(alpha,beta)", a + collar, b - collar};
    const Piece gap{"(beta,x*)", b + collar, xs - collar};
    const Piece right{"(x*,inf)", xs + collar, xs + 2};
    const bool super = fr.regime == Regime::supercritical;
    const Complex two_pi_i = Complex(Real(0), 2 * pi());
    const Real un = gf.n > 0 ? Real(gf.u_t / Real(gf.n)) : Real(0);

    auto g_vec = [&](const Complex& z) { return std::vector<Complex>{gf(z)}; };
    auto g_jump = [&](const Real& x) {
        Complex up = boundary_limit(g_vec, x, +1, eps)[0];
        Complex dn = boundary_limit(g_vec, x, -1, eps)[0];
        return up - dn;
    };
    for (int k = 0; k < m; ++k) {
        Real x = golden_point(left.lo, left.hi, k);
        add("g", left.name, x, abs(g_jump(x) - two_pi_i));
    }
    for (int k = 0; k < m; ++k) {
        Real x = golden_point(band.lo, band.hi, k);
        // mass of the band to the right of x, plus the point charge
        Real v_hi = sqrt(b - x);
        Real right_mass = integrate([&](const Real& v) { return gf.band.density(b - v * v) * 2 * v; },
                                    Interval(Real(0), v_hi), RuleKind::plain, ctx);
        add("g", band.name, x, abs(g_jump(x) - two_pi_i * cr(right_mass + un)));
    }
    if (super)
        for (int k = 0; k < m; ++k) {
            Real x = golden_point(gap.lo, gap.hi, k);
            add("g", gap.name, x, abs(g_jump(x) - two_pi_i * cr(un)));
        }

    if (super) {
        auto F_vec = [&](const Complex& z) { return std::vector<Complex>{F_map(z, a, b, xs)}; };
        auto F_side = [&](const Real& x, int side) { return boundary_limit(F_vec, x, side, eps)[0]; };
        for (int k = 0; k < m; ++k) {
            Real x = golden_point(band.lo, band.hi, k);
            add("F", band.name, x, abs(F_side(x, +1) + F_side(x, -1)));
            x = golden_point(gap.lo, gap.hi, k);
            add("F", gap.name, x, abs(F_side(x, +1) - F_side(x, -1) - two_pi_i));
            x = golden_point(left.lo, left.hi, k);
            add("F", left.name, x, abs(F_side(x, +1) - F_side(x, -1)));
            x = golden_point(right.lo, right.hi, k);
            add("F", right.name, x, abs(F_side(x, +1) - F_side(x, -1)));
        }

        auto K_vec = [&](const Complex& z) { return std::vector<Complex>{szego_K(z, fr.D, ctx)}; };
        for (int k = 0; k < m; ++k) {
            Real x = golden_point(band.lo, band.hi, k);
            Complex up = boundary_limit(K_vec, x, +1, eps)[0];
            Complex dn = boundary_limit(K_vec, x, -1, eps)[0];
            add("K", band.name, x, abs(up + dn - cr(2 * fr.D(x))));
            add("K", "(alpha,beta) principal value", x, abs(up - szego_K_boundary(x, +1, fr.D, ctx)));
        }
    }

    auto P_vec = [&](const Complex& z) { return flat(pi_matrix(z, a, b)); };
    const Mat2 Jpi = Mat2::of(cr(Real(0)), cr(Real(1)), cr(Real(-1)), cr(Real(0)));
    for (int k = 0; k < m; ++k) {
        Real x = golden_point(band.lo, band.hi, k);
        Mat2 up = unflat(boundary_limit(P_vec, x, +1, eps));
        Mat2 dn = unflat(boundary_limit(P_vec, x, -1, eps));
        add("Pi", band.name, x, relative_gap(up, dn * Jpi));
        Complex z(golden_point(a - 1, xs + 1, k), Real(0.3) * Real(k + 1));
        add("Pi", "det", z.real(), abs(pi_matrix(z, a, b).det() - cr(Real(1))));
    }

    auto S_vec = [&](const Complex& z) { return flat(global_parametrix(z, fr, ctx)); };
    for (int k = 0; k < m; ++k) {
        Real x = golden_point(band.lo, band.hi, k);
        Mat2 up = unflat(boundary_limit(S_vec, x, +1, eps));
        Mat2 dn = unflat(boundary_limit(S_vec, x, -1, eps));
        const Real D = fr.D(x);
        const Mat2 J = Mat2::of(cr(Real(0)), cr(exp(2 * D)), cr(Real(-exp(-2 * D))), cr(Real(0)));
        add("S", band.name, x, relative_gap(up, dn * J));
        if (super) {
            x = golden_point(gap.lo, gap.hi, k);
            up = unflat(boundary_limit(S_vec, x, +1, eps));
            dn = unflat(boundary_limit(S_vec, x, -1, eps));
            const Complex e = std::exp(-two_pi_i * cr(fr.u_t));
            add("S", gap.name, x, relative_gap(up, dn * Mat2::diag(e, cr(Real(1)) / e)));
        }
    }

    const Complex tau(Real(0.5), Real(0));
    auto Psi_vec = [&](const Complex& z) { return flat(cauchy_parametrix(z, tau, fr.nu, ctx)); };
    ModelWeight w{fr.nu, tau};
    for (int k = 0; k < m; ++k) {
        Real x = golden_point(Real(-2), Real(2), k);
        Mat2 up = unflat(boundary_limit(Psi_vec, x, +1, eps));
        Mat2 dn = unflat(boundary_limit(Psi_vec, x, -1, eps));
        const Mat2 J = Mat2::of(cr(Real(1)), w(cr(x)), cr(Real(0)), cr(Real(1)));
        add("Psi", "real line", x, relative_gap(up, dn * J));
    }
    return rows;
}

void write_csv(const std::vector<JumpResidual>& rows, std::ostream& out) {
    out << "object,piece,point,residual\n";
    for (const auto& r : rows)
        out << r.object << "," << '"' << r.piece << '"' << "," << format_real(r.point, 17) << ","
            << format_real(r.residual, 6) << "\n";
}

}  // namespace birthcut
