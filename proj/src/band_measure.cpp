#include "birthcut/band_measure.hpp"

#include <algorithm>

namespace birthcut {

namespace {

Real to_unit(const Interval& iv, const Real& x) { return (x - iv.mid()) / iv.radius(); }

// Clenshaw for sum c_k T_k(u)
Real clenshaw(const std::vector<Real>& c, const Real& u) {
    if (c.empty()) return Real(0);
    Real b1(0), b2(0);
    for (std::size_t k = c.size(); k-- > 1;) {
        Real b0 = 2 * u * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return u * b1 - b2 + c[0];
}

// sum_{k>=1} c_k U_{k-1}(u)
Real sum_second_kind_shifted(const std::vector<Real>& c, const Real& u) {
    if (c.size() < 2) return Real(0);
    Real b1(0), b2(0);
    for (std::size_t k = c.size(); k-- > 1;) {
        Real b0 = 2 * u * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    // b1 now holds sum c_k U_{k-1}
    return b1;
}

std::vector<Real> multiply_by_one_minus_u2(const std::vector<Real>& g) {
    // (1 - u^2) T_k = T_k/2 - T_{k+2}/4 - T_{|k-2|}/4, with T_0 counted once
    std::vector<Real> out(g.size() + 2, Real(0));
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Real& a = g[k];
        if (k == 0) {
            out[0] += a / 2;
            out[2] -= a / 2;
            continue;
        }
        out[k] += a / 2;
        out[k + 2] -= a / 4;
        std::size_t lo = k >= 2 ? k - 2 : 2 - k;
        out[lo] -= a / 4;
    }
    return out;
}

void chop_tail(std::vector<Real>& c, const Real& floor) {
    while (c.size() > 1 && abs(c.back()) <= floor) c.pop_back();
}

}  // namespace

ChebSeries ChebSeries::interpolate(const RealFn& f, const Interval& iv, std::size_t n) {
    if (n < 1) throw NumericsError("ChebSeries::interpolate needs n >= 1");
    const Real p = pi();
    const Real nn(static_cast<long>(n));
    std::vector<Real> fx(n);
    for (std::size_t j = 0; j < n; ++j) {
        Real th = p * (Real(static_cast<long>(j)) + Real(0.5)) / nn;
        fx[j] = f(iv.mid() + iv.radius() * cos(th));
    }
    // cos(k*theta_j) = cos(pi*k*(2j+1)/(2n)); tabulate cos(pi*m/(2n)) for m mod 4n
    std::vector<Real> table(4 * n);
    for (std::size_t m = 0; m < 4 * n; ++m) table[m] = cos(p * Real(static_cast<long>(m)) / (2 * nn));
    std::vector<Real> c(n, Real(0));
    for (std::size_t k = 0; k < n; ++k) {
        Real s(0);
        for (std::size_t j = 0; j < n; ++j) s += fx[j] * table[(k * (2 * j + 1)) % (4 * n)];
        c[k] = 2 * s / nn;
    }
    c[0] /= 2;
    return ChebSeries(iv, std::move(c));
}

ChebSeries ChebSeries::fit(const RealFn& f, const Interval& iv, const PrecisionContext& ctx, std::size_t max_points) {
    PrecisionScope scope(ctx);
    const Real tol = ctx.rel_tolerance();
    for (std::size_t n = 16; n <= max_points; n *= 2) {
        ChebSeries s = interpolate(f, iv, n);
        Real scale(0);
        for (const auto& x : s.c_) scale = std::max(scale, Real(abs(x)));
        if (scale == 0) return ChebSeries(iv, {Real(0)});
        Real tail(0);
        for (std::size_t k = n - n / 8; k < n; ++k) tail = std::max(tail, Real(abs(s.c_[k])));
        if (tail <= tol * scale) {
            chop_tail(s.c_, tol * scale / 16);
            return s;
        }
    }
    throw NumericsError("ChebSeries::fit: coefficients did not decay within point cap");
}

Real ChebSeries::operator()(const Real& x) const { return clenshaw(c_, to_unit(iv_, x)); }
Real ChebSeries::at_unit(const Real& u) const { return clenshaw(c_, u); }

Complex joukowski_inverse(const Complex& xi) {
    const Complex one(Real(1), Real(0));
    return xi + std::sqrt(xi - one) * std::sqrt(xi + one);
}

BandMeasure BandMeasure::from_unit_coeffs(const Interval& iv, std::vector<Real> F) {
    BandMeasure m;
    m.iv_ = iv;
    m.F_ = std::move(F);
    return m;
}

BandMeasure BandMeasure::from_sqrt_factor(const RealFn& g, const Interval& iv, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    ChebSeries gs = ChebSeries::fit(g, iv, ctx);
    std::vector<Real> F = multiply_by_one_minus_u2(gs.coeffs());
    const Real r2 = iv.radius() * iv.radius();
    for (auto& x : F) x *= r2;
    return from_unit_coeffs(iv, std::move(F));
}

BandMeasure BandMeasure::from_arcsine_factor(const RealFn& g, const Interval& iv, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    ChebSeries gs = ChebSeries::fit(g, iv, ctx);
    return from_unit_coeffs(iv, gs.coeffs());
}

Real BandMeasure::mass() const { return F_.empty() ? Real(0) : pi() * F_[0]; }

Real BandMeasure::density(const Real& x) const {
    if (x <= iv_.lo || x >= iv_.hi) return Real(0);
    Real u = to_unit(iv_, x);
    // dmu = F(u) du / sqrt(1-u^2), du = ds / r
    return clenshaw(F_, u) / (sqrt(1 - u * u) * iv_.radius());
}

Complex BandMeasure::log_potential(const Complex& z) const {
    const Real r = iv_.radius();
    const Complex xi = (z - Complex(iv_.mid(), Real(0))) / Complex(r, Real(0));
    const Complex phi = joukowski_inverse(xi);
    const Complex w = Complex(Real(1), Real(0)) / phi;
    // sum_{k>=1} F_k w^k / k by Horner in w
    Complex acc(Real(0), Real(0));
    for (std::size_t k = F_.size(); k-- > 1;) acc = (acc + Complex(F_[k] / Real(static_cast<long>(k)), Real(0))) * w;
    const Complex f0(F_.empty() ? Real(0) : F_[0], Real(0));
    Complex res = f0 * std::log(phi / Complex(Real(2), Real(0))) - acc;
    return Complex(pi(), Real(0)) * res + Complex(mass() * log(r), Real(0));
}

Complex BandMeasure::log_potential_boundary(const Real& x, int side) const {
    const Real r = iv_.radius();
    Real xi = to_unit(iv_, x);
    if (xi <= -1 || xi >= 1) {
        Complex val = log_potential(Complex(x, Real(0)));
        // left of the band every log(x - s) sits on its cut
        if (xi <= -1) val = Complex(val.real(), side > 0 ? pi() * mass() : -pi() * mass());
        return val;
    }
    // Phi_+ = xi + i sqrt(1 - xi^2) on the upper side
    Real s = sqrt(1 - xi * xi);
    Complex phi(xi, side > 0 ? s : Real(-s));
    Complex w = Complex(Real(1), Real(0)) / phi;
    Complex acc(Real(0), Real(0));
    for (std::size_t k = F_.size(); k-- > 1;) acc = (acc + Complex(F_[k] / Real(static_cast<long>(k)), Real(0))) * w;
    const Complex f0(F_.empty() ? Real(0) : F_[0], Real(0));
    Complex res = f0 * std::log(phi / Complex(Real(2), Real(0))) - acc;
    return Complex(pi(), Real(0)) * res + Complex(mass() * log(r), Real(0));
}

Real BandMeasure::log_abs_potential(const Real& x) const {
    const Real r = iv_.radius();
    Real xi = to_unit(iv_, x);
    if (xi > -1 && xi < 1) {
        std::vector<Real> d(F_.size(), Real(0));
        for (std::size_t k = 1; k < F_.size(); ++k) d[k] = F_[k] / Real(static_cast<long>(k));
        const Real f0 = F_.empty() ? Real(0) : F_[0];
        return pi() * (-f0 * log(Real(2)) - clenshaw(d, xi)) + mass() * log(r);
    }
    return log_potential(Complex(x, Real(0))).real();
}

Complex BandMeasure::stieltjes(const Complex& z) const {
    const Real r = iv_.radius();
    const Complex one(Real(1), Real(0));
    const Complex xi = (z - Complex(iv_.mid(), Real(0))) / Complex(r, Real(0));
    const Complex root = std::sqrt(xi - one) * std::sqrt(xi + one);
    const Complex w = one / (xi + root);
    Complex acc(Real(0), Real(0));
    for (std::size_t k = F_.size(); k-- > 0;) acc = acc * w + Complex(F_[k], Real(0));
    return Complex(pi() / r, Real(0)) * acc / root;
}

Real BandMeasure::stieltjes_pv(const Real& x) const {
    const Real r = iv_.radius();
    Real xi = to_unit(iv_, x);
    return -pi() / r * sum_second_kind_shifted(F_, xi);
}

BandMeasure BandMeasure::scaled(const Real& factor) const {
    std::vector<Real> F = F_;
    for (auto& v : F) v *= factor;
    return from_unit_coeffs(iv_, std::move(F));
}

}  // namespace birthcut
