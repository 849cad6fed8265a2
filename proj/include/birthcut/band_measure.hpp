#pragma once

#include "birthcut/numerics.hpp"

#include <vector>

namespace birthcut {

// f(x) = sum c_k T_k((x - mid)/radius) on an interval.
class ChebSeries {
public:
    ChebSeries() = default;
    ChebSeries(Interval iv, std::vector<Real> coeffs) : iv_(std::move(iv)), c_(std::move(coeffs)) {}

    // Interpolant through n first-kind Chebyshev points (exact for degree < n).
    static ChebSeries interpolate(const RealFn& f, const Interval& iv, std::size_t n);
    // Adaptive: doubles the point count until the tail drops below ctx.rel_tol.
    static ChebSeries fit(const RealFn& f, const Interval& iv, const PrecisionContext& ctx,
                          std::size_t max_points = 4096);

    const Interval& interval() const { return iv_; }
    const std::vector<Real>& coeffs() const { return c_; }
    Real operator()(const Real& x) const;
    Real at_unit(const Real& u) const;  // evaluation in the scaled variable

private:
    Interval iv_;
    std::vector<Real> c_;
};

// A finite measure on [lo, hi] written as F(u) du / sqrt(1 - u^2) with
// s = mid + radius*u and F a Chebyshev series. Square-root edges and
// arcsine-type edges both fit this form, and the logarithmic potential and
// Cauchy transform of each T_k term are elementary:
//   (1/pi) int log(xi - u) T_k(u) du/sqrt(1-u^2) = log(Phi/2)      (k = 0)
//                                                 = -Phi^{-k} / k    (k >= 1)
//   (1/pi) int T_k(u) / ((xi - u) sqrt(1-u^2)) du = Phi^{-k} / sqrt(xi^2 - 1)
// with Phi(xi) = xi + sqrt(xi-1)sqrt(xi+1).
class BandMeasure {
public:
    BandMeasure() = default;

    // density g(s) * sqrt((hi - s)(s - lo))
    static BandMeasure from_sqrt_factor(const RealFn& g, const Interval& iv, const PrecisionContext& ctx);
    // density g(s) / sqrt((hi - s)(s - lo))
    static BandMeasure from_arcsine_factor(const RealFn& g, const Interval& iv, const PrecisionContext& ctx);
    static BandMeasure from_unit_coeffs(const Interval& iv, std::vector<Real> F);

    const Interval& interval() const { return iv_; }
    const std::vector<Real>& unit_coeffs() const { return F_; }

    Real mass() const;
    Real density(const Real& x) const;  // zero outside the band
    // int log(z - s) dmu(s), principal branch, z off the band
    Complex log_potential(const Complex& z) const;
    // int log|x - s| dmu(s) for real x, including points on the band
    Real log_abs_potential(const Real& x) const;
    // boundary value of log_potential from above (side = +1) or below (side = -1)
    Complex log_potential_boundary(const Real& x, int side) const;
    // int dmu(s)/(z - s)
    Complex stieltjes(const Complex& z) const;
    // principal value of int dmu(s)/(x - s) for x inside the band
    Real stieltjes_pv(const Real& x) const;

    BandMeasure scaled(const Real& factor) const;

private:
    Interval iv_;
    std::vector<Real> F_;
};

// Phi(xi) = xi + sqrt(xi-1) sqrt(xi+1), the exterior map of [-1,1].
Complex joukowski_inverse(const Complex& xi);

}  // namespace birthcut
