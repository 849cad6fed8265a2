#pragma once

#include "birthcut/real.hpp"

#include <vector>

namespace birthcut {

// Dense real polynomial, coefficients in ascending degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Real> coeffs);
    static Polynomial constant(const Real& c);
    static Polynomial monomial(unsigned degree, const Real& c = Real(1));
    // (x - root)^power
    static Polynomial linear_power(const Real& root, unsigned power);

    const std::vector<Real>& coeffs() const { return c_; }
    // -1 for the zero polynomial
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    Real coeff(unsigned k) const;
    Real leading() const;

    Real operator()(const Real& x) const;
    Complex operator()(const Complex& z) const;

    Polynomial derivative() const;
    Polynomial antiderivative() const;  // zero constant term
    // p(x) = q(x)(x - r) + rem
    Polynomial divide_linear(const Real& r, Real* remainder = nullptr) const;
    // coefficients of p(x0 + s) in powers of s
    Polynomial shifted(const Real& x0) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Real& s) const;

private:
    void trim();
    std::vector<Real> c_;
};

}  // namespace birthcut
