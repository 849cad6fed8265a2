#include "birthcut/polynomial.hpp"

#include <algorithm>

namespace birthcut {

Polynomial::Polynomial(std::vector<Real> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::constant(const Real& c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(unsigned degree, const Real& c) {
    std::vector<Real> v(degree + 1, Real(0));
    v[degree] = c;
    return Polynomial(std::move(v));
}

Polynomial Polynomial::linear_power(const Real& root, unsigned power) {
    Polynomial p = constant(Real(1));
    Polynomial lin({-root, Real(1)});
    for (unsigned k = 0; k < power; ++k) p = p * lin;
    return p;
}

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Real Polynomial::coeff(unsigned k) const { return k < c_.size() ? c_[k] : Real(0); }

Real Polynomial::leading() const { return c_.empty() ? Real(0) : c_.back(); }

Real Polynomial::operator()(const Real& x) const {
    Real acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Complex Polynomial::operator()(const Complex& z) const {
    Complex acc(Real(0), Real(0));
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + Complex(*it, Real(0));
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<Real> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * Real(static_cast<long>(k));
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    std::vector<Real> a(c_.size() + 1, Real(0));
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / Real(static_cast<long>(k + 1));
    return Polynomial(std::move(a));
}

Polynomial Polynomial::divide_linear(const Real& r, Real* remainder) const {
    if (c_.empty()) {
        if (remainder) *remainder = 0;
        return Polynomial();
    }
    std::vector<Real> q(c_.size() - 1, Real(0));
    Real carry = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
        q[k] = carry;
        carry = c_[k] + carry * r;
    }
    if (remainder) *remainder = carry;
    return Polynomial(std::move(q));
}

Polynomial Polynomial::shifted(const Real& x0) const {
    // repeated synthetic division gives the Taylor coefficients at x0
    std::vector<Real> out;
    Polynomial p = *this;
    while (!p.is_zero()) {
        Real rem;
        p = p.divide_linear(x0, &rem);
        out.push_back(rem);
    }
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<Real> s(std::max(c_.size(), o.c_.size()), Real(0));
    for (std::size_t k = 0; k < c_.size(); ++k) s[k] += c_[k];
    for (std::size_t k = 0; k < o.c_.size(); ++k) s[k] += o.c_[k];
    return Polynomial(std::move(s));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * Real(-1); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (c_.empty() || o.c_.empty()) return Polynomial();
    std::vector<Real> s(c_.size() + o.c_.size() - 1, Real(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) s[i + j] += c_[i] * o.c_[j];
    return Polynomial(std::move(s));
}

Polynomial Polynomial::operator*(const Real& s) const {
    std::vector<Real> v = c_;
    for (auto& x : v) x *= s;
    return Polynomial(std::move(v));
}

}  // namespace birthcut
