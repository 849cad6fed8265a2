#include "birthcut/real.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace birthcut {

namespace {
unsigned bits_to_digits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}
}  // namespace

PrecisionContext PrecisionContext::with_bits(unsigned bits) {
    PrecisionContext ctx;
    ctx.bits = bits;
    // Leave ~20 bits of headroom for accumulated rounding in quadrature sums.
    ctx.abs_tol = std::ldexp(1.0, -static_cast<int>(bits) + 20);
    ctx.rel_tol = ctx.abs_tol;
    ctx.validate();
    return ctx;
}

unsigned PrecisionContext::digits10() const { return bits_to_digits(bits); }

Real PrecisionContext::abs_tolerance() const { return Real(abs_tol); }
Real PrecisionContext::rel_tolerance() const { return Real(rel_tol); }

void PrecisionContext::validate() const {
    if (bits < 53) throw std::invalid_argument("precision below 53 bits");
    if (!(abs_tol > 0) || !(rel_tol > 0)) throw std::invalid_argument("tolerances must be positive");
}

PrecisionScope::PrecisionScope(const PrecisionContext& ctx) : PrecisionScope(ctx.bits) {}

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits_(Real::default_precision()) {
    Real::default_precision(bits_to_digits(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits_); }

Real pi() { return boost::math::constants::pi<Real>(); }

Real epsilon_at_current_precision() {
    return std::numeric_limits<Real>::epsilon();
}

std::string format_real(const Real& x, int significant) {
    return format_double(to_double(x), significant);
}

std::string format_double(double x, int significant) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", significant - 1, x);
    return buf;
}

double to_double(const Real& x) { return x.convert_to<double>(); }

}  // namespace birthcut
