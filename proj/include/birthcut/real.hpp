#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <string>

namespace birthcut {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using Complex = std::complex<Real>;

// Working precision plus the tolerances derived from it. One context is shared
// by every operation of a computation; entry points install it with
// PrecisionScope so that freshly created Reals carry the right mantissa.
struct PrecisionContext {
    unsigned bits = 128;
    double abs_tol = 0;
    double rel_tol = 0;

    static PrecisionContext with_bits(unsigned bits);
    unsigned digits10() const;
    Real abs_tolerance() const;
    Real rel_tolerance() const;
    void validate() const;
};

class PrecisionScope {
public:
    explicit PrecisionScope(const PrecisionContext& ctx);
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_digits_;
};

Real pi();
Real epsilon_at_current_precision();

// Fixed-format rendering used by every CSV writer, so output bytes depend only
// on the value and the requested digit count.
std::string format_real(const Real& x, int significant = 17);
std::string format_double(double x, int significant = 17);

double to_double(const Real& x);

inline Complex cx(const Real& re, const Real& im = Real(0)) { return Complex(re, im); }

}  // namespace birthcut
