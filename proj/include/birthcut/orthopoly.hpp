#pragma once

#include "birthcut/equilibrium.hpp"
#include "birthcut/numerics.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace birthcut {

class OrthopolyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Weight on the real line: e^{-N V(x)} for an ensemble, e^{-x^{2nu} + tau x}
// for the model problem.
struct WeightSpec {
    enum class Kind { ensemble, model };
    Kind kind = Kind::model;
    Potential V;
    long N = 1;
    int nu = 1;
    Real tau = Real(0);

    static WeightSpec ensemble(Potential V, long N);
    static WeightSpec model(int nu, const Real& tau = Real(0));

    // log w and its derivative
    Real log_weight(const Real& x) const;
    Real log_weight_derivative(const Real& x) const;
    Complex log_weight(const Complex& z) const;
    Real weight(const Real& x) const { return exp(log_weight(x)); }
    Complex weight(const Complex& z) const { return std::exp(log_weight(z)); }

    // Interval outside which w(x)(2+|x|)^{2 max_degree} has dropped below its
    // maximum by more than the working digits plus a margin.
    Interval truncation(int max_degree, const PrecisionContext& ctx) const;
    std::string describe() const;
};

// pi_{k+1} = (x - a_k) pi_k - b_k pi_{k-1}, with b_0 = h_0 = int w.
struct RecurrenceTable {
    std::vector<Real> a, b, h;
    unsigned bits = 0;
    int max_degree = 0;
    std::string weight;
    Interval support;  // truncation interval used by the quadrature
    std::size_t nodes = 0;
    Real orthogonality_residual;

    // pi_k(x) and pi_{k-1}(x); k <= max_degree + 1
    void evaluate(int k, const Real& x, Real& pk, Real& pk1) const;
    void evaluate(int k, const Complex& z, Complex& pk, Complex& pk1) const;
    // values and derivatives
    void evaluate_with_derivative(int k, const Real& x, Real& pk, Real& pk1, Real& dpk, Real& dpk1) const;
    Real monic(int k, const Real& x) const;

    void write_csv(std::ostream& out) const;
};

struct StieltjesOptions {
    std::size_t initial_nodes = 256;
    std::size_t max_nodes = std::size_t(1) << 16;
};

RecurrenceTable stieltjes_recurrence(const WeightSpec& w, int max_degree, const PrecisionContext& ctx,
                                     const StieltjesOptions& opt = {});

// Minimum bits for an ensemble recurrence of this degree.
unsigned recommended_bits(int max_degree);

// Max over j < k <= max_degree of |<pi_j, pi_k>| / sqrt(h_j h_k), by an
// independent quadrature of twice the node count used for the table.
Real orthogonality_residual(const RecurrenceTable& table, const WeightSpec& w, const PrecisionContext& ctx);

// n-term Christoffel-Darboux kernel with the weight split symmetrically.
Real cd_kernel(const RecurrenceTable& table, const WeightSpec& w, int n, const Real& x, const Real& xp);
// kernel without the weight factor sqrt(w(x) w(x'))
Real cd_kernel_polynomial(const RecurrenceTable& table, int n, const Real& x, const Real& xp);

// K_m^nu for the weight e^{-x^{2nu}}; builds its own table. For sweeps build
// one table and call cd_kernel.
Real model_kernel(int nu, int m, const Real& z, const Real& zp, const PrecisionContext& ctx);

using KernelFn = std::function<Real(const Real&, const Real&)>;
Real correlation_det(const KernelFn& K, const std::vector<Real>& points);
Real determinant(std::vector<std::vector<Real>> m);

class TooCloseToAxis : public OrthopolyError {
public:
    using OrthopolyError::OrthopolyError;
};

// (1/2 pi i) int pi_k(s) w(s) / (s - z) ds for Im z != 0. Below a floor on
// |Im z| the call fails; use the boundary form there.
Complex weighted_cauchy_transform(const RecurrenceTable& table, const WeightSpec& w, int k, const Complex& z,
                                  const PrecisionContext& ctx);
// Boundary value from above (side = +1) or below (side = -1) on the real line.
Complex weighted_cauchy_boundary(const RecurrenceTable& table, const WeightSpec& w, int k, const Real& x, int side,
                                 const PrecisionContext& ctx);
Real cauchy_axis_floor(const PrecisionContext& ctx);

// Generic form used by both of the above: f entire along the truncation interval.
Complex cauchy_transform(const std::function<Complex(const Complex&)>& f, const Interval& iv, const Complex& z,
                         const PrecisionContext& ctx);
Complex cauchy_boundary(const std::function<Complex(const Complex&)>& f,
                        const std::function<Complex(const Real&)>& df, const Interval& iv, const Real& x, int side,
                        const PrecisionContext& ctx);

}  // namespace birthcut
