#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "otg/errors.hpp"

namespace otg {

// Truncated multivariate Taylor arithmetic of fixed order 4. A Jet4 in n
// variables stores one coefficient per monomial of total degree <= 4, dense,
// C(n+4,4) of them. Arithmetic is exact truncation: products drop everything
// of degree > 4. The coefficient of multi-index J is (d_J f)/J!.
class JetTable;

class Jet4 {
  public:
    Jet4() = default;
    Jet4(int n, double value);  // constant jet

    // lift_variables: jet i carries value point[i] and unit first-order
    // coefficient in slot i.
    static std::vector<Jet4> variables(std::span<const double> point);

    int dim() const { return n_; }
    double value() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    std::vector<double>& coeffs() { return coeffs_; }
    const JetTable& table() const;

    Jet4 operator-() const;
    Jet4& operator+=(const Jet4& o);
    Jet4& operator-=(const Jet4& o);
    Jet4& operator+=(double s);
    Jet4& operator-=(double s);
    Jet4& operator*=(double s);

    friend Jet4 operator+(Jet4 a, const Jet4& b) { return a += b; }
    friend Jet4 operator-(Jet4 a, const Jet4& b) { return a -= b; }
    friend Jet4 operator+(Jet4 a, double s) { return a += s; }
    friend Jet4 operator+(double s, Jet4 a) { return a += s; }
    friend Jet4 operator-(Jet4 a, double s) { return a -= s; }
    friend Jet4 operator-(double s, const Jet4& a) { Jet4 r = -a; return r += s; }
    friend Jet4 operator*(Jet4 a, double s) { return a *= s; }
    friend Jet4 operator*(double s, Jet4 a) { return a *= s; }
    friend Jet4 operator/(Jet4 a, double s);
    friend Jet4 operator*(const Jet4& a, const Jet4& b);
    friend Jet4 operator/(const Jet4& a, const Jet4& b);

  private:
    int n_ = 0;
    std::vector<double> coeffs_;
};

// Univariate primitives composed by Horner evaluation of the primitive's
// degree-4 Taylor polynomial at the argument's value. Domain margins are
// absolute: log/sqrt need value >= 1e-12, div needs |value| >= 1e-300.
Jet4 exp(const Jet4& a);
Jet4 log(const Jet4& a);
Jet4 cosh(const Jet4& a);
Jet4 sqrt(const Jet4& a);
Jet4 pow_const(const Jet4& a, double p);
Jet4 recip(const Jet4& a);

enum class Primitive { Add, Sub, Mul, Div, PowConst, Exp, Log, Cosh, Sqrt, Neg };
const char* primitive_name(Primitive p);

// Dispatcher used by the expression evaluator. PowConst reads the exponent
// from `exponent`; all other primitives ignore it.
Jet4 apply_primitive(Primitive p, std::span<const Jet4> args, double exponent = 0.0);

// Fully symmetric derivative tensors up to order 4, read off one Taylor
// coefficient each (component = J! * coeff(J)); accessors sort the index
// tuple, so symmetry is bitwise.
class DerivBundle {
  public:
    DerivBundle() = default;
    explicit DerivBundle(const Jet4& jet);

    int dim() const { return n_; }
    double value() const { return value_; }
    double grad(int i) const { return grad_[i]; }
    double d2(int i, int j) const;
    double d3(int i, int j, int k) const;
    double d4(int i, int j, int k, int l) const;

  private:
    int n_ = 0;
    double value_ = 0.0;
    std::vector<double> grad_;
    std::vector<double> d2_, d3_, d4_;  // packed over sorted index tuples
};

inline DerivBundle derivative_tensors(const Jet4& jet) { return DerivBundle(jet); }

// Monomial bookkeeping for one dimension, built once and shared. Exposed for
// tests; not needed by ordinary callers.
class JetTable {
  public:
    static const JetTable& get(int n);

    int dim() const { return n_; }
    int size() const { return static_cast<int>(monomials_.size()); }
    const std::vector<std::uint8_t>& monomial(int idx) const { return monomials_[idx]; }
    int degree(int idx) const { return degree_[idx]; }
    int index_of(const std::vector<std::uint8_t>& mono) const;

    struct ProdEntry {
        std::int32_t a, b, target;
    };
    const std::vector<ProdEntry>& product_table() const { return prod_; }

  private:
    explicit JetTable(int n);
    int n_ = 0;
    std::vector<std::vector<std::uint8_t>> monomials_;
    std::vector<int> degree_;
    std::vector<int> by_key_;  // packed-exponent key -> index
    std::vector<ProdEntry> prod_;
};

}  // namespace otg
