// forms.hpp
//
// Systems of bihomogeneous forms F_1..F_R in variables x (n1 of them) and
// y (n2 of them), all of bidegree (d1, d2). Coefficients are exact
// rationals; every form also carries an integral rescaling (multiplied by
// the lcm of its coefficient denominators) which is what the enumeration,
// exponential-sum and multilinear routines operate on. Rescaling a form
// leaves its zero set unchanged.

#pragma once

#include "bihom/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bihom {

enum class Axis { x, y };

inline Axis other(Axis a) { return a == Axis::x ? Axis::y : Axis::x; }

struct Monomial {
  Rational coeff;
  std::vector<int> xexp;
  std::vector<int> yexp;
};

// One line of the form input format: form index (0-based), coefficient,
// x-exponent list, y-exponent list.
struct MonomialRecord {
  int form = 0;
  Monomial monomial;
};

// Parses "<form> <coeff> <e1,e2,...> <f1,f2,...>"; coeff may be "p/q".
MonomialRecord parse_monomial_record(const std::string& line);
std::string format_monomial_record(const MonomialRecord& rec);

// Scaled integral monomial; exponents are stored densely.
struct Term {
  Int coeff = 0;
  std::vector<int> xexp;
  std::vector<int> yexp;
};

class BihomogeneousForm {
 public:
  BihomogeneousForm(int n1, int n2, int d1, int d2, std::vector<Monomial> monomials);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  bool is_zero() const { return monomials_.empty(); }

  // Merged, zero-free monomial list in lexicographic exponent order.
  const std::vector<Monomial>& monomials() const { return monomials_; }

  // Symmetric coefficient F_{j1..jd1; k1..kd2} (0-based indices).
  Rational tensor_entry(std::span<const int> j, std::span<const int> k) const;

  // Contraction of the symmetric tensor with x repeated d1 times and y
  // repeated d2 times; equals eval() by construction.
  Rational contract(std::span<const Rational> x, std::span<const Rational> y) const;

  Rational eval(std::span<const Rational> x, std::span<const Rational> y) const;

  // Least common multiple of the coefficient denominators.
  const BigInt& denominator_lcm() const { return lcm_; }

 private:
  int n1_, n2_, d1_, d2_;
  std::vector<Monomial> monomials_;
  BigInt lcm_ = 1;
};

// d1 vectors of length n1 and d2 vectors of length n2.
struct VectorTuple {
  std::vector<IntVector> xs;
  std::vector<IntVector> ys;
};

// For systems that are linear in one block ("fiber"), the coefficient of
// fiber variable k in form i is a polynomial in the other ("outer") block.
class LinearFiber {
 public:
  struct OuterTerm {
    Int coeff;
    std::vector<int> exps;
  };

  Axis fiber() const { return fiber_; }
  Axis outer() const { return other(fiber_); }
  int forms() const { return r_; }
  int fiber_dim() const { return m_; }
  int outer_dim() const { return outer_dim_; }

  // out[i * fiber_dim + k] = c_{ik}(outer).
  template <class T>
  void coefficients(const T* outer, T* out) const {
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      T acc = T(0);
      for (const auto& t : entries_[e]) {
        T v = T(t.coeff);
        for (int j = 0; j < outer_dim_; ++j) {
          for (int p = 0; p < t.exps[j]; ++p) v *= outer[j];
        }
        acc += v;
      }
      out[e] = acc;
    }
  }

  // Monomials (in the outer block) making up c_{ik}.
  const std::vector<OuterTerm>& entry(int i, int k) const { return entries_[i * m_ + k]; }

 private:
  friend class FormSystem;
  Axis fiber_ = Axis::y;
  int r_ = 0, m_ = 0, outer_dim_ = 0;
  std::vector<std::vector<OuterTerm>> entries_;
};

class FormSystem {
 public:
  FormSystem(std::vector<BihomogeneousForm> forms);

  int R() const { return static_cast<int>(forms_.size()); }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  int dim(Axis a) const { return a == Axis::x ? n1_ : n2_; }
  int degree(Axis a) const { return a == Axis::x ? d1_ : d2_; }
  int total_dim() const { return n1_ + n2_; }

  const BihomogeneousForm& form(int i) const;
  const std::vector<Term>& terms(int i) const;
  // Factor the i-th form was multiplied by to make it integral.
  const BigInt& scale(int i) const;
  bool has_zero_form() const;

  // Exact value of the original (unscaled) form.
  Rational eval_form(int i, std::span<const Int> x, std::span<const Int> y) const;
  Rational eval_form(int i, std::span<const Rational> x, std::span<const Rational> y) const;

  // Scaled integral form at an integer point; 128-bit accumulation.
  Int128 eval_int(int i, const Int* x, const Int* y) const;
  // Scaled form at a real point.
  double eval_real(int i, const double* x, const double* y) const;
  // Scaled form reduced modulo m (m < 2^31).
  Int eval_mod(int i, const Int* x, const Int* y, Int m) const;

  // Partial derivative of the scaled form i w.r.t. variable j of block `a`.
  double partial_real(int i, Axis a, int j, const double* x, const double* y) const;
  Int partial_mod(int i, Axis a, int j, const Int* x, const Int* y, Int m) const;

  // Gamma_i of the scaled system: d1! d2! times the symmetric tensor
  // contracted with the tuple; always an exact integer.
  Int128 gamma(int i, const VectorTuple& tuple) const;

  std::optional<LinearFiber> linear_fiber(std::optional<Axis> prefer = std::nullopt) const;
  LinearFiber linear_fiber_for(Axis fiber) const;

 private:
  void check_lengths(std::size_t xs, std::size_t ys) const;

  int n1_, n2_, d1_, d2_;
  std::vector<BihomogeneousForm> forms_;
  std::vector<std::vector<Term>> terms_;
  std::vector<BigInt> scale_;
};

FormSystem make_system(const std::vector<std::vector<Monomial>>& forms, int R, int n1, int n2,
                       int d1, int d2);
FormSystem make_system(const std::vector<MonomialRecord>& records, int R, int n1, int n2, int d1,
                       int d2);

// Gamma = sum_i alpha_i Gamma_i in floating point.
double multilinear_eval(const FormSystem& sys, std::span<const double> alpha,
                        const VectorTuple& tuple);

// F_d(y_1..y_d) = sum_{eps in {0,1}^d} (-1)^{|eps|} F(eps_1 y_1 + ... + eps_d y_d),
// with F_0 = 0. `f` maps an integer vector to an exact value.
template <class Value, class Eval>
Value iterated_difference(Eval&& f, const std::vector<IntVector>& directions) {
  const std::size_t d = directions.size();
  if (d == 0) return Value(0);
  const std::size_t len = directions.front().size();
  Value total(0);
  IntVector point(len);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::fill(point.begin(), point.end(), Int{0});
    int parity = 0;
    for (std::size_t t = 0; t < d; ++t) {
      if (mask & (std::size_t{1} << t)) {
        ++parity;
        for (std::size_t c = 0; c < len; ++c) point[c] += directions[t][c];
      }
    }
    Value v = f(point);
    if (parity % 2) {
      total -= v;
    } else {
      total += v;
    }
  }
  return total;
}

// Rank over Q of the R x n_axis Jacobian of the original forms at (x, y).
int jacobian_rank(const FormSystem& sys, std::span<const Rational> x,
                  std::span<const Rational> y, Axis axis);

// Rank of an integer matrix by fraction-free (Bareiss) elimination.
int bareiss_rank(std::vector<std::vector<BigInt>> rows);

// Rank of a matrix over Z/p (p prime).
int rank_mod_p(std::vector<std::vector<Int>> rows, Int p);

// Multinomial helpers.
BigInt factorial(int n);

}  // namespace bihom
