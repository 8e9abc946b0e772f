// lattice.hpp
//
// Linear systems L_i(u) = sum_j lambda_ij u_j, the counters U(Z) and U^t(Z),
// the associated lattice Lambda with its adjoint, and exact successive
// minima for small dimension. Inputs are exact rationals, so all strict
// inequalities are decided exactly.

#pragma once

#include "bihom/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace bihom {

using RationalMatrix = std::vector<std::vector<Rational>>;  // row-major

RationalMatrix transpose(const RationalMatrix& m);
RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix identity_matrix(int n);
Rational determinant(RationalMatrix m);
RationalMatrix inverse(RationalMatrix m);

struct LinearSystem {
  RationalMatrix lambda;  // n1 x n2
  Rational a = 2;

  int n1() const { return static_cast<int>(lambda.size()); }
  int n2() const { return lambda.empty() ? 0 : static_cast<int>(lambda.front().size()); }
  LinearSystem transposed() const { return {transpose(lambda), a}; }
  void validate() const;
};

// Basis vectors are the columns of `matrix`.
struct LatticeBasis {
  RationalMatrix matrix;

  int dim() const { return static_cast<int>(matrix.size()); }
  std::vector<std::vector<double>> as_double() const;
};

struct DavenportLattices {
  LatticeBasis lambda;         // [[a^-1 I_n2, 0], [a lambda, a I_n1]]
  LatticeBasis adjoint;        // (Lambda^t)^-1
  LatticeBasis adjoint_tilde;  // [[a^-1 I_n1, 0], [a lambda^t, a I_n2]]
  double b = 1;                // a^((n2 - n1) / (n1 + n2))
  std::vector<std::vector<double>> lambda_nor;  // b * Lambda
  std::vector<std::vector<double>> m_nor;       // b^-1 * M~
};

DavenportLattices davenport_lattice(const LinearSystem& ls);

struct SuccessiveMinima {
  std::vector<Rational> squared;  // exact squared euclidean norms
  std::vector<double> values;
  std::vector<IntVector> coefficients;  // attaining coefficient vectors
  std::size_t enumerated = 0;
  double radius = 0;  // final enumeration radius
};

// Enumerates lattice vectors in a ball whose radius doubles until dim
// independent vectors are inside, then selects greedily.
SuccessiveMinima successive_minima(const LatticeBasis& basis, std::size_t budget = 20000000);

// U(Z) (or U^t(Z) when transposed): integer tuples with |u_j| < aZ and
// |L_i(u) - u_{n2+i}| < Z / a.
Int128 count_U(const LinearSystem& ls, const Rational& Z, bool transposed = false,
               double budget = 1e8);

struct ShrinkingCheck {
  Int128 u_z1 = 0, u_z2 = 0, ut_z1 = 0;
  Rational bound;  // max((Z2/Z1)^n2 U(Z1), Z2^n2 / Z1^n1 a^(n2-n1) U^t(Z1))
  Rational ratio;  // U(Z2) / bound
};

ShrinkingCheck check_shrinking_lemma(const LinearSystem& ls, const Rational& Z1,
                                     const Rational& Z2);

// R_k * S_{n+1-k} for the lattice and the similar adjoint M~; the
// normalising factor b cancels in these products.
std::vector<double> mahler_products(const LinearSystem& ls);

struct Lemma51Row {
  int instance = 0;
  int n1 = 0, n2 = 0;
  Rational a, z1, z2;
  ShrinkingCheck check;
};

struct RandomFamily {
  int max_n = 3;
  Rational a_lo = Rational(3, 2), a_hi = 4;
  Rational lambda_abs = 2;
  int denominator = 8;  // of lambda entries, a, Z
};

// Uniform k / denominator in [lo, hi]; raw engine output keeps runs
// reproducible across standard libraries.
Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi, int den);
LinearSystem random_linear_system(std::mt19937_64& rng, int n1, int n2, const RandomFamily& fam);

std::vector<Lemma51Row> lemma51_batch(int instances, std::uint64_t seed,
                                      const RandomFamily& fam = {});

}  // namespace bihom
