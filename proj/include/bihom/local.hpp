// local.hpp
//
// Singular series truncations, Euler factors, congruence counts and p-adic
// nonsingular zeros. With n = n1 + n2 and
//   A(q) = sum_{a mod q, gcd(q, a) = 1} S_{a,q},
// the truncation is S(Q) = sum_{q <= Q} q^(-n) A(q). A(q) is assembled
// exactly: the summed histogram C_m = sum_a c^(a)_m is constant on unit
// orbits of Z/q, so sum_m C_m e(m/q) = sum_{g | q} C_g mu(q/g).

#pragma once

#include "bihom/expsum.hpp"
#include "bihom/forms.hpp"

#include <map>
#include <optional>
#include <vector>

namespace bihom {

enum class CongruenceStrategy { automatic, brute, fibered };

struct LocalOptions {
  double budget = 1e9;
  CongruenceStrategy strategy = CongruenceStrategy::automatic;
  // Build A(q) for composite q from prime-power values.
  bool multiplicative = true;
};

// #{(x, y) mod q : F_i(x, y) = 0 mod q for all i} (scaled integral forms).
Int count_mod_q(const FormSystem& sys, Int q, const LocalOptions& opts = {});

struct CoprimeSum {
  Int q = 1;
  BigInt exact;          // A(q)
  double float_value = 0;  // real part of sum_a S_{a,q} in floating point
  double float_imag = 0;
};

// A(q) from complete sums over all a coprime to q; verifies the
// floating-point assembly agrees with the exact value to 1e-10 relative to
// the total histogram mass.
CoprimeSum coprime_sum(const FormSystem& sys, Int q, const LocalOptions& opts = {});

struct SeriesResult {
  Rational value;                 // S(Q)
  std::map<Int, BigInt> a_values; // A(q) for q <= Q
};

SeriesResult singular_series_partial(const FormSystem& sys, Int Q, const LocalOptions& opts = {});

struct LocalFactor {
  Int p = 2;
  int l = 0;
  Rational partial;  // 1 + sum_{l' <= l} p^(-n l') A(p^l')
};

LocalFactor local_factor(const FormSystem& sys, Int p, int l, const LocalOptions& opts = {});

struct OrthogonalityCheck {
  Rational lhs;  // sum_{q | p^l} q^(-n) A(q)
  Rational rhs;  // p^(-l (n - R)) * count_mod_q(p^l)
  Int count = 0;
  bool equal() const { return lhs == rhs; }
};

// The two sides are computed independently: lhs from complete exponential
// sums, rhs from a direct congruence count.
OrthogonalityCheck orthogonality_check(const FormSystem& sys, Int p, int l,
                                       const LocalOptions& lhs_opts = {},
                                       const LocalOptions& rhs_opts = {});

struct PadicWitness {
  Int p = 2;
  IntVector x, y;  // residues mod p
  int rank = 0;    // rank mod p of the R x (n1 + n2) Jacobian
};

struct PadicSearch {
  std::optional<PadicWitness> witness;  // certified (rank R mod p)
  // Common zeros mod p^depth found while no certified witness existed;
  // these are reported, not certified.
  std::size_t inconclusive = 0;
  int depth_searched = 1;
};

PadicSearch find_nonsingular_padic_zero(const FormSystem& sys, Int p, int search_depth = 1,
                                        double budget = 1e9);

// Validates a witness independently of the search.
bool verify_padic_witness(const FormSystem& sys, const PadicWitness& w);

}  // namespace bihom
