// numtheory.hpp
//
// Small elementary number theory helpers on 64-bit integers.

#pragma once

#include "bihom/types.hpp"

#include <utility>
#include <vector>

namespace bihom {

Int gcd(Int a, Int b);
bool is_prime(Int n);
std::vector<Int> primes_up_to(Int n);

// Prime factorisation in increasing order of primes.
std::vector<std::pair<Int, int>> factorize(Int n);
std::vector<Int> divisors(Int n);
int mobius(Int n);
Int euler_phi(Int n);
// #{a in (Z/q)^R : gcd(q, a_1, ..., a_R) = 1}.
Int jordan_totient(Int q, int R);

// Overflow-checked integer power.
Int ipow(Int base, int exp);

// Lattice generated by the columns of `cols` together with q Z^R, given by
// a lower-triangular basis (column r has zeros above row r). Entries are
// reduced mod q. diag(r) divides q.
struct ModLattice {
  Int q = 1;
  int R = 0;
  std::vector<IntVector> basis;  // R columns, each of length R

  Int diag(int r) const { return basis[r][r]; }
  // Index of the lattice in Z^R, i.e. q^R / |image in (Z/q)^R|.
  Int index() const;
};

ModLattice column_lattice_mod(const std::vector<IntVector>& cols, int R, Int q);

}  // namespace bihom
