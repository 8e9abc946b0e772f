// numtheory.cpp

#include "bihom/numtheory.hpp"

#include <algorithm>

namespace bihom {

Int gcd(Int a, Int b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<Int> primes_up_to(Int n) {
  std::vector<Int> out;
  if (n < 2) return out;
  std::vector<bool> sieve(static_cast<std::size_t>(n) + 1, true);
  for (Int p = 2; p <= n; ++p) {
    if (!sieve[p]) continue;
    out.push_back(p);
    for (Int m = p * p; m <= n; m += p) sieve[m] = false;
  }
  return out;
}

std::vector<std::pair<Int, int>> factorize(Int n) {
  if (n < 1) throw std::invalid_argument("factorize needs n >= 1");
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::vector<Int> divisors(Int n) {
  std::vector<Int> out{1};
  for (auto [p, e] : factorize(n)) {
    std::size_t cur = out.size();
    Int pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < cur; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int mobius(Int n) {
  int s = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    s = -s;
  }
  return s;
}

Int euler_phi(Int n) { return jordan_totient(n, 1); }

Int jordan_totient(Int q, int R) {
  Int total = 0;
  for (Int d : divisors(q)) total += mobius(d) * ipow(q / d, R);
  return total;
}

Int ipow(Int base, int exp) {
  if (exp < 0) throw std::invalid_argument("negative exponent");
  Int r = 1;
  for (int i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) throw std::overflow_error("integer power overflow");
  }
  return r;
}

Int ModLattice::index() const {
  Int idx = 1;
  for (int r = 0; r < R; ++r) idx *= diag(r);
  return idx;
}

ModLattice column_lattice_mod(const std::vector<IntVector>& cols, int R, Int q) {
  if (q < 1) throw std::invalid_argument("modulus must be positive");
  // q e_r is in the lattice for every r, so entries may be reduced mod q at
  // any time without changing it.
  std::vector<IntVector> work;
  for (const auto& c : cols) {
    IntVector v(R);
    for (int r = 0; r < R; ++r) v[r] = mod(c[r], q);
    work.push_back(std::move(v));
  }
  ModLattice out;
  out.q = q;
  out.R = R;
  for (int r = 0; r < R; ++r) {
    IntVector qe(R, 0);
    qe[r] = q;
    work.push_back(qe);
    // Euclid on row r across the remaining columns.
    while (true) {
      std::size_t piv = work.size();
      for (std::size_t c = 0; c < work.size(); ++c) {
        if (work[c][r] != 0 && (piv == work.size() || work[c][r] < work[piv][r])) piv = c;
      }
      bool reduced = false;
      for (std::size_t c = 0; c < work.size(); ++c) {
        if (c == piv || work[c][r] == 0) continue;
        Int f = work[c][r] / work[piv][r];
        for (int s = r; s < R; ++s) {
          work[c][s] -= f * work[piv][s];
          if (s > r) work[c][s] = mod(work[c][s], q);
        }
        reduced = true;
      }
      if (!reduced) {
        out.basis.push_back(work[piv]);
        work.erase(work.begin() + static_cast<std::ptrdiff_t>(piv));
        break;
      }
    }
  }
  return out;
}

}  // namespace bihom
