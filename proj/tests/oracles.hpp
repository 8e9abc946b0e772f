// Independent brute-force reference implementations used by the tests.
// Nothing here calls into the routines under test beyond FormSystem
// construction and exact monomial evaluation.

#pragma once

#include "bihom/counting.hpp"
#include "bihom/forms.hpp"
#include "bihom/lattice.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using namespace bihom;

inline Int rfloor(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && Rational(q) != r) q -= 1;
  return static_cast<Int>(q);
}

inline Rational rpow(Rational b, int e) {
  Rational r = 1;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

inline Monomial mono(Rational c, std::vector<int> xe, std::vector<int> ye) {
  return {std::move(c), std::move(xe), std::move(ye)};
}

// x . y with n = 3.
inline FormSystem sys_a(int n = 3) {
  std::vector<Monomial> f;
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    f.push_back(mono(1, e, e));
  }
  return make_system(std::vector<std::vector<Monomial>>{f}, 1, n, n, 1, 1);
}

// x1^2 y1 + x2^2 y2.
inline FormSystem sys_b() {
  std::vector<Monomial> f{mono(1, {2, 0}, {1, 0}), mono(1, {0, 2}, {0, 1})};
  return make_system(std::vector<std::vector<Monomial>>{f}, 1, 2, 2, 2, 1);
}

// A form whose only monomial has coefficient 0.
inline FormSystem zero_form(int n1 = 2, int n2 = 2) {
  std::vector<int> ex(n1, 0), ey(n2, 0);
  ex[0] = 1;
  ey[0] = 1;
  return make_system(std::vector<std::vector<Monomial>>{{mono(0, ex, ey)}}, 1, n1, n2, 1, 1);
}

inline BoxPair centered(const FormSystem& sys, double p1, double p2,
                        Boundary b = Boundary::closed) {
  BoxPair bp;
  bp.b1.assign(sys.n1(), Interval{-0.5, 0.5});
  bp.b2.assign(sys.n2(), Interval{-0.5, 0.5});
  bp.p1 = p1;
  bp.p2 = p2;
  bp.boundary = b;
  return bp;
}

// Exponent vectors of total degree d in n variables.
inline void compositions(int n, int d, std::vector<int>& cur, int pos,
                         std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[pos] = d;
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= d; ++e) {
    cur[pos] = e;
    compositions(n, d - e, cur, pos + 1, out);
  }
}

inline std::vector<std::vector<int>> exponents(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  compositions(n, d, cur, 0, out);
  return out;
}

struct RandomShape {
  int max_R = 2;
  int max_deg = 4;  // d1 + d2
  int max_n = 4;    // n1 + n2
  int coeff = 3;
};

// Random system with small integer (occasionally half-integer) coefficients.
inline FormSystem random_system(std::mt19937_64& rng, const RandomShape& s = {},
                                bool allow_fractions = true) {
  auto uni = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  int R = uni(1, s.max_R);
  int n1 = uni(1, s.max_n - 1);
  int n2 = uni(1, s.max_n - n1);
  int d1 = uni(1, s.max_deg - 1);
  int d2 = uni(1, s.max_deg - d1);
  auto xs = exponents(n1, d1);
  auto ys = exponents(n2, d2);
  std::vector<std::vector<Monomial>> forms(R);
  for (int i = 0; i < R; ++i) {
    int terms = uni(1, 4);
    for (int t = 0; t < terms; ++t) {
      int c = uni(-s.coeff, s.coeff);
      if (c == 0) c = 1;
      Rational coeff = c;
      if (allow_fractions && uni(0, 3) == 0) coeff /= 2;
      forms[i].push_back(mono(coeff, xs[uni(0, int(xs.size()) - 1)], ys[uni(0, int(ys.size()) - 1)]));
    }
  }
  return make_system(forms, R, n1, n2, d1, d2);
}

inline IntVector random_vector(std::mt19937_64& rng, int n, int bound) {
  IntVector v(n);
  for (auto& c : v) c = static_cast<Int>(rng() % (2 * bound + 1)) - bound;
  return v;
}

// Points of a closed scaled box, without the library odometer.
inline std::vector<IntVector> box_points(const std::vector<Interval>& ivs, double P,
                                         Boundary b = Boundary::closed) {
  std::vector<IntVector> pts{{}};
  for (const auto& iv : ivs) {
    Rational lo = exact_rational(P) * exact_rational(iv.lo);
    Rational hi = exact_rational(P) * exact_rational(iv.hi);
    std::vector<IntVector> next;
    const Int from = static_cast<Int>(std::floor(P * iv.lo)) - 2;
    const Int to = static_cast<Int>(std::ceil(P * iv.hi)) + 2;
    std::vector<Int> cs;
    for (Int c = from; c <= to; ++c) {
      Rational rc = c;
      if (rc >= lo && (b == Boundary::closed ? rc <= hi : rc < hi)) cs.push_back(c);
    }
    for (const auto& p : pts) {
      for (Int c : cs) {
        auto q = p;
        q.push_back(c);
        next.push_back(std::move(q));
      }
    }
    pts = std::move(next);
  }
  return pts;
}

inline Int brute_count(const FormSystem& sys, const BoxPair& bp) {
  auto xs = box_points(bp.b1, bp.p1, bp.boundary);
  auto ys = box_points(bp.b2, bp.p2, bp.boundary);
  Int n = 0;
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      bool all = true;
      for (int i = 0; i < sys.R() && all; ++i) all = sys.eval_form(i, x, y) == 0;
      n += all;
    }
  }
  return n;
}

// Exact scaled value of form i as a (small) integer.
inline Int scaled_value(const FormSystem& sys, int i, const IntVector& x, const IntVector& y) {
  Rational v = sys.eval_form(i, x, y) * Rational(sys.scale(i));
  return static_cast<Int>(numerator(v));
}

inline std::complex<double> brute_weyl(const FormSystem& sys, const std::vector<double>& alpha,
                                       const BoxPair& bp) {
  auto xs = box_points(bp.b1, bp.p1, bp.boundary);
  auto ys = box_points(bp.b2, bp.p2, bp.boundary);
  std::complex<long double> s = 0;
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      long double ph = 0;
      for (int i = 0; i < sys.R(); ++i) {
        long double t = static_cast<long double>(alpha[i]) * scaled_value(sys, i, x, y);
        ph += t - std::floor(t);
      }
      ph *= 2 * 3.14159265358979323846264338327950288L;
      s += std::complex<long double>(std::cos(ph), std::sin(ph));
    }
  }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

inline std::vector<IntVector> residues(int n, Int q) {
  std::vector<IntVector> out{{}};
  for (int c = 0; c < n; ++c) {
    std::vector<IntVector> next;
    for (const auto& p : out) {
      for (Int r = 0; r < q; ++r) {
        auto v = p;
        v.push_back(r);
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline Int mod_q(Int v, Int q) { return ((v % q) + q) % q; }

inline std::complex<double> brute_complete(const FormSystem& sys, const IntVector& a, Int q) {
  auto xs = residues(sys.n1(), q);
  auto ys = residues(sys.n2(), q);
  std::complex<long double> s = 0;
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      Int m = 0;
      for (int i = 0; i < sys.R(); ++i) m = mod_q(m + a[i] * mod_q(scaled_value(sys, i, x, y), q), q);
      long double ph = 2 * 3.14159265358979323846264338327950288L * m / q;
      s += std::complex<long double>(std::cos(ph), std::sin(ph));
    }
  }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

inline Int brute_count_mod(const FormSystem& sys, Int q) {
  auto xs = residues(sys.n1(), q);
  auto ys = residues(sys.n2(), q);
  Int n = 0;
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      bool all = true;
      for (int i = 0; i < sys.R() && all; ++i) all = mod_q(scaled_value(sys, i, x, y), q) == 0;
      n += all;
    }
  }
  return n;
}

// U(Z) by direct enumeration over a generous integer box.
inline Int brute_U(const LinearSystem& ls, const Rational& Z, bool transposed = false) {
  const LinearSystem s = transposed ? ls.transposed() : ls;
  const int n1 = s.n1(), n2 = s.n2();
  const Rational A = s.a * Z;
  const Rational B = Z / s.a;
  Int range = rfloor(A) + 2;
  std::vector<IntVector> us = {{}};
  for (int j = 0; j < n2; ++j) {
    std::vector<IntVector> next;
    for (const auto& p : us) {
      for (Int c = -range; c <= range; ++c) {
        if (!(Rational(c < 0 ? -c : c) < A)) continue;
        auto v = p;
        v.push_back(c);
        next.push_back(std::move(v));
      }
    }
    us = std::move(next);
  }
  Int count = 0;
  for (const auto& u : us) {
    Int ways = 1;
    for (int i = 0; i < n1 && ways; ++i) {
      Rational L = 0;
      for (int j = 0; j < n2; ++j) L += s.lambda[i][j] * u[j];
      // integers v with |L - v| < B
      Int w = 0;
      Int lo = rfloor(L - B);
      for (Int v = lo; Rational(v) < L + B; ++v) {
        Rational d = L - v;
        if (d < 0) d = -d;
        if (d < B) ++w;
      }
      ways *= w;
    }
    count += ways;
  }
  return count;
}

// Randomly shifted Halton QMC estimate of I(u) with a standard error from
// the spread over independent shifts.
struct QmcEstimate {
  std::complex<double> value;
  double stderr_ = 0;
};

inline double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

template <class Integrand>
QmcEstimate qmc(const FormSystem& sys, const BoxPair& unit_boxes, std::size_t points, int shifts,
                std::uint64_t seed, Integrand&& g) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  const int n1 = sys.n1(), n = sys.total_dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  std::vector<std::complex<double>> means;
  const std::size_t per = points / shifts;
  std::vector<double> x(n1), y(n - n1);
  for (int s = 0; s < shifts; ++s) {
    std::vector<double> shift(n);
    for (auto& v : shift) v = U01(rng);
    std::complex<long double> acc = 0;
    for (std::size_t k = 1; k <= per; ++k) {
      for (int c = 0; c < n; ++c) {
        double t = radical_inverse(k, primes[c]) + shift[c];
        if (t >= 1) t -= 1;
        const Interval& iv = c < n1 ? unit_boxes.b1[c] : unit_boxes.b2[c - n1];
        (c < n1 ? x[c] : y[c - n1]) = iv.lo + t * (iv.hi - iv.lo);
      }
      acc += g(x.data(), y.data());
    }
    double vol = 1;
    for (const auto& iv : unit_boxes.b1) vol *= iv.hi - iv.lo;
    for (const auto& iv : unit_boxes.b2) vol *= iv.hi - iv.lo;
    means.emplace_back(static_cast<double>(acc.real()) / per * vol,
                       static_cast<double>(acc.imag()) / per * vol);
  }
  std::complex<double> mean = 0;
  for (auto m : means) mean += m;
  mean /= static_cast<double>(shifts);
  double var = 0;
  for (auto m : means) var += std::norm(m - mean);
  var /= (shifts - 1);
  return {mean, std::sqrt(var / shifts)};
}

inline QmcEstimate qmc_oscillatory(const FormSystem& sys, const std::vector<double>& u,
                                   const BoxPair& unit_boxes, std::size_t points, int shifts,
                                   std::uint64_t seed) {
  return qmc(sys, unit_boxes, points, shifts, seed, [&](const double* x, const double* y) {
    double ph = 0;
    for (int i = 0; i < sys.R(); ++i) ph += u[i] * sys.eval_real(i, x, y);
    return std::complex<long double>(std::cos(2 * M_PI * ph), std::sin(2 * M_PI * ph));
  });
}

// Product of hat weights T max(0, 1 - T |F_i|).
inline QmcEstimate qmc_hat(const FormSystem& sys, double T, const BoxPair& unit_boxes,
                           std::size_t points, int shifts, std::uint64_t seed) {
  return qmc(sys, unit_boxes, points, shifts, seed, [&](const double* x, const double* y) {
    long double w = 1;
    for (int i = 0; i < sys.R(); ++i) {
      double f = sys.eval_real(i, x, y);
      w *= std::max(0.0, T * (1 - T * std::fabs(f)));
    }
    return std::complex<long double>(w, 0);
  });
}

}  // namespace oracle
