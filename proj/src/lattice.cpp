// lattice.cpp

#include "bihom/lattice.hpp"

#include "bihom/forms.hpp"

#include <algorithm>
#include <cmath>

namespace bihom {

namespace {

BigInt floor_q(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && Rational(q) != r) q -= 1;
  return q;
}

BigInt ceil_q(const Rational& r) {
  BigInt f = floor_q(r);
  return Rational(f) == r ? f : BigInt(f + 1);
}

// Integers c with |c| < bound (bound > 0): |c| <= ceil(bound) - 1.
Int open_radius(const Rational& bound) { return static_cast<Int>(ceil_q(bound)) - 1; }

// Integers in the open interval (c - w, c + w).
Int open_interval_count(const Rational& c, const Rational& w) {
  BigInt n = ceil_q(c + w) - floor_q(c - w) - 1;
  return n < 0 ? 0 : static_cast<Int>(n);
}

Rational rpow(const Rational& x, int e) {
  Rational r = 1;
  if (e >= 0) {
    for (int i = 0; i < e; ++i) r *= x;
  } else {
    for (int i = 0; i < -e; ++i) r /= x;
  }
  return r;
}

}  // namespace

RationalMatrix transpose(const RationalMatrix& m) {
  if (m.empty()) return {};
  RationalMatrix t(m.front().size(), std::vector<Rational>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.empty() || b.empty() || a.front().size() != b.size()) {
    throw std::invalid_argument("matrix shape mismatch");
  }
  RationalMatrix c(a.size(), std::vector<Rational>(b.front().size(), Rational(0)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < b[k].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

RationalMatrix identity_matrix(int n) {
  RationalMatrix m(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Rational determinant(RationalMatrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

RationalMatrix inverse(RationalMatrix m) {
  const std::size_t n = m.size();
  RationalMatrix inv = identity_matrix(static_cast<int>(n));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) throw std::invalid_argument("singular matrix");
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    Rational piv = m[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] /= piv;
      inv[c][k] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Rational f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

void LinearSystem::validate() const {
  if (lambda.empty() || lambda.front().empty()) throw std::invalid_argument("empty lambda");
  for (const auto& row : lambda) {
    if (row.size() != lambda.front().size()) throw std::invalid_argument("ragged lambda");
  }
  if (a <= 1) throw std::invalid_argument("a must exceed 1");
}

std::vector<std::vector<double>> LatticeBasis::as_double() const {
  std::vector<std::vector<double>> out;
  for (const auto& row : matrix) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(to_double(v));
    out.push_back(std::move(r));
  }
  return out;
}

DavenportLattices davenport_lattice(const LinearSystem& ls) {
  ls.validate();
  const int n1 = ls.n1(), n2 = ls.n2(), n = n1 + n2;
  const Rational a = ls.a, ainv = 1 / ls.a;
  DavenportLattices out;
  RationalMatrix L(n, std::vector<Rational>(n, Rational(0)));
  for (int j = 0; j < n2; ++j) L[j][j] = ainv;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) L[n2 + i][j] = a * ls.lambda[i][j];
    L[n2 + i][n2 + i] = a;
  }
  out.lambda.matrix = L;
  out.adjoint.matrix = inverse(transpose(L));
  RationalMatrix Mt(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n1; ++i) Mt[i][i] = ainv;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) Mt[n1 + j][i] = a * ls.lambda[i][j];
    Mt[n1 + j][n1 + j] = a;
  }
  out.adjoint_tilde.matrix = Mt;
  out.b = std::pow(to_double(a), static_cast<double>(n2 - n1) / n);
  out.lambda_nor = out.lambda.as_double();
  out.m_nor = out.adjoint_tilde.as_double();
  for (auto& row : out.lambda_nor) {
    for (auto& v : row) v *= out.b;
  }
  for (auto& row : out.m_nor) {
    for (auto& v : row) v /= out.b;
  }
  return out;
}

SuccessiveMinima successive_minima(const LatticeBasis& basis, std::size_t budget) {
  const int n = basis.dim();
  if (n < 1 || n > 6) throw std::invalid_argument("successive minima supports dim 1..6");
  for (const auto& row : basis.matrix) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("basis must be square");
  }
  if (determinant(basis.matrix) == 0) throw std::invalid_argument("degenerate basis");
  // Exact Gram matrix and its double Cholesky factor for the enumeration.
  RationalMatrix gram = multiply(transpose(basis.matrix), basis.matrix);
  std::vector<std::vector<double>> g(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g[i][j] = to_double(gram[i][j]);
  }
  std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0.0));
  std::vector<double> diag(n);
  {
    // g = U^t D U with U unit upper triangular (mu) and D diagonal.
    auto q = g;
    for (int i = 0; i < n; ++i) {
      diag[i] = q[i][i];
      if (!(diag[i] > 0)) throw std::invalid_argument("degenerate basis");
      for (int j = i + 1; j < n; ++j) mu[i][j] = q[i][j] / diag[i];
      for (int k = i + 1; k < n; ++k) {
        for (int l = k; l < n; ++l) q[k][l] -= mu[i][k] * diag[i] * mu[i][l];
      }
    }
  }
  auto norm2 = [&](const IntVector& u) {
    Rational s = 0;
    for (int i = 0; i < n; ++i) {
      if (u[i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (u[j] != 0) s += gram[i][j] * u[i] * u[j];
      }
    }
    return s;
  };

  double r2 = g[0][0];
  for (int i = 1; i < n; ++i) r2 = std::min(r2, g[i][i]);
  SuccessiveMinima out;
  while (true) {
    std::vector<std::pair<Rational, IntVector>> found;
    IntVector u(n, 0);
    const double limit = r2 * (1 + 1e-9) + 1e-300;
    std::size_t visited = 0;
    // Depth-first over coordinates n-1 .. 0.
    auto rec = [&](auto&& self, int i, double used) -> void {
      double c = 0;
      for (int j = i + 1; j < n; ++j) c -= mu[i][j] * static_cast<double>(u[j]);
      double room = (limit - used) / diag[i];
      if (room < 0) return;
      double w = std::sqrt(room);
      Int lo = static_cast<Int>(std::ceil(c - w)), hi = static_cast<Int>(std::floor(c + w));
      for (Int v = lo; v <= hi; ++v) {
        if (++visited > budget) throw BudgetExceeded("successive minima enumeration");
        u[i] = v;
        double t = static_cast<double>(v) - c;
        double nu = used + diag[i] * t * t;
        if (i == 0) {
          bool zero = std::all_of(u.begin(), u.end(), [](Int z) { return z == 0; });
          if (zero) continue;
          // One representative of each +-pair: last nonzero coordinate positive.
          int last = n - 1;
          while (u[last] == 0) --last;
          if (u[last] < 0) continue;
          Rational nr = norm2(u);
          if (nr <= Rational(exact_rational(r2))) found.emplace_back(nr, u);
        } else {
          self(self, i - 1, nu);
        }
      }
      u[i] = 0;
    };
    rec(rec, n - 1, 0.0);
    out.enumerated += visited;
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return x.second < y.second;
    });
    std::vector<std::vector<BigInt>> chosen;
    std::vector<Rational> sq;
    std::vector<IntVector> coeff;
    for (const auto& [nr, vec] : found) {
      auto trial = chosen;
      trial.emplace_back(vec.begin(), vec.end());
      if (bareiss_rank(trial) == static_cast<int>(trial.size())) {
        chosen = std::move(trial);
        sq.push_back(nr);
        coeff.push_back(vec);
        if (static_cast<int>(chosen.size()) == n) break;
      }
    }
    if (static_cast<int>(chosen.size()) == n) {
      out.squared = sq;
      out.coefficients = coeff;
      for (const auto& s : sq) out.values.push_back(std::sqrt(to_double(s)));
      out.radius = std::sqrt(r2);
      return out;
    }
    r2 *= 4;  // radius doubles
  }
}

Int128 count_U(const LinearSystem& ls_in, const Rational& Z, bool transposed, double budget) {
  ls_in.validate();
  if (Z <= 0) throw std::invalid_argument("Z must be positive");
  const LinearSystem ls = transposed ? ls_in.transposed() : ls_in;
  const int n1 = ls.n1(), n2 = ls.n2();
  const Int r = open_radius(ls.a * Z);
  const Rational w = Z / ls.a;
  double work = std::pow(2.0 * static_cast<double>(r) + 1, n2);
  if (budget > 0 && work > budget) throw BudgetExceeded("U(Z) enumeration");
  if (r < 0) return 0;
  Int128 total = 0;
  IntVector u(n2, -r);
  while (true) {
    Int128 prod = 1;
    for (int i = 0; i < n1 && prod != 0; ++i) {
      Rational c = 0;
      for (int j = 0; j < n2; ++j) {
        if (u[j] != 0) c += ls.lambda[i][j] * u[j];
      }
      prod *= open_interval_count(c, w);
    }
    total += prod;
    int k = n2 - 1;
    while (k >= 0 && u[k] == r) u[k--] = -r;
    if (k < 0) break;
    ++u[k];
  }
  return total;
}

ShrinkingCheck check_shrinking_lemma(const LinearSystem& ls, const Rational& Z1,
                                     const Rational& Z2) {
  if (!(Z1 > 0 && Z1 <= Z2 && Z2 <= 1)) {
    throw std::invalid_argument("need 0 < Z1 <= Z2 <= 1");
  }
  ShrinkingCheck out;
  out.u_z1 = count_U(ls, Z1, false);
  out.u_z2 = count_U(ls, Z2, false);
  out.ut_z1 = count_U(ls, Z1, true);
  const int n1 = ls.n1(), n2 = ls.n2();
  Rational first = rpow(Z2 / Z1, n2) * Rational(to_bigint(out.u_z1));
  Rational second = rpow(Z2, n2) / rpow(Z1, n1) * rpow(ls.a, n2 - n1) * Rational(to_bigint(out.ut_z1));
  out.bound = std::max(first, second);
  out.ratio = Rational(to_bigint(out.u_z2)) / out.bound;
  return out;
}

std::vector<double> mahler_products(const LinearSystem& ls) {
  DavenportLattices d = davenport_lattice(ls);
  SuccessiveMinima R = successive_minima(d.lambda);
  SuccessiveMinima S = successive_minima(d.adjoint_tilde);
  const int n = d.lambda.dim();
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    Rational prod2 = R.squared[k] * S.squared[n - 1 - k];
    out.push_back(std::sqrt(to_double(prod2)));
  }
  return out;
}

Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi, int den) {
  BigInt klo = ceil_q(lo * den), khi = floor_q(hi * den);
  if (khi < klo) throw std::invalid_argument("empty rational range");
  auto span = static_cast<std::uint64_t>(khi - klo + 1);
  BigInt k = klo + BigInt(rng() % span);
  return Rational(k, den);
}

LinearSystem random_linear_system(std::mt19937_64& rng, int n1, int n2, const RandomFamily& fam) {
  LinearSystem ls;
  ls.lambda.assign(n1, std::vector<Rational>(n2));
  for (auto& row : ls.lambda) {
    for (auto& v : row) v = random_rational(rng, -fam.lambda_abs, fam.lambda_abs, fam.denominator);
  }
  ls.a = random_rational(rng, fam.a_lo, fam.a_hi, fam.denominator);
  return ls;
}

std::vector<Lemma51Row> lemma51_batch(int instances, std::uint64_t seed, const RandomFamily& fam) {
  std::mt19937_64 rng(seed);
  std::vector<Lemma51Row> rows;
  for (int t = 0; t < instances; ++t) {
    Lemma51Row row;
    row.instance = t;
    row.n1 = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(fam.max_n));
    row.n2 = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(fam.max_n));
    LinearSystem ls = random_linear_system(rng, row.n1, row.n2, fam);
    const int zden = 2 * fam.denominator;
    Rational z1 = random_rational(rng, Rational(1, zden), 1, zden);
    Rational z2 = random_rational(rng, Rational(1, zden), 1, zden);
    if (z1 > z2) std::swap(z1, z2);
    row.a = ls.a;
    row.z1 = z1;
    row.z2 = z2;
    row.check = check_shrinking_lemma(ls, z1, z2);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bihom
