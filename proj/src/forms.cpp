// forms.cpp

#include "bihom/forms.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace bihom {

namespace {

int sum_of(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

std::vector<int> parse_exponents(const std::string& text, const std::string& line) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty exponent in record '" + line + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad exponent '" + item + "' in record '" + line + "'");
    }
    if (used != item.size() || v < 0) {
      throw std::invalid_argument("bad exponent '" + item + "' in record '" + line + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("missing exponents in record '" + line + "'");
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

// Exponent vector of a sorted index multiset.
std::vector<int> exponents_of(std::span<const int> idx, int n) {
  std::vector<int> e(n, 0);
  for (int i : idx) {
    if (i < 0 || i >= n) throw std::out_of_range("tensor index out of range");
    ++e[i];
  }
  return e;
}

BigInt orderings(const std::vector<int>& e) {
  int d = sum_of(e);
  BigInt r = factorial(d);
  for (int k : e) r /= factorial(k);
  return r;
}

Int128 checked_mul(Int128 a, Int128 b) {
  Int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("128-bit overflow in Gamma");
  return r;
}

Int128 checked_add(Int128 a, Int128 b) {
  Int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("128-bit overflow in Gamma");
  return r;
}

// Permanent of rows[a][idx[b]] over all orderings of the column list.
Int128 permanent(const std::vector<IntVector>& vecs, std::vector<int> idx) {
  if (idx.empty()) return 1;
  std::sort(idx.begin(), idx.end());
  // Repeated columns: summing over distinct orderings and multiplying by
  // the stabiliser size gives the same value as all d! permutations.
  Int128 stab = 1;
  for (std::size_t i = 0, run = 1; i < idx.size(); ++i) {
    if (i > 0 && idx[i] == idx[i - 1]) {
      ++run;
      stab *= static_cast<Int128>(run);
    } else {
      run = 1;
    }
  }
  Int128 total = 0;
  do {
    Int128 prod = 1;
    for (std::size_t a = 0; a < idx.size(); ++a) prod = checked_mul(prod, vecs[a][idx[a]]);
    total = checked_add(total, prod);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return checked_mul(total, stab);
}

std::vector<int> multiset_of(const std::vector<int>& e) {
  std::vector<int> idx;
  for (std::size_t j = 0; j < e.size(); ++j) idx.insert(idx.end(), e[j], static_cast<int>(j));
  return idx;
}

template <class T>
T power(T base, int e) {
  T r = T(1);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

double pairwise(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return v[0];
  std::size_t h = n / 2;
  return pairwise(v, h) + pairwise(v + h, n - h);
}

}  // namespace

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

MonomialRecord parse_monomial_record(const std::string& line) {
  std::istringstream in(line);
  std::string form, coeff, xe, ye, extra;
  if (!(in >> form >> coeff >> xe >> ye)) {
    throw std::invalid_argument("monomial record needs 4 fields: '" + line + "'");
  }
  if (in >> extra) throw std::invalid_argument("trailing text in monomial record: '" + line + "'");
  MonomialRecord rec;
  std::size_t used = 0;
  try {
    rec.form = std::stoi(form, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != form.size() || rec.form < 0) {
    throw std::invalid_argument("bad form index in record '" + line + "'");
  }
  rec.monomial.coeff = parse_rational(coeff);
  rec.monomial.xexp = parse_exponents(xe, line);
  rec.monomial.yexp = parse_exponents(ye, line);
  return rec;
}

std::string format_monomial_record(const MonomialRecord& rec) {
  return std::to_string(rec.form) + " " + to_string(rec.monomial.coeff) + " " +
         join(rec.monomial.xexp) + " " + join(rec.monomial.yexp);
}

BihomogeneousForm::BihomogeneousForm(int n1, int n2, int d1, int d2,
                                     std::vector<Monomial> monomials)
    : n1_(n1), n2_(n2), d1_(d1), d2_(d2) {
  if (n1 < 1 || n2 < 1 || d1 < 0 || d2 < 0) throw std::invalid_argument("bad form dimensions");
  if (monomials.empty()) throw std::invalid_argument("empty form");
  std::map<std::pair<std::vector<int>, std::vector<int>>, Rational> merged;
  for (auto& m : monomials) {
    if (static_cast<int>(m.xexp.size()) != n1 || static_cast<int>(m.yexp.size()) != n2) {
      throw std::invalid_argument("inconsistent n1/n2 across forms");
    }
    if (std::any_of(m.xexp.begin(), m.xexp.end(), [](int e) { return e < 0; }) ||
        std::any_of(m.yexp.begin(), m.yexp.end(), [](int e) { return e < 0; })) {
      throw std::invalid_argument("negative exponent");
    }
    if (sum_of(m.xexp) != d1 || sum_of(m.yexp) != d2) {
      throw std::invalid_argument("bidegree mismatch");
    }
    merged[{m.xexp, m.yexp}] += m.coeff;
  }
  for (auto& [key, c] : merged) {
    if (c == 0) continue;
    monomials_.push_back({c, key.first, key.second});
    lcm_ = boost::multiprecision::lcm(lcm_, denominator(c));
  }
}

Rational BihomogeneousForm::tensor_entry(std::span<const int> j, std::span<const int> k) const {
  if (static_cast<int>(j.size()) != d1_ || static_cast<int>(k.size()) != d2_) {
    throw std::invalid_argument("tensor index shape mismatch");
  }
  auto ex = exponents_of(j, n1_);
  auto ey = exponents_of(k, n2_);
  for (const auto& m : monomials_) {
    if (m.xexp == ex && m.yexp == ey) {
      return m.coeff / Rational(orderings(ex) * orderings(ey));
    }
  }
  return 0;
}

Rational BihomogeneousForm::contract(std::span<const Rational> x,
                                     std::span<const Rational> y) const {
  if (static_cast<int>(x.size()) != n1_ || static_cast<int>(y.size()) != n2_) {
    throw std::invalid_argument("length mismatch");
  }
  Rational total = 0;
  std::vector<int> j(d1_, 0), k(d2_, 0);
  // Odometer over [n1]^d1 x [n2]^d2.
  auto advance = [](std::vector<int>& idx, int n) {
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (++idx[p] < n) return true;
      idx[p] = 0;
    }
    return false;
  };
  do {
    Rational xs = 1;
    for (int a : j) xs *= x[a];
    if (xs == 0) continue;
    std::fill(k.begin(), k.end(), 0);
    do {
      Rational c = tensor_entry(j, k);
      if (c == 0) continue;
      Rational ys = 1;
      for (int b : k) ys *= y[b];
      total += c * xs * ys;
    } while (advance(k, n2_));
  } while (advance(j, n1_));
  return total;
}

Rational BihomogeneousForm::eval(std::span<const Rational> x, std::span<const Rational> y) const {
  if (static_cast<int>(x.size()) != n1_ || static_cast<int>(y.size()) != n2_) {
    throw std::invalid_argument("length mismatch");
  }
  Rational total = 0;
  for (const auto& m : monomials_) {
    Rational v = m.coeff;
    for (int j = 0; j < n1_; ++j) v *= power(x[j], m.xexp[j]);
    for (int k = 0; k < n2_; ++k) v *= power(y[k], m.yexp[k]);
    total += v;
  }
  return total;
}

FormSystem::FormSystem(std::vector<BihomogeneousForm> forms) : forms_(std::move(forms)) {
  if (forms_.empty()) throw std::invalid_argument("system needs R >= 1 forms");
  const auto& f0 = forms_.front();
  n1_ = f0.n1();
  n2_ = f0.n2();
  d1_ = f0.d1();
  d2_ = f0.d2();
  for (const auto& f : forms_) {
    if (f.n1() != n1_ || f.n2() != n2_) throw std::invalid_argument("inconsistent n1/n2 across forms");
    if (f.d1() != d1_ || f.d2() != d2_) throw std::invalid_argument("bidegree mismatch");
  }
  for (const auto& f : forms_) {
    BigInt s = f.denominator_lcm();
    std::vector<Term> terms;
    for (const auto& m : f.monomials()) {
      Rational c = m.coeff * Rational(s);
      BigInt ci = numerator(c);
      if (ci > BigInt(INT64_MAX) || ci < BigInt(INT64_MIN)) {
        throw std::overflow_error("scaled coefficient exceeds 64 bits");
      }
      terms.push_back({static_cast<Int>(ci), m.xexp, m.yexp});
    }
    terms_.push_back(std::move(terms));
    scale_.push_back(s);
  }
}

const BihomogeneousForm& FormSystem::form(int i) const {
  if (i < 0 || i >= R()) throw std::out_of_range("form index out of range");
  return forms_[i];
}

const std::vector<Term>& FormSystem::terms(int i) const {
  if (i < 0 || i >= R()) throw std::out_of_range("form index out of range");
  return terms_[i];
}

const BigInt& FormSystem::scale(int i) const {
  if (i < 0 || i >= R()) throw std::out_of_range("form index out of range");
  return scale_[i];
}

bool FormSystem::has_zero_form() const {
  return std::any_of(forms_.begin(), forms_.end(), [](const auto& f) { return f.is_zero(); });
}

void FormSystem::check_lengths(std::size_t xs, std::size_t ys) const {
  if (static_cast<int>(xs) != n1_ || static_cast<int>(ys) != n2_) {
    throw std::invalid_argument("length mismatch");
  }
}

Rational FormSystem::eval_form(int i, std::span<const Int> x, std::span<const Int> y) const {
  check_lengths(x.size(), y.size());
  std::vector<Rational> xr(x.begin(), x.end()), yr(y.begin(), y.end());
  return form(i).eval(xr, yr);
}

Rational FormSystem::eval_form(int i, std::span<const Rational> x,
                               std::span<const Rational> y) const {
  check_lengths(x.size(), y.size());
  return form(i).eval(x, y);
}

Int128 FormSystem::eval_int(int i, const Int* x, const Int* y) const {
  Int128 total = 0;
  for (const auto& t : terms_[i]) {
    Int128 v = t.coeff;
    for (int j = 0; j < n1_; ++j) v *= power<Int128>(x[j], t.xexp[j]);
    for (int k = 0; k < n2_; ++k) v *= power<Int128>(y[k], t.yexp[k]);
    total += v;
  }
  return total;
}

double FormSystem::eval_real(int i, const double* x, const double* y) const {
  double total = 0;
  for (const auto& t : terms_[i]) {
    double v = static_cast<double>(t.coeff);
    for (int j = 0; j < n1_; ++j) v *= power(x[j], t.xexp[j]);
    for (int k = 0; k < n2_; ++k) v *= power(y[k], t.yexp[k]);
    total += v;
  }
  return total;
}

Int FormSystem::eval_mod(int i, const Int* x, const Int* y, Int m) const {
  Int total = 0;
  for (const auto& t : terms_[i]) {
    Int v = mod(t.coeff, m);
    for (int j = 0; j < n1_; ++j) {
      for (int e = 0; e < t.xexp[j]; ++e) v = static_cast<Int>((Int128)v * mod(x[j], m) % m);
    }
    for (int k = 0; k < n2_; ++k) {
      for (int e = 0; e < t.yexp[k]; ++e) v = static_cast<Int>((Int128)v * mod(y[k], m) % m);
    }
    total = (total + v) % m;
  }
  return total;
}

double FormSystem::partial_real(int i, Axis a, int j, const double* x, const double* y) const {
  double total = 0;
  for (const auto& t : terms_[i]) {
    const auto& ev = a == Axis::x ? t.xexp : t.yexp;
    if (ev[j] == 0) continue;
    double v = static_cast<double>(t.coeff) * ev[j];
    for (int c = 0; c < n1_; ++c) {
      v *= power(x[c], t.xexp[c] - (a == Axis::x && c == j ? 1 : 0));
    }
    for (int c = 0; c < n2_; ++c) {
      v *= power(y[c], t.yexp[c] - (a == Axis::y && c == j ? 1 : 0));
    }
    total += v;
  }
  return total;
}

Int FormSystem::partial_mod(int i, Axis a, int j, const Int* x, const Int* y, Int m) const {
  Int total = 0;
  for (const auto& t : terms_[i]) {
    const auto& ev = a == Axis::x ? t.xexp : t.yexp;
    if (ev[j] == 0) continue;
    Int v = mod(static_cast<Int>((Int128)mod(t.coeff, m) * ev[j] % m), m);
    for (int c = 0; c < n1_; ++c) {
      int e = t.xexp[c] - (a == Axis::x && c == j ? 1 : 0);
      for (int r = 0; r < e; ++r) v = static_cast<Int>((Int128)v * mod(x[c], m) % m);
    }
    for (int c = 0; c < n2_; ++c) {
      int e = t.yexp[c] - (a == Axis::y && c == j ? 1 : 0);
      for (int r = 0; r < e; ++r) v = static_cast<Int>((Int128)v * mod(y[c], m) % m);
    }
    total = (total + v) % m;
  }
  return total;
}

Int128 FormSystem::gamma(int i, const VectorTuple& tuple) const {
  if (static_cast<int>(tuple.xs.size()) != d1_ || static_cast<int>(tuple.ys.size()) != d2_) {
    throw std::invalid_argument("tuple shape mismatch");
  }
  for (const auto& v : tuple.xs) {
    if (static_cast<int>(v.size()) != n1_) throw std::invalid_argument("tuple shape mismatch");
  }
  for (const auto& v : tuple.ys) {
    if (static_cast<int>(v.size()) != n2_) throw std::invalid_argument("tuple shape mismatch");
  }
  // For c x^J y^K the symmetrised contraction times d1! d2! collapses to
  // c * per(x^(a)_{J_b}) * per(y^(a)_{K_b}).
  Int128 total = 0;
  for (const auto& t : terms(i)) {
    Int128 px = permanent(tuple.xs, multiset_of(t.xexp));
    if (px == 0) continue;
    Int128 py = permanent(tuple.ys, multiset_of(t.yexp));
    total = checked_add(total, checked_mul(checked_mul(t.coeff, px), py));
  }
  return total;
}

LinearFiber FormSystem::linear_fiber_for(Axis fiber) const {
  if (degree(fiber) != 1) throw std::invalid_argument("system is not linear in that block");
  LinearFiber lf;
  lf.fiber_ = fiber;
  lf.r_ = R();
  lf.m_ = dim(fiber);
  lf.outer_dim_ = dim(other(fiber));
  lf.entries_.resize(static_cast<std::size_t>(lf.r_) * lf.m_);
  for (int i = 0; i < R(); ++i) {
    for (const auto& t : terms_[i]) {
      const auto& fe = fiber == Axis::x ? t.xexp : t.yexp;
      const auto& oe = fiber == Axis::x ? t.yexp : t.xexp;
      int k = static_cast<int>(std::find(fe.begin(), fe.end(), 1) - fe.begin());
      lf.entries_[i * lf.m_ + k].push_back({t.coeff, oe});
    }
  }
  return lf;
}

std::optional<LinearFiber> FormSystem::linear_fiber(std::optional<Axis> prefer) const {
  if (prefer && degree(*prefer) == 1) return linear_fiber_for(*prefer);
  if (d2_ == 1) return linear_fiber_for(Axis::y);
  if (d1_ == 1) return linear_fiber_for(Axis::x);
  return std::nullopt;
}

FormSystem make_system(const std::vector<std::vector<Monomial>>& forms, int R, int n1, int n2,
                       int d1, int d2) {
  if (R < 1) throw std::invalid_argument("R must be at least 1");
  if (static_cast<int>(forms.size()) != R) {
    throw std::invalid_argument("expected " + std::to_string(R) + " forms, got " +
                                std::to_string(forms.size()));
  }
  std::vector<BihomogeneousForm> out;
  for (const auto& f : forms) out.emplace_back(n1, n2, d1, d2, f);
  return FormSystem(std::move(out));
}

FormSystem make_system(const std::vector<MonomialRecord>& records, int R, int n1, int n2, int d1,
                       int d2) {
  if (R < 1) throw std::invalid_argument("R must be at least 1");
  std::vector<std::vector<Monomial>> forms(R);
  for (const auto& r : records) {
    if (r.form < 0 || r.form >= R) {
      throw std::invalid_argument("form index " + std::to_string(r.form) + " out of range");
    }
    forms[r.form].push_back(r.monomial);
  }
  return make_system(forms, R, n1, n2, d1, d2);
}

double multilinear_eval(const FormSystem& sys, std::span<const double> alpha,
                        const VectorTuple& tuple) {
  if (static_cast<int>(alpha.size()) != sys.R()) throw std::invalid_argument("alpha length mismatch");
  std::vector<double> parts(alpha.size());
  for (int i = 0; i < sys.R(); ++i) {
    parts[i] = alpha[i] * static_cast<double>(sys.gamma(i, tuple));
  }
  return pairwise(parts.data(), parts.size());
}

int bareiss_rank(std::vector<std::vector<BigInt>> rows) {
  if (rows.empty()) return 0;
  const std::size_t m = rows.size(), n = rows.front().size();
  BigInt prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = rank;
    while (piv < m && rows[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = rank + 1; r < m; ++r) {
      for (std::size_t c = col + 1; c < n; ++c) {
        rows[r][c] = (rows[rank][col] * rows[r][c] - rows[r][col] * rows[rank][c]) / prev;
      }
      rows[r][col] = 0;
    }
    prev = rows[rank][col];
    ++rank;
  }
  return static_cast<int>(rank);
}

int rank_mod_p(std::vector<std::vector<Int>> rows, Int p) {
  if (rows.empty()) return 0;
  const std::size_t m = rows.size(), n = rows.front().size();
  auto inv = [p](Int a) {
    Int r = 1, e = p - 2;
    a = mod(a, p);
    while (e > 0) {
      if (e & 1) r = static_cast<Int>((Int128)r * a % p);
      a = static_cast<Int>((Int128)a * a % p);
      e >>= 1;
    }
    return r;
  };
  for (auto& row : rows) {
    for (auto& v : row) v = mod(v, p);
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = rank;
    while (piv < m && rows[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(rows[piv], rows[rank]);
    Int iv = inv(rows[rank][col]);
    for (std::size_t r = rank + 1; r < m; ++r) {
      Int f = static_cast<Int>((Int128)rows[r][col] * iv % p);
      if (f == 0) continue;
      for (std::size_t c = col; c < n; ++c) {
        rows[r][c] = mod(rows[r][c] - static_cast<Int>((Int128)f * rows[rank][c] % p), p);
      }
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

int jacobian_rank(const FormSystem& sys, std::span<const Rational> x,
                  std::span<const Rational> y, Axis axis) {
  if (static_cast<int>(x.size()) != sys.n1() || static_cast<int>(y.size()) != sys.n2()) {
    throw std::invalid_argument("length mismatch");
  }
  const int cols = sys.dim(axis);
  std::vector<std::vector<BigInt>> rows;
  for (int i = 0; i < sys.R(); ++i) {
    std::vector<Rational> row(cols, Rational(0));
    for (const auto& m : sys.form(i).monomials()) {
      const auto& ev = axis == Axis::x ? m.xexp : m.yexp;
      for (int j = 0; j < cols; ++j) {
        if (ev[j] == 0) continue;
        Rational v = m.coeff * ev[j];
        for (int c = 0; c < sys.n1(); ++c) {
          v *= power(x[c], m.xexp[c] - (axis == Axis::x && c == j ? 1 : 0));
        }
        for (int c = 0; c < sys.n2(); ++c) {
          v *= power(y[c], m.yexp[c] - (axis == Axis::y && c == j ? 1 : 0));
        }
        row[j] += v;
      }
    }
    BigInt l = 1;
    for (const auto& v : row) l = boost::multiprecision::lcm(l, denominator(v));
    std::vector<BigInt> ir;
    for (const auto& v : row) ir.push_back(numerator(v * Rational(l)));
    rows.push_back(std::move(ir));
  }
  return bareiss_rank(std::move(rows));
}

}  // namespace bihom
