// expsum.cpp

#include "bihom/expsum.hpp"

#include "bihom/numtheory.hpp"

#include <cmath>
#include <numbers>

namespace bihom {

namespace {

// Sum_{t=lo}^{hi} e(theta t) in closed form.
Complex geometric(double theta, Int lo, Int hi) {
  if (hi < lo) return 0;
  const double L = static_cast<double>(hi - lo + 1);
  theta -= std::round(theta);
  if (theta == 0.0) return L;
  const double mid = 0.5 * static_cast<double>(lo + hi);
  double ratio = std::sin(std::numbers::pi * theta * L) / std::sin(std::numbers::pi * theta);
  return unit(theta * mid) * ratio;
}

void check_budget(double work, double budget, const std::string& what) {
  if (budget > 0 && work > budget) {
    throw BudgetExceeded(what + " needs " + std::to_string(work) + " residues, budget " +
                         std::to_string(budget));
  }
}

// Lexicographic odometer over [0, q)^n.
bool next_residue(IntVector& v, Int q) {
  for (std::size_t i = v.size(); i-- > 0;) {
    if (++v[i] < q) return true;
    v[i] = 0;
  }
  return false;
}

Int add_mod(Int a, Int b, Int q) {
  Int s = a + b;
  return s >= q ? s - q : s;
}

}  // namespace

Complex unit(double t) {
  double a = 2.0 * std::numbers::pi * t;
  return {std::cos(a), std::sin(a)};
}

double frac_product(double alpha, Int128 v) {
  if (v == 0 || alpha == 0.0) return 0.0;
  int e = 0;
  double mant = std::frexp(alpha, &e);
  auto m = static_cast<Int>(std::ldexp(mant, 53));
  e -= 53;  // alpha = m * 2^e exactly
  if (e >= 0) return 0.0;
  const int k = -e;
  Int128 prod;
  const bool small_v = v < (Int128(1) << 73) && v > -(Int128(1) << 73);
  if (k < 127 && small_v && !__builtin_mul_overflow(static_cast<Int128>(m), v, &prod)) {
    // prod mod 2^k, then scale; exact up to the final rounding.
    UInt128 mask = (UInt128(1) << k) - 1;
    UInt128 r = static_cast<UInt128>(prod) & mask;
    return std::ldexp(static_cast<long double>(r), -k);
  }
  long double t = static_cast<long double>(alpha) * static_cast<long double>(v);
  t -= std::floor(t);
  return static_cast<double>(t);
}

double dist_to_int(double t) { return std::abs(t - std::round(t)); }

void PairwiseAccumulator::add(Complex v) {
  block_ += v;
  if (++in_block_ < kBlock) return;
  Complex carry = block_;
  block_ = 0;
  in_block_ = 0;
  for (std::size_t lvl = 0;; ++lvl) {
    if (lvl == levels_.size()) {
      levels_.push_back(carry);
      used_.push_back(true);
      return;
    }
    if (!used_[lvl]) {
      levels_[lvl] = carry;
      used_[lvl] = true;
      return;
    }
    carry += levels_[lvl];
    used_[lvl] = false;
  }
}

Complex PairwiseAccumulator::total() const {
  Complex t = block_;
  for (std::size_t lvl = 0; lvl < levels_.size(); ++lvl) {
    if (used_[lvl]) t += levels_[lvl];
  }
  return t;
}

Complex weyl_sum(const FormSystem& sys, std::span<const double> alpha, const BoxPair& boxes,
                 SumStrategy strategy) {
  if (static_cast<int>(alpha.size()) != sys.R()) throw std::invalid_argument("alpha length mismatch");
  boxes.validate(sys.n1(), sys.n2());
  IntBox bx = scaled_box(boxes.b1, boxes.p1, boxes.boundary);
  IntBox by = scaled_box(boxes.b2, boxes.p2, boxes.boundary);
  PairwiseAccumulator acc;
  const bool linear = sys.d1() == 1 || sys.d2() == 1;
  if (strategy == SumStrategy::fibered && !linear) {
    throw std::invalid_argument("fibered strategy needs a system linear in x or in y");
  }
  if (strategy == SumStrategy::direct || !linear) {
    for_each_point(bx, [&](const Int* x) {
      for_each_point(by, [&](const Int* y) {
        double ph = 0;
        for (int i = 0; i < sys.R(); ++i) ph += frac_product(alpha[i], sys.eval_int(i, x, y));
        acc.add(unit(ph - std::floor(ph)));
      });
    });
    return acc.total();
  }
  Axis fiber = sys.d2() == 1 ? Axis::y : Axis::x;
  if (sys.d1() == 1 && sys.d2() == 1 && bx.size() > by.size()) fiber = Axis::x;
  const IntBox& outer = fiber == Axis::y ? bx : by;
  const IntBox& fbox = fiber == Axis::y ? by : bx;
  LinearFiber lf = sys.linear_fiber_for(fiber);
  const int m = lf.fiber_dim(), r = lf.forms();
  std::vector<Int128> c(static_cast<std::size_t>(r) * m), ov(outer.dim());
  if (fbox.empty()) return 0;
  for_each_point(outer, [&](const Int* o) {
    for (int j = 0; j < outer.dim(); ++j) ov[j] = o[j];
    lf.coefficients<Int128>(ov.data(), c.data());
    Complex prod = 1;
    for (int k = 0; k < m; ++k) {
      double th = 0;
      for (int i = 0; i < r; ++i) th += frac_product(alpha[i], c[i * m + k]);
      prod *= geometric(th - std::floor(th), fbox.lo[k], fbox.hi[k]);
    }
    acc.add(prod);
  });
  return acc.total();
}

Complex histogram_value(const std::vector<Int>& hist) {
  const Int q = static_cast<Int>(hist.size());
  PairwiseAccumulator acc;
  for (Int m = 0; m < q; ++m) {
    if (hist[m] != 0) acc.add(static_cast<double>(hist[m]) * unit(static_cast<double>(m) / q));
  }
  return acc.total();
}

CompleteSum complete_sum(const FormSystem& sys, const IntVector& a, Int q,
                         const ExpSumOptions& opts) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  if (static_cast<int>(a.size()) != sys.R()) throw std::invalid_argument("a length mismatch");
  for (Int ai : a) {
    if (ai < 0 || ai >= q) throw std::invalid_argument("a_i must lie in [0, q)");
  }
  CompleteSum out;
  out.histogram.assign(q, 0);
  const bool linear = sys.d1() == 1 || sys.d2() == 1;
  const bool fibered =
      linear && opts.strategy != SumStrategy::direct;
  if (opts.strategy == SumStrategy::fibered && !linear) {
    throw std::invalid_argument("fibered strategy needs a system linear in x or in y");
  }
  if (!fibered) {
    const int n = sys.total_dim();
    check_budget(std::pow(static_cast<double>(q), n), opts.budget, "complete sum");
    IntVector x(sys.n1(), 0), y(sys.n2(), 0);
    do {
      std::fill(y.begin(), y.end(), 0);
      do {
        Int v = 0;
        for (int i = 0; i < sys.R(); ++i) {
          if (a[i] == 0) continue;
          v = add_mod(v, static_cast<Int>((Int128)a[i] * sys.eval_mod(i, x.data(), y.data(), q) % q), q);
        }
        ++out.histogram[v];
      } while (next_residue(y, q));
    } while (next_residue(x, q));
  } else {
    Axis fiber = sys.d2() == 1 ? Axis::y : Axis::x;
    if (sys.d1() == 1 && sys.d2() == 1 && sys.n1() > sys.n2()) fiber = Axis::x;
    LinearFiber lf = sys.linear_fiber_for(fiber);
    const int m = lf.fiber_dim(), r = lf.forms();
    check_budget(std::pow(static_cast<double>(q), lf.outer_dim()), opts.budget, "complete sum");
    // y -> g . y mod q hits each multiple of gcd(g, q) exactly q^m / (q / gcd) times.
    const Int qm1 = ipow(q, m - 1);
    IntVector o(lf.outer_dim(), 0);
    std::vector<Int128> c(static_cast<std::size_t>(r) * m), ov(lf.outer_dim());
    do {
      for (int j = 0; j < lf.outer_dim(); ++j) ov[j] = o[j];
      lf.coefficients<Int128>(ov.data(), c.data());
      Int g = q;
      for (int k = 0; k < m; ++k) {
        Int128 s = 0;
        for (int i = 0; i < r; ++i) s += static_cast<Int128>(a[i]) * c[i * m + k];
        g = gcd(g, static_cast<Int>(s % q));
      }
      for (Int v = 0; v < q; v += g) out.histogram[v] += qm1 * g;
    } while (next_residue(o, q));
  }
  out.value = histogram_value(out.histogram);
  return out;
}

std::vector<Int> joint_histogram(const FormSystem& sys, Int q, const ExpSumOptions& opts) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  const int R = sys.R();
  const Int cells = ipow(q, R);
  std::vector<Int> hist(cells, 0);
  const bool linear = sys.d1() == 1 || sys.d2() == 1;
  if (!linear || opts.strategy == SumStrategy::direct) {
    check_budget(std::pow(static_cast<double>(q), sys.total_dim()), opts.budget, "joint histogram");
    IntVector x(sys.n1(), 0), y(sys.n2(), 0);
    do {
      std::fill(y.begin(), y.end(), 0);
      do {
        Int idx = 0;
        for (int i = R - 1; i >= 0; --i) idx = idx * q + sys.eval_mod(i, x.data(), y.data(), q);
        ++hist[idx];
      } while (next_residue(y, q));
    } while (next_residue(x, q));
    return hist;
  }
  Axis fiber = sys.d2() == 1 ? Axis::y : Axis::x;
  if (sys.d1() == 1 && sys.d2() == 1 && sys.n1() > sys.n2()) fiber = Axis::x;
  LinearFiber lf = sys.linear_fiber_for(fiber);
  const int m = lf.fiber_dim();
  check_budget(std::pow(static_cast<double>(q), lf.outer_dim()) * static_cast<double>(cells),
               opts.budget, "joint histogram");
  const Int qm = ipow(q, m);
  IntVector o(lf.outer_dim(), 0);
  std::vector<Int128> c(static_cast<std::size_t>(R) * m), ov(lf.outer_dim());
  std::vector<IntVector> cols(m, IntVector(R));
  do {
    for (int j = 0; j < lf.outer_dim(); ++j) ov[j] = o[j];
    lf.coefficients<Int128>(ov.data(), c.data());
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < R; ++i) cols[k][i] = static_cast<Int>(c[i * m + k] % q);
    }
    ModLattice lat = column_lattice_mod(cols, R, q);
    // |image| = q^R / index; every image point has the same multiplicity.
    const Int image = cells / lat.index();
    const Int mult = qm / image;
    IntVector t(R, 0), lim(R);
    for (int s = 0; s < R; ++s) lim[s] = q / lat.diag(s);
    while (true) {
      IntVector v(R, 0);
      for (int s = 0; s < R; ++s) {
        for (int i = 0; i < R; ++i) v[i] = mod(v[i] + t[s] * lat.basis[s][i], q);
      }
      Int idx = 0;
      for (int i = R - 1; i >= 0; --i) idx = idx * q + v[i];
      hist[idx] += mult;
      int s = R - 1;
      while (s >= 0 && ++t[s] == lim[s]) t[s--] = 0;
      if (s < 0) break;
    }
  } while (next_residue(o, q));
  return hist;
}

Int128 count_near_solutions(const FormSystem& sys, std::span<const double> alpha, double p1,
                            double p2, double bound, Axis axis, const NearSolutionOptions& opts) {
  if (static_cast<int>(alpha.size()) != sys.R()) throw std::invalid_argument("alpha length mismatch");
  if (!(p1 >= 1) || !(p2 >= 1) || !(bound > 0)) throw std::invalid_argument("bad counter range");
  const Int r1 = static_cast<Int>(std::ceil(p1)) - 1;
  const Int r2 = static_cast<Int>(std::ceil(p2)) - 1;
  const int n1 = sys.n1(), n2 = sys.n2();
  int sx = sys.d1(), sy = sys.d2();
  if (axis == Axis::x) {
    if (sx < 1) throw std::invalid_argument("axis X needs d1 >= 1");
    --sx;
  } else {
    if (sy < 1) throw std::invalid_argument("axis Y needs d2 >= 1");
    --sy;
  }
  IntBox box;
  for (int s = 0; s < sx * n1; ++s) {
    box.lo.push_back(-r1);
    box.hi.push_back(r1);
  }
  for (int s = 0; s < sy * n2; ++s) {
    box.lo.push_back(-r2);
    box.hi.push_back(r2);
  }
  if (opts.budget > 0 && static_cast<double>(box.size()) > opts.budget) {
    throw BudgetExceeded("near-solution counter has " + std::to_string(double(box.size())) +
                         " tuples");
  }
  const double threshold = 1.0 / bound;
  const int free_len = axis == Axis::x ? n1 : n2;
  VectorTuple tup;
  tup.xs.assign(sys.d1(), IntVector(n1, 0));
  tup.ys.assign(sys.d2(), IntVector(n2, 0));
  Int128 count = 0;
  auto visit = [&](const Int* pt) {
    int off = 0;
    for (int s = 0; s < sx; ++s, off += n1) std::copy(pt + off, pt + off + n1, tup.xs[s].begin());
    for (int s = 0; s < sy; ++s, off += n2) std::copy(pt + off, pt + off + n2, tup.ys[s].begin());
    IntVector& slot = axis == Axis::x ? tup.xs.back() : tup.ys.back();
    for (int l = 0; l < free_len; ++l) {
      std::fill(slot.begin(), slot.end(), 0);
      slot[l] = 1;
      double ph = 0;
      for (int i = 0; i < sys.R(); ++i) ph += frac_product(alpha[i], sys.gamma(i, tup));
      double d = dist_to_int(ph);
      if (std::abs(d - threshold) < opts.guard) {
        throw AmbiguousThreshold("||Gamma|| = " + std::to_string(d) + " vs 1/bound = " +
                                 std::to_string(threshold));
      }
      if (d >= threshold) return;
    }
    ++count;
  };
  for_each_point(box, visit);
  return count;
}

}  // namespace bihom
