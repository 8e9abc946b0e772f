// counting.cpp

#include "bihom/counting.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace bihom {

namespace {

Int to_int_checked(const BigInt& v) {
  if (v > BigInt(INT64_MAX / 4) || v < BigInt(INT64_MIN / 4)) {
    throw std::overflow_error("scaled box coordinate out of range");
  }
  return static_cast<Int>(v);
}

BigInt floor_rational(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && Rational(q) != r) q -= 1;
  return q;
}

BigInt ceil_rational(const Rational& r) {
  BigInt f = floor_rational(r);
  return Rational(f) == r ? f : BigInt(f + 1);
}

void check_budget(double work, double budget, const char* what) {
  if (budget > 0 && work > budget) {
    throw BudgetExceeded(std::string(what) + " needs " + std::to_string(work) +
                         " evaluations, budget " + std::to_string(budget));
  }
}

Int128 count_generic(const FormSystem& sys, const IntBox& bx, const IntBox& by) {
  // Per form: distinct y-monomials and, per term, which slot it feeds.
  struct FormPlan {
    std::vector<std::vector<int>> yexps;
    std::vector<int> slot;
  };
  std::vector<FormPlan> plans(sys.R());
  for (int i = 0; i < sys.R(); ++i) {
    std::map<std::vector<int>, int> index;
    for (const auto& t : sys.terms(i)) {
      auto [it, fresh] = index.emplace(t.yexp, static_cast<int>(plans[i].yexps.size()));
      if (fresh) plans[i].yexps.push_back(t.yexp);
      plans[i].slot.push_back(it->second);
    }
  }
  const int n1 = sys.n1(), n2 = sys.n2();
  Int128 total = 0;
  std::vector<std::vector<Int128>> coeffs(sys.R());
  for_each_point(bx, [&](const Int* x) {
    bool all_zero = true;
    for (int i = 0; i < sys.R(); ++i) {
      coeffs[i].assign(plans[i].yexps.size(), 0);
      const auto& terms = sys.terms(i);
      for (std::size_t t = 0; t < terms.size(); ++t) {
        Int128 v = terms[t].coeff;
        for (int j = 0; j < n1; ++j) {
          for (int e = 0; e < terms[t].xexp[j]; ++e) v *= x[j];
        }
        coeffs[i][plans[i].slot[t]] += v;
      }
      for (auto c : coeffs[i]) all_zero = all_zero && c == 0;
    }
    if (all_zero) {
      total += static_cast<Int128>(by.size());
      return;
    }
    for_each_point(by, [&](const Int* y) {
      for (int i = 0; i < sys.R(); ++i) {
        Int128 s = 0;
        for (std::size_t m = 0; m < coeffs[i].size(); ++m) {
          if (coeffs[i][m] == 0) continue;
          Int128 v = coeffs[i][m];
          const auto& ye = plans[i].yexps[m];
          for (int k = 0; k < n2; ++k) {
            for (int e = 0; e < ye[k]; ++e) v *= y[k];
          }
          s += v;
        }
        if (s != 0) return;
      }
      ++total;
    });
  });
  return total;
}

Int128 count_fibered(const LinearFiber& lf, const IntBox& outer, const IntBox& fiber) {
  const int r = lf.forms(), m = lf.fiber_dim();
  std::vector<Int128> c(static_cast<std::size_t>(r) * m);
  std::vector<Int128> outer_val(outer.dim());
  IntBox reduced;
  IntVector y(m);
  Int128 total = 0;
  const Int128 fiber_size = static_cast<Int128>(fiber.size());
  for_each_point(outer, [&](const Int* o) {
    for (int j = 0; j < outer.dim(); ++j) outer_val[j] = o[j];
    lf.coefficients<Int128>(outer_val.data(), c.data());
    int i0 = -1, k0 = -1;
    for (int i = 0; i < r && i0 < 0; ++i) {
      Int best = -1;
      for (int k = 0; k < m; ++k) {
        if (c[i * m + k] == 0) continue;
        Int width = fiber.hi[k] - fiber.lo[k];
        if (width > best) {
          best = width;
          i0 = i;
          k0 = k;
        }
      }
    }
    if (i0 < 0) {
      total += fiber_size;
      return;
    }
    // Enumerate every fiber coordinate except k0, then solve form i0 for it.
    reduced.lo.clear();
    reduced.hi.clear();
    for (int k = 0; k < m; ++k) {
      if (k == k0) continue;
      reduced.lo.push_back(fiber.lo[k]);
      reduced.hi.push_back(fiber.hi[k]);
    }
    const Int128 piv = c[i0 * m + k0];
    for_each_point(reduced, [&](const Int* z) {
      Int128 s = 0;
      for (int k = 0, t = 0; k < m; ++k) {
        if (k == k0) continue;
        y[k] = z[t++];
        s += c[i0 * m + k] * y[k];
      }
      if (s % piv != 0) return;
      Int128 v = -s / piv;
      if (v < fiber.lo[k0] || v > fiber.hi[k0]) return;
      y[k0] = static_cast<Int>(v);
      for (int i = 0; i < r; ++i) {
        if (i == i0) continue;
        Int128 acc = 0;
        for (int k = 0; k < m; ++k) acc += c[i * m + k] * y[k];
        if (acc != 0) return;
      }
      ++total;
    });
  });
  return total;
}

double as_double(UInt128 v) { return static_cast<double>(v); }

}  // namespace

std::string to_string(Boundary b) { return b == Boundary::closed ? "closed" : "half_open"; }

Boundary parse_boundary(const std::string& s) {
  if (s == "closed") return Boundary::closed;
  if (s == "half_open") return Boundary::half_open;
  throw std::invalid_argument("unknown boundary '" + s + "' (closed|half_open)");
}

double BoxPair::b() const {
  if (p2 == 1.0) return std::numeric_limits<double>::infinity();
  return std::log(p1) / std::log(p2);
}

void BoxPair::validate(int n1, int n2) const {
  if (static_cast<int>(b1.size()) != n1 || static_cast<int>(b2.size()) != n2) {
    throw std::invalid_argument("box dimension mismatch");
  }
  for (const auto* box : {&b1, &b2}) {
    for (const auto& iv : *box) {
      if (!(iv.lo <= iv.hi)) throw std::invalid_argument("box interval has lo > hi");
      if (iv.hi - iv.lo > 1.0) throw std::invalid_argument("box side exceeds 1");
    }
  }
  if (!(p1 >= 1.0) || !(p2 >= 1.0)) throw std::invalid_argument("P1 and P2 must be >= 1");
}

bool IntBox::empty() const {
  for (int i = 0; i < dim(); ++i) {
    if (lo[i] > hi[i]) return true;
  }
  return false;
}

UInt128 IntBox::size() const {
  if (empty()) return 0;
  UInt128 s = 1;
  for (int i = 0; i < dim(); ++i) s *= static_cast<UInt128>(hi[i] - lo[i] + 1);
  return s;
}

std::pair<Int, Int> scaled_range(const Interval& iv, double P, Boundary boundary) {
  Rational p = exact_rational(P);
  Rational lo = p * exact_rational(iv.lo);
  Rational hi = p * exact_rational(iv.hi);
  Int a = to_int_checked(ceil_rational(lo));
  Int b = boundary == Boundary::closed ? to_int_checked(floor_rational(hi))
                                       : to_int_checked(ceil_rational(hi)) - 1;
  return {a, b};
}

IntBox scaled_box(const std::vector<Interval>& ivs, double P, Boundary boundary) {
  IntBox box;
  for (const auto& iv : ivs) {
    auto [a, b] = scaled_range(iv, P, boundary);
    box.lo.push_back(a);
    box.hi.push_back(b);
  }
  return box;
}

std::vector<IntVector> enumerate_box_points(const std::vector<Interval>& ivs, double P,
                                            Boundary boundary) {
  if (!(P >= 1.0)) throw std::invalid_argument("P must be >= 1");
  std::vector<IntVector> out;
  IntBox box = scaled_box(ivs, P, boundary);
  for_each_point(box, [&](const Int* p) { out.emplace_back(p, p + box.dim()); });
  return out;
}

std::string to_string(CountStrategy s) {
  switch (s) {
    case CountStrategy::automatic:
      return "auto";
    case CountStrategy::generic:
      return "generic";
    case CountStrategy::fibered:
      return "fibered";
  }
  return "?";
}

CountStrategy parse_count_strategy(const std::string& s) {
  if (s == "auto") return CountStrategy::automatic;
  if (s == "generic") return CountStrategy::generic;
  if (s == "fibered") return CountStrategy::fibered;
  throw std::invalid_argument("unknown strategy '" + s + "' (auto|generic|fibered)");
}

CountResult count_solutions(const FormSystem& sys, const BoxPair& boxes,
                            const CountOptions& opts) {
  boxes.validate(sys.n1(), sys.n2());
  IntBox bx = scaled_box(boxes.b1, boxes.p1, boxes.boundary);
  IntBox by = scaled_box(boxes.b2, boxes.p2, boxes.boundary);
  CountResult res;
  res.pairs = bx.size() * by.size();
  if (res.pairs == 0) return res;

  bool fibered = opts.strategy == CountStrategy::fibered ||
                 (opts.strategy == CountStrategy::automatic && (sys.d1() == 1 || sys.d2() == 1));
  if (!fibered) {
    check_budget(as_double(res.pairs), opts.budget, "generic count");
    res.used = CountStrategy::generic;
    res.n = count_generic(sys, bx, by);
    return res;
  }
  if (sys.d1() != 1 && sys.d2() != 1) {
    throw std::invalid_argument("fibered strategy needs a system linear in x or in y");
  }
  // Fiber over the block whose enumeration is more expensive.
  auto cost = [](const IntBox& outer, const IntBox& fiber) {
    double w = 0;
    for (int k = 0; k < fiber.dim(); ++k) w = std::max(w, double(fiber.hi[k] - fiber.lo[k] + 1));
    return as_double(outer.size()) * as_double(fiber.size()) / std::max(w, 1.0);
  };
  Axis fiber = sys.d2() == 1 ? Axis::y : Axis::x;
  if (sys.d1() == 1 && sys.d2() == 1 && cost(by, bx) < cost(bx, by)) fiber = Axis::x;
  const IntBox& outer_box = fiber == Axis::y ? bx : by;
  const IntBox& fiber_box = fiber == Axis::y ? by : bx;
  check_budget(cost(outer_box, fiber_box), opts.budget, "fibered count");
  res.used = CountStrategy::fibered;
  res.n = count_fibered(sys.linear_fiber_for(fiber), outer_box, fiber_box);
  return res;
}

}  // namespace bihom
