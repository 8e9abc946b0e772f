// arcs.cpp

#include "bihom/arcs.hpp"

#include "bihom/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bihom {

namespace {

constexpr double kSlack = 1.1;

Rational torus_distance(const Rational& x, const Rational& y) {
  Rational d = x - y;
  if (d < 0) d = -d;
  // d in [0, 1) since both lie in [0, 1).
  Rational e = 1 - d;
  return d < e ? d : e;
}

Rational floor_frac(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && Rational(q) != r) q -= 1;
  return r - Rational(q);
}

struct Box {
  std::vector<Rational> lo, hi;
};

// Splits a box with coordinates possibly leaving [0, 1) into pieces inside.
void wrap_box(const std::vector<Rational>& lo, const std::vector<Rational>& hi, std::size_t dim,
              Box& cur, std::vector<Box>& out) {
  if (dim == lo.size()) {
    out.push_back(cur);
    return;
  }
  if (hi[dim] - lo[dim] >= 1) {
    cur.lo[dim] = 0;
    cur.hi[dim] = 1;
    wrap_box(lo, hi, dim + 1, cur, out);
    return;
  }
  Rational a = floor_frac(lo[dim]);
  Rational b = a + (hi[dim] - lo[dim]);
  if (b <= 1) {
    cur.lo[dim] = a;
    cur.hi[dim] = b;
    wrap_box(lo, hi, dim + 1, cur, out);
  } else {
    cur.lo[dim] = a;
    cur.hi[dim] = 1;
    wrap_box(lo, hi, dim + 1, cur, out);
    cur.lo[dim] = 0;
    cur.hi[dim] = b - 1;
    wrap_box(lo, hi, dim + 1, cur, out);
  }
}

Rational union_measure(const std::vector<Box>& boxes, int R) {
  if (boxes.empty()) return 0;
  std::vector<std::vector<Rational>> cuts(R);
  for (const auto& b : boxes) {
    for (int i = 0; i < R; ++i) {
      cuts[i].push_back(b.lo[i]);
      cuts[i].push_back(b.hi[i]);
    }
  }
  std::size_t cells = 1;
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    cells *= c.size() > 1 ? c.size() - 1 : 1;
  }
  if (cells * boxes.size() > 50000000) throw BudgetExceeded("arc union measure");
  Rational total = 0;
  std::vector<std::size_t> idx(R, 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i < R; ++i) ok = ok && cuts[i].size() > 1;
    if (!ok) break;
    std::vector<Rational> mid(R);
    Rational vol = 1;
    for (int i = 0; i < R; ++i) {
      mid[i] = (cuts[i][idx[i]] + cuts[i][idx[i] + 1]) / 2;
      vol *= cuts[i][idx[i] + 1] - cuts[i][idx[i]];
    }
    for (const auto& b : boxes) {
      bool in = true;
      for (int i = 0; i < R && in; ++i) in = b.lo[i] <= mid[i] && mid[i] <= b.hi[i];
      if (in) {
        total += vol;
        break;
      }
    }
    int i = R - 1;
    while (i >= 0 && ++idx[i] + 1 == cuts[i].size()) idx[i--] = 0;
    if (i < 0) break;
  }
  return total;
}

}  // namespace

void CircleParams::set_scale(double p1, double p2) {
  if (!(p1 >= 1) || !(p2 >= 1)) throw std::invalid_argument("P1, P2 must be >= 1");
  P = std::pow(p1, d1) * std::pow(p2, d2);
}

Int CircleParams::q_max(std::optional<double> theta) const {
  if (!(P >= 1)) throw std::logic_error("circle parameters have no scale P");
  double e = eta_at(theta.value_or(theta0));
  return static_cast<Int>(std::floor(std::pow(P, e) * (1 + 1e-12)));
}

double CircleParams::width(std::optional<double> theta) const {
  if (!(P >= 1)) throw std::logic_error("circle parameters have no scale P");
  return std::pow(P, -1 + eta_at(theta.value_or(theta0)));
}

double K_from_codims(double codim1, double codim2, int d1, int d2) {
  return std::min(codim1, codim2) / std::pow(2.0, d1 + d2 - 2);
}

std::string ConditionReport::first_violation() const {
  if (!k_lower) return "K > max(R(R+1)(dtilde+1), R(b d1 + d2))";
  if (!gap) return "K - R(R+1)(dtilde+1) > 2 delta / theta0";
  if (!k_delta) return "K > (2 delta + R)(b d1 + d2)";
  if (!exponent) return "1 > (b d1 + d2) R (dtilde+1) theta0 (2R+3) + delta (b d1 + d2)";
  return "";
}

ConditionReport check_conditions(const CircleParams& p) {
  const double R = p.R, dt = p.dtilde, s = p.b * p.d1 + p.d2;
  ConditionReport c;
  c.k_lower = p.K > std::max(R * (R + 1) * (dt + 1), R * s);
  c.gap = p.theta0 > 0 && p.K - R * (R + 1) * (dt + 1) > 2 * p.delta / p.theta0;
  c.k_delta = p.K > (2 * p.delta + R) * s;
  c.exponent = 1 > s * R * (dt + 1) * p.theta0 * (2 * R + 3) + p.delta * s;
  return c;
}

CircleParams choose_parameters(int R, int d1, int d2, double b, double K) {
  if (R < 1 || d1 < 0 || d2 < 0 || d1 + d2 < 1) throw std::invalid_argument("bad degrees");
  CircleParams p;
  p.R = R;
  p.d1 = d1;
  p.d2 = d2;
  p.dtilde = d1 + d2 - 2;
  p.b = b;
  p.K = K;
  const double r = R, dt = p.dtilde, s = b * d1 + d2;
  if (!(K > std::max(r * (r + 1) * (dt + 1), r * s))) {
    throw std::invalid_argument("infeasible parameters: K > max(R(R+1)(dtilde+1), R(b d1 + d2)) fails (K = " +
                                std::to_string(K) + ")");
  }
  // Grid 10^(-6) .. 1 with 60 points per decade.
  std::vector<double> grid;
  for (int k = -360; k <= 0; ++k) grid.push_back(std::pow(10.0, k / 60.0));
  bool found = false;
  for (double delta : grid) {
    for (double theta : grid) {
      bool ok = K - r * (r + 1) * (dt + 1) >= kSlack * 2 * delta / theta &&
                K >= kSlack * (2 * delta + r) * s &&
                1 >= kSlack * (s * r * (dt + 1) * theta * (2 * r + 3) + delta * s);
      if (!ok) continue;
      if (!found || delta > p.delta || (delta == p.delta && theta > p.theta0)) {
        p.delta = delta;
        p.theta0 = theta;
        found = true;
      }
    }
  }
  if (!found) {
    throw std::invalid_argument("infeasible parameters: no grid point satisfies the conditions with 10% slack");
  }
  p.eta = r * (dt + 1) * p.theta0;
  ConditionReport c = check_conditions(p);
  if (!c.all()) throw std::logic_error("parameter post-check failed: " + c.first_violation());
  return p;
}

double disjointness_threshold(const CircleParams& p) {
  if (p.eta >= 1.0 / 3) return std::numeric_limits<double>::infinity();
  return std::pow(2.0, 1.0 / (1 - 3 * p.eta));
}

std::optional<RationalCenter> locate_rational(std::span<const double> alpha, Int q_max, double tol,
                                              bool tol_scales_with_q) {
  for (Int q = 1; q <= q_max; ++q) {
    RationalCenter c;
    c.q = q;
    bool ok = true;
    Int g = q;
    for (double ai : alpha) {
      long double qa = static_cast<long double>(q) * ai;
      long double near = std::nearbyint(qa);
      long double err = std::fabs(qa - near);
      double lim = tol_scales_with_q ? tol * static_cast<double>(q) : tol;
      if (err > lim) {
        ok = false;
        break;
      }
      Int a = mod(static_cast<Int>(near), q);
      c.a.push_back(a);
      c.beta.push_back(static_cast<double>((qa - near) / q));
      g = gcd(g, a);
    }
    if (ok && g == 1) return c;
  }
  return std::nullopt;
}

std::optional<RationalCenter> locate_arc(std::span<const double> alpha, const CircleParams& p,
                                         ArcVariant variant, std::optional<double> theta) {
  if (static_cast<int>(alpha.size()) != p.R) throw std::invalid_argument("alpha length mismatch");
  const Int qm = p.q_max(theta);
  const double w = p.width(theta);
  if (variant == ArcVariant::plain) return locate_rational(alpha, qm, w / 2, false);
  return locate_rational(alpha, qm, w, true);
}

std::vector<RationalCenter> arc_centers(Int q_max, int R) {
  std::vector<RationalCenter> out;
  for (Int q = 1; q <= q_max; ++q) {
    IntVector a(R, 0);
    while (true) {
      Int g = q;
      for (Int v : a) g = gcd(g, v);
      if (g == 1) out.push_back({q, a, std::vector<double>(R, 0.0)});
      int i = R - 1;
      while (i >= 0 && ++a[i] == q) a[i--] = 0;
      if (i < 0) break;
    }
  }
  return out;
}

DisjointnessResult check_disjointness(Int q_max, const Rational& half_width, int R) {
  DisjointnessResult res;
  auto centers = arc_centers(q_max, R);
  res.arcs = centers.size();
  const Rational reach = 2 * half_width;
  std::vector<std::vector<Rational>> pts;
  for (const auto& c : centers) {
    std::vector<Rational> v;
    for (Int a : c.a) v.emplace_back(a, c.q);
    pts.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      bool meet = true;
      for (int k = 0; k < R && meet; ++k) meet = torus_distance(pts[i][k], pts[j][k]) <= reach;
      if (meet) {
        res.disjoint = false;
        res.witness = std::make_pair(centers[i], centers[j]);
        return res;
      }
    }
  }
  return res;
}

DisjointnessResult check_disjointness(const CircleParams& p, std::optional<double> theta) {
  return check_disjointness(p.q_max(theta), exact_rational(p.width(theta)), p.R);
}

MeasureResult arcs_measure(const CircleParams& p, std::optional<double> theta) {
  MeasureResult out;
  const Int qm = p.q_max(theta);
  const Rational w = exact_rational(p.width(theta));
  DisjointnessResult dj = check_disjointness(qm, w, p.R);
  out.arcs = dj.arcs;
  out.disjoint = dj.disjoint;
  if (dj.disjoint) {
    Rational side = std::min(Rational(2 * w), Rational(1));
    Rational vol = 1;
    for (int i = 0; i < p.R; ++i) vol *= side;
    out.measure = vol * Rational(static_cast<Int>(dj.arcs));
  } else {
    std::vector<Box> boxes;
    for (const auto& c : arc_centers(qm, p.R)) {
      std::vector<Rational> lo, hi;
      for (Int a : c.a) {
        lo.push_back(Rational(a, c.q) - w);
        hi.push_back(Rational(a, c.q) + w);
      }
      Box cur{lo, hi};
      wrap_box(lo, hi, 0, cur, boxes);
    }
    out.measure = union_measure(boxes, p.R);
  }
  double e = p.eta_at(theta.value_or(p.theta0));
  out.bound = std::pow(p.P, -p.R + e * (2 * p.R + 1));
  out.constant = to_double(out.measure) / out.bound;
  return out;
}

ContainmentReport check_containment(const CircleParams& p, std::size_t samples,
                                    std::uint64_t seed, std::optional<double> theta) {
  ContainmentReport rep;
  std::mt19937_64 rng(seed);
  auto unif = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const Int qm = p.q_max(theta);
  const double w = p.width(theta);
  std::vector<double> alpha(p.R);
  for (std::size_t s = 0; s < samples; ++s) {
    Int q = 1 + static_cast<Int>(rng() % static_cast<std::uint64_t>(std::max<Int>(qm, 1)));
    for (int i = 0; i < p.R; ++i) {
      double a = static_cast<double>(rng() % static_cast<std::uint64_t>(q));
      // Up to twice the PLAIN radius so both hits and misses occur.
      alpha[i] = a / q + (2 * unif() - 1) * w / q;
    }
    ++rep.samples;
    auto c = locate_arc(alpha, p, ArcVariant::plain, theta);
    if (!c) continue;
    ++rep.plain_hits;
    for (int i = 0; i < p.R; ++i) {
      double err = std::fabs(static_cast<double>(c->q) * alpha[i] -
                             std::nearbyint(static_cast<double>(c->q) * alpha[i]));
      if (err > static_cast<double>(c->q) * w) {
        ++rep.violations;
        break;
      }
    }
  }
  return rep;
}

DichotomyProbe probe_weyl_dichotomy(const FormSystem& sys, std::span<const double> alpha,
                                    const BoxPair& boxes, const CircleParams& p,
                                    const NearSolutionOptions& opts) {
  DichotomyProbe out;
  Complex s = weyl_sum(sys, alpha, boxes);
  IntBox bx = scaled_box(boxes.b1, boxes.p1, boxes.boundary);
  IntBox by = scaled_box(boxes.b2, boxes.p2, boxes.boundary);
  out.s_abs = std::abs(s);
  out.pairs = static_cast<double>(bx.size() * by.size());
  out.ratio = out.pairs > 0 ? out.s_abs / out.pairs : 0;
  const double P = std::pow(boxes.p1, sys.d1()) * std::pow(boxes.p2, sys.d2());
  try {
    if (sys.d1() >= 1) {
      out.m1 = count_near_solutions(sys, alpha, boxes.p1, boxes.p2, boxes.p1, Axis::x, opts);
    }
  } catch (const BudgetExceeded&) {
  }
  try {
    if (sys.d2() >= 1) {
      out.m2 = count_near_solutions(sys, alpha, boxes.p1, boxes.p2, P, Axis::y, opts);
    }
  } catch (const BudgetExceeded&) {
  }
  if (p.P >= 1) out.arc = locate_arc(alpha, p, ArcVariant::plain);
  return out;
}

}  // namespace bihom
