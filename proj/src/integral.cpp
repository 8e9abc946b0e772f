// integral.cpp

#include "bihom/integral.hpp"

#include "bihom/interval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bihom {

void QuadratureSpec::validate() const {
  if (order < 2) throw std::invalid_argument("quadrature order must be >= 2");
  if (level < 0) throw std::invalid_argument("subdivision level must be >= 0");
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
}

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Bounds> to_bounds(const std::vector<Interval>& ivs) {
  std::vector<Bounds> out;
  for (const auto& iv : ivs) out.push_back({iv.lo, iv.hi});
  return out;
}

void check_boxes(const FormSystem& sys, const BoxPair& boxes) {
  if (static_cast<int>(boxes.b1.size()) != sys.n1() ||
      static_cast<int>(boxes.b2.size()) != sys.n2()) {
    throw std::invalid_argument("box dimensions do not match the system");
  }
  for (const auto* b : {&boxes.b1, &boxes.b2}) {
    for (const auto& iv : *b) {
      if (!(iv.lo <= iv.hi)) throw std::invalid_argument("box interval has lo > hi");
    }
  }
}

double volume(const BoxPair& boxes) {
  double v = 1;
  for (const auto& iv : boxes.b1) v *= iv.hi - iv.lo;
  for (const auto& iv : boxes.b2) v *= iv.hi - iv.lo;
  return v;
}

struct AxisRule {
  std::vector<double> x, w;
};

AxisRule axis_rule(double lo, double hi, long cells, int order) {
  const GaussRule& g = gauss_legendre(order);
  AxisRule r;
  r.x.reserve(cells * order);
  r.w.reserve(cells * order);
  const double h = (hi - lo) / static_cast<double>(cells);
  for (long c = 0; c < cells; ++c) {
    const double a = lo + h * static_cast<double>(c);
    const double b = c + 1 == cells ? hi : a + h;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < order; ++q) {
      r.x.push_back(mid + half * g.nodes[q]);
      r.w.push_back(half * g.weights[q]);
    }
  }
  return r;
}

template <class F>
Complex tensor_sum(const std::vector<AxisRule>& axes, F&& f) {
  const std::size_t d = axes.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> pt(d);
  for (std::size_t j = 0; j < d; ++j) pt[j] = axes[j].x[0];
  PairwiseAccumulator acc;
  while (true) {
    double w = 1;
    for (std::size_t j = 0; j < d; ++j) w *= axes[j].w[idx[j]];
    acc.add(w * f(pt.data()));
    std::size_t c = d;
    while (c > 0 && idx[c - 1] + 1 == axes[c - 1].x.size()) {
      idx[c - 1] = 0;
      pt[c - 1] = axes[c - 1].x[0];
      --c;
    }
    if (c == 0) break;
    ++idx[c - 1];
    pt[c - 1] = axes[c - 1].x[idx[c - 1]];
  }
  return acc.total();
}

// int_lo^hi e(phi t) dt
Complex linear_phase_integral(double phi, double lo, double hi) {
  const double len = hi - lo, mid = 0.5 * (lo + hi);
  const double a = kPi * phi;
  double mag;
  if (std::abs(a * len) < 1e-8) {
    mag = len * (1 - (a * len) * (a * len) / 6);
  } else {
    mag = std::sin(a * len) / a;
  }
  if (mid == 0) return {mag, 0};
  return unit(phi * mid) * mag;
}

// Everything about I(u) that does not depend on u.
class OscillatoryModel {
 public:
  OscillatoryModel(const FormSystem& sys, const BoxPair& boxes) : sys_(sys), boxes_(boxes) {
    check_boxes(sys, boxes);
    auto bx = to_bounds(boxes.b1), by = to_bounds(boxes.b2);
    fiber_ = sys.linear_fiber();
    if (fiber_) {
      // Fiber over the larger linear block.
      if (sys.d1() == 1 && sys.d2() == 1) {
        fiber_ = sys.linear_fiber_for(sys.n1() > sys.n2() ? Axis::x : Axis::y);
      }
      const Axis o = fiber_->outer();
      const auto& oiv = o == Axis::x ? boxes.b1 : boxes.b2;
      const auto& fiv = o == Axis::x ? boxes.b2 : boxes.b1;
      for (const auto& iv : oiv) {
        lo_.push_back(iv.lo);
        hi_.push_back(iv.hi);
      }
      for (const auto& iv : fiv) {
        flo_.push_back(iv.lo);
        fhi_.push_back(iv.hi);
      }
      for (int j = 0; j < sys.dim(o); ++j) axes_.push_back({o, j});
    } else {
      for (const auto& iv : boxes.b1) {
        lo_.push_back(iv.lo);
        hi_.push_back(iv.hi);
      }
      for (const auto& iv : boxes.b2) {
        lo_.push_back(iv.lo);
        hi_.push_back(iv.hi);
      }
      for (int j = 0; j < sys.n1(); ++j) axes_.push_back({Axis::x, j});
      for (int k = 0; k < sys.n2(); ++k) axes_.push_back({Axis::y, k});
    }
    for (int i = 0; i < sys.R(); ++i) {
      std::vector<double> row;
      for (auto [a, j] : axes_) row.push_back(partial_bounds(sys, i, a, j, bx, by).mag());
      rate_.push_back(std::move(row));
    }
  }

  std::vector<long> base_cells(std::span<const double> u) const {
    std::vector<long> cells;
    for (std::size_t j = 0; j < axes_.size(); ++j) {
      double rate = 0;
      for (int i = 0; i < sys_.R(); ++i) rate += std::abs(u[i]) * rate_[i][j];
      cells.push_back(std::max<long>(1, static_cast<long>(std::ceil((hi_[j] - lo_[j]) * rate))));
    }
    return cells;
  }

  double volume() const { return bihom::volume(boxes_); }

  double cost(const std::vector<long>& cells, int level, int order) const {
    double c = 1;
    for (long n : cells) c *= static_cast<double>(n) * std::ldexp(1.0, level) * order;
    return c;
  }

  Complex evaluate(std::span<const double> u, const std::vector<long>& cells, int level,
                   int order) const {
    std::vector<AxisRule> rules;
    for (std::size_t j = 0; j < axes_.size(); ++j) {
      rules.push_back(axis_rule(lo_[j], hi_[j], cells[j] << level, order));
    }
    const int R = sys_.R();
    if (fiber_) {
      const int m = fiber_->fiber_dim();
      std::vector<double> c(static_cast<std::size_t>(R) * m);
      return tensor_sum(rules, [&](const double* o) {
        fiber_->coefficients<double>(o, c.data());
        Complex prod = 1;
        for (int k = 0; k < m; ++k) {
          double phi = 0;
          for (int i = 0; i < R; ++i) phi += u[i] * c[i * m + k];
          prod *= linear_phase_integral(phi, flo_[k], fhi_[k]);
        }
        return prod;
      });
    }
    const int n1 = sys_.n1();
    return tensor_sum(rules, [&](const double* z) {
      double ph = 0;
      for (int i = 0; i < R; ++i) ph += u[i] * sys_.eval_real(i, z, z + n1);
      return unit(ph - std::floor(ph));
    });
  }

 private:
  const FormSystem& sys_;
  const BoxPair& boxes_;
  std::optional<LinearFiber> fiber_;
  std::vector<std::pair<Axis, int>> axes_;
  std::vector<double> lo_, hi_, flo_, fhi_;
  std::vector<std::vector<double>> rate_;  // [form][axis] sup |dF_i/dv_j|
};

OscillatoryResult oscillatory_with(const OscillatoryModel& model, std::span<const double> u,
                                   const QuadratureSpec& spec, bool with_error) {
  OscillatoryResult res;
  auto cells = model.base_cells(u);
  const double c0 = model.cost(cells, spec.level, spec.order);
  if (c0 > spec.budget) {
    throw BudgetExceeded("oscillatory integral needs " + std::to_string(c0) +
                         " evaluations, budget " + std::to_string(spec.budget));
  }
  Complex coarse = model.evaluate(u, cells, spec.level, spec.order);
  res.evals = static_cast<std::size_t>(c0);
  if (!with_error) {
    res.value = coarse;
    return res;
  }
  const double c1 = model.cost(cells, spec.level + 1, spec.order);
  if (c0 + c1 > spec.budget) {
    // |I| <= vol, so this is a valid (if crude) bound.
    res.value = coarse;
    res.error = std::abs(coarse) + model.volume();
    res.converged = false;
    return res;
  }
  Complex fine = model.evaluate(u, cells, spec.level + 1, spec.order);
  res.evals += static_cast<std::size_t>(c1);
  res.value = fine;
  res.error = std::abs(fine - coarse);
  res.converged = res.error <= spec.tolerance;
  return res;
}

}  // namespace

OscillatoryResult oscillatory_I(const FormSystem& sys, std::span<const double> u,
                                const BoxPair& boxes, const QuadratureSpec& spec) {
  spec.validate();
  if (static_cast<int>(u.size()) != sys.R()) throw std::invalid_argument("u must have R entries");
  OscillatoryModel model(sys, boxes);
  return oscillatory_with(model, u, spec, true);
}

SingularIntegral singular_integral_partial(const FormSystem& sys, double phi,
                                           const BoxPair& boxes, const QuadratureSpec& spec) {
  spec.validate();
  const int R = sys.R();
  if (R > 2) throw std::invalid_argument("singular_integral_partial supports R <= 2");
  if (!(phi > 0)) throw std::invalid_argument("Phi must be positive");
  OscillatoryModel model(sys, boxes);
  auto bx = to_bounds(boxes.b1), by = to_bounds(boxes.b2);
  double max_f = 0;
  for (int i = 0; i < R; ++i) max_f = std::max(max_f, form_bounds(sys, i, bx, by).mag());
  const double width = max_f > 0 ? std::min(1.0, 1.0 / max_f) : 1.0;
  const long panels = std::max<long>(1, static_cast<long>(std::ceil(2 * phi / width - 1e-12)));
  const double h = 2 * phi / static_cast<double>(panels);

  // Kronrod nodes of one panel with Kronrod and (embedded) Gauss weights.
  struct Node {
    double x, wk, wg;
  };
  auto panel_nodes = [&](long p) {
    const double a = -phi + h * static_cast<double>(p);
    const double c = a + 0.5 * h, half = 0.5 * h;
    std::vector<Node> nodes;
    for (int j = 0; j < 7; ++j) {
      const double wg = j % 2 == 1 ? half * gk::wg[j / 2] : 0.0;
      nodes.push_back({c - half * gk::xgk[j], half * gk::wgk[j], wg});
      nodes.push_back({c + half * gk::xgk[j], half * gk::wgk[j], wg});
    }
    nodes.push_back({c, half * gk::wgk[7], half * gk::wg[3]});
    return nodes;
  };

  SingularIntegral out;
  out.phi = phi;
  PairwiseAccumulator total;
  double panel_error = 0;
  std::vector<double> beta(R);
  const long tuples = R == 1 ? panels : panels * panels;
  for (long t = 0; t < tuples; ++t) {
    auto n0 = panel_nodes(t % panels);
    auto n1 = R == 2 ? panel_nodes(t / panels) : std::vector<Node>{{0, 1, 1}};
    Complex k = 0, g = 0;
    for (const auto& b : n1) {
      for (const auto& a : n0) {
        beta[0] = a.x;
        if (R == 2) beta[1] = b.x;
        auto r = oscillatory_with(model, beta, spec, false);
        out.evals += r.evals;
        k += a.wk * b.wk * r.value;
        if (a.wg != 0 && b.wg != 0) g += a.wg * b.wg * r.value;
      }
    }
    total.add(k);
    panel_error += std::abs(k - g);
  }
  // The I discretization error is largest where |beta| is largest.
  std::vector<double> corner(R, phi);
  auto probe = oscillatory_with(model, corner, spec, true);
  out.evals += probe.evals;
  const double box = std::pow(2 * phi, R);
  Complex v = total.total();
  out.value = v.real();
  out.imag = v.imag();
  out.error = panel_error + probe.error * box;
  out.converged = probe.converged && out.error <= spec.tolerance * box;
  out.real_ok = std::abs(out.imag) <= 10 * spec.tolerance;
  return out;
}

double psi(double z) { return std::max(0.0, 1.0 - std::abs(z)); }

double psi_T(double z, double T) { return T * psi(T * z); }

namespace {

// int over prod_{j<K} [lo_j, hi_j] of psi_T(s + sum_j c_j t_j) dt, exactly:
// as a function of s the integral over the first k variables is a spline of
// degree k + 1 with knots at sigma - sum_j c_j xi_j (sigma in {-1/T, 0, 1/T},
// xi a corner), so Gauss rules of the right size are exact between knots.
constexpr int kMaxFiber = 8;

double hat_slab(double s, int K, const double* c, const double* lo, const double* hi, double T) {
  if (K == 0) return psi_T(s, T);
  const double r = 1.0 / T;
  double mn = 0, mx = 0;
  for (int j = 0; j < K; ++j) {
    const double a = c[j] * lo[j], b = c[j] * hi[j];
    mn += std::min(a, b);
    mx += std::max(a, b);
  }
  if (s + mx <= -r || s + mn >= r) return 0;
  const int k = K - 1;
  const double len = hi[k] - lo[k];
  if (c[k] == 0) return len * hat_slab(s, k, c, lo, hi, T);
  std::array<double, 3 * (1 << (kMaxFiber - 1)) + 2> bp;
  std::size_t nb = 0;
  bp[nb++] = lo[k];
  bp[nb++] = hi[k];
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    double base = 0;
    for (int j = 0; j < k; ++j) base += c[j] * ((mask >> j) & 1 ? hi[j] : lo[j]);
    for (double sigma : {-r, 0.0, r}) {
      const double t = (sigma - base - s) / c[k];
      if (t > lo[k] && t < hi[k]) bp[nb++] = t;
    }
  }
  std::sort(bp.begin(), bp.begin() + nb);
  const GaussRule& g = gauss_legendre(std::max(2, (K + 2) / 2));
  double total = 0;
  for (std::size_t p = 0; p + 1 < nb; ++p) {
    const double a = bp[p], b = bp[p + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double piece = 0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      piece += g.weights[q] * hat_slab(s + c[k] * (mid + half * g.nodes[q]), k, c, lo, hi, T);
    }
    total += half * piece;
  }
  return total;
}

double eval_poly(const std::vector<double>& p, double t) {
  double v = 0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * t + p[i];
  return v;
}

// Real roots of p in the open interval (lo, hi), ascending.
std::vector<double> real_roots(std::vector<double> p, double lo, double hi) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  std::vector<double> roots;
  if (p.size() <= 1) return roots;
  if (p.size() == 2) {
    const double t = -p[0] / p[1];
    if (t > lo && t < hi) roots.push_back(t);
    return roots;
  }
  std::vector<double> dp(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = p[i] * static_cast<double>(i);
  std::vector<double> pts{lo};
  for (double c : real_roots(dp, lo, hi)) pts.push_back(c);
  pts.push_back(hi);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    double fa = eval_poly(p, a), fb = eval_poly(p, b);
    if (i > 0 && fa == 0) {
      roots.push_back(a);
      continue;
    }
    if (fa == 0 || fb == 0 || (fa < 0) == (fb < 0)) continue;
    for (int it = 0; it < 200 && b - a > 0; ++it) {
      const double m = 0.5 * (a + b);
      if (!(m > a && m < b)) break;
      const double fm = eval_poly(p, m);
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

SchmidtValue finish(double T, const AdaptiveResult& r) {
  SchmidtValue v;
  v.T = T;
  v.value = r.value;
  v.error = r.error;
  v.evals = r.evals;
  v.converged = r.converged;
  return v;
}

// One form, linear in a block: the fiber integral is done exactly.
SchmidtValue schmidt_fibered(const FormSystem& sys, const LinearFiber& lf, double T,
                             const BoxPair& boxes, const SchmidtOptions& opts) {
  const Axis o = lf.outer();
  const auto& oiv = o == Axis::x ? boxes.b1 : boxes.b2;
  const auto& fiv = o == Axis::x ? boxes.b2 : boxes.b1;
  std::vector<double> lo, hi, flo, fhi;
  for (const auto& iv : oiv) {
    lo.push_back(iv.lo);
    hi.push_back(iv.hi);
  }
  for (const auto& iv : fiv) {
    flo.push_back(iv.lo);
    fhi.push_back(iv.hi);
  }
  const int m = lf.fiber_dim();
  std::vector<double> c(m);
  auto f = [&](const double* z) {
    lf.coefficients<double>(z, c.data());
    return hat_slab(0.0, m, c.data(), flo.data(), fhi.data(), T);
  };
  const double r = 1.0 / T;
  std::vector<Bounds> fb = to_bounds(fiv);
  ZeroRegion zero = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<Bounds> ob;
    for (std::size_t j = 0; j < a.size(); ++j) ob.push_back({a[j], b[j]});
    Bounds fr = o == Axis::x ? form_bounds(sys, 0, ob, fb) : form_bounds(sys, 0, fb, ob);
    return fr.lo > r || fr.hi < -r;
  };
  AdaptiveOptions ao{opts.abs_tol, opts.rel_tol, opts.max_evals};
  return finish(T, cubature_adaptive(f, lo, hi, ao, zero));
}

// General case: the last variable of the lower-degree block is integrated
// exactly between the real roots of F_i = sigma; the rest adaptively.
SchmidtValue schmidt_generic(const FormSystem& sys, double T, const BoxPair& boxes,
                             const SchmidtOptions& opts) {
  const Axis ia = sys.d2() <= sys.d1() ? Axis::y : Axis::x;
  const int iv = sys.dim(ia) - 1;
  const Interval inner = ia == Axis::x ? boxes.b1[iv] : boxes.b2[iv];
  const int n1 = sys.n1(), n2 = sys.n2(), R = sys.R();
  std::vector<double> lo, hi;
  for (int j = 0; j < n1; ++j) {
    if (ia == Axis::x && j == iv) continue;
    lo.push_back(boxes.b1[j].lo);
    hi.push_back(boxes.b1[j].hi);
  }
  for (int k = 0; k < n2; ++k) {
    if (ia == Axis::y && k == iv) continue;
    lo.push_back(boxes.b2[k].lo);
    hi.push_back(boxes.b2[k].hi);
  }
  const double r = 1.0 / T;
  std::vector<double> x(n1), y(n2);
  std::vector<std::vector<double>> polys(R);
  int total_degree = 0;
  for (int i = 0; i < R; ++i) {
    int deg = 0;
    for (const auto& t : sys.terms(i)) deg = std::max(deg, ia == Axis::x ? t.xexp[iv] : t.yexp[iv]);
    polys[i].assign(deg + 1, 0.0);
    total_degree += deg;
  }
  const GaussRule& g = gauss_legendre(std::max(2, (total_degree + 2) / 2));
  auto f = [&](const double* z) {
    std::size_t p = 0;
    for (int j = 0; j < n1; ++j) x[j] = (ia == Axis::x && j == iv) ? 1.0 : z[p++];
    for (int k = 0; k < n2; ++k) y[k] = (ia == Axis::y && k == iv) ? 1.0 : z[p++];
    std::vector<double> bp{inner.lo, inner.hi};
    for (int i = 0; i < R; ++i) {
      std::fill(polys[i].begin(), polys[i].end(), 0.0);
      for (const auto& t : sys.terms(i)) {
        double v = static_cast<double>(t.coeff);
        for (int j = 0; j < n1; ++j) {
          if (ia == Axis::x && j == iv) continue;
          for (int e = 0; e < t.xexp[j]; ++e) v *= x[j];
        }
        for (int k = 0; k < n2; ++k) {
          if (ia == Axis::y && k == iv) continue;
          for (int e = 0; e < t.yexp[k]; ++e) v *= y[k];
        }
        polys[i][ia == Axis::x ? t.xexp[iv] : t.yexp[iv]] += v;
      }
      for (double sigma : {-r, 0.0, r}) {
        auto q = polys[i];
        q[0] -= sigma;
        for (double t : real_roots(q, inner.lo, inner.hi)) bp.push_back(t);
      }
    }
    std::sort(bp.begin(), bp.end());
    double total = 0;
    for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
      const double a = bp[s], b = bp[s + 1];
      if (!(b > a)) continue;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      bool live = true;
      for (int i = 0; i < R && live; ++i) live = std::abs(eval_poly(polys[i], mid)) <= r;
      if (!live) continue;
      double piece = 0;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double t = mid + half * g.nodes[q];
        double w = 1;
        for (int i = 0; i < R; ++i) w *= psi_T(eval_poly(polys[i], t), T);
        piece += g.weights[q] * w;
      }
      total += half * piece;
    }
    return total;
  };
  std::vector<Bounds> innerb{{inner.lo, inner.hi}};
  ZeroRegion zero = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<Bounds> xb, yb;
    std::size_t p = 0;
    for (int j = 0; j < n1; ++j) {
      if (ia == Axis::x && j == iv) {
        xb.push_back(innerb[0]);
      } else {
        xb.push_back({a[p], b[p]});
        ++p;
      }
    }
    for (int k = 0; k < n2; ++k) {
      if (ia == Axis::y && k == iv) {
        yb.push_back(innerb[0]);
      } else {
        yb.push_back({a[p], b[p]});
        ++p;
      }
    }
    for (int i = 0; i < R; ++i) {
      Bounds fr = form_bounds(sys, i, xb, yb);
      if (fr.lo > r || fr.hi < -r) return true;
    }
    return false;
  };
  AdaptiveOptions ao{opts.abs_tol, opts.rel_tol, opts.max_evals};
  return finish(T, cubature_adaptive(f, lo, hi, ao, zero));
}

}  // namespace

SchmidtValue schmidt_J_T(const FormSystem& sys, double T, const BoxPair& boxes,
                         const SchmidtOptions& opts) {
  if (!(T > 0)) throw std::invalid_argument("T must be positive");
  check_boxes(sys, boxes);
  if (sys.R() == 1) {
    std::optional<LinearFiber> lf = sys.linear_fiber();
    if (lf && sys.d1() == 1 && sys.d2() == 1) {
      lf = sys.linear_fiber_for(sys.n1() > sys.n2() ? Axis::x : Axis::y);
    }
    if (lf && lf->fiber_dim() <= kMaxFiber) return schmidt_fibered(sys, *lf, T, boxes, opts);
  }
  return schmidt_generic(sys, T, boxes, opts);
}

SchmidtResult schmidt_J(const FormSystem& sys, double T, const BoxPair& boxes,
                        const SchmidtOptions& opts) {
  if (!(T > 0)) throw std::invalid_argument("T must be positive");
  SchmidtResult out;
  for (double t : {T / 4, T / 2, T}) out.levels.push_back(schmidt_J_T(sys, t, boxes, opts));
  const double j1 = out.levels[0].value, j2 = out.levels[1].value, j4 = out.levels[2].value;
  double quad = 0;
  bool conv = true;
  for (const auto& l : out.levels) {
    quad = std::max(quad, l.error);
    conv = conv && l.converged;
  }
  const double d1 = j2 - j1, d2 = j4 - j2;
  if (std::abs(d2) <= 1e-14 * std::max(1.0, std::abs(j4))) {
    out.value = j4;
    out.ratio = 0;
    out.error = quad;
    out.converged = conv;
    return out;
  }
  out.ratio = d1 / d2;
  if (out.ratio > 1) {
    out.value = j4 + d2 / (out.ratio - 1);
    out.error = quad + std::abs(out.value - j4);
    out.converged = conv;
  } else {
    out.value = j4;
    out.error = std::abs(d2) + quad;
    out.degenerate = true;
    out.converged = false;
    out.note = "degenerate: dim V(0) hypothesis violated";
  }
  return out;
}

namespace {

Eigen::MatrixXd full_jacobian(const FormSystem& sys, const double* x, const double* y) {
  Eigen::MatrixXd jac(sys.R(), sys.total_dim());
  for (int i = 0; i < sys.R(); ++i) {
    for (int j = 0; j < sys.n1(); ++j) jac(i, j) = sys.partial_real(i, Axis::x, j, x, y);
    for (int k = 0; k < sys.n2(); ++k) jac(i, sys.n1() + k) = sys.partial_real(i, Axis::y, k, x, y);
  }
  return jac;
}

Eigen::VectorXd residual(const FormSystem& sys, const double* x, const double* y) {
  Eigen::VectorXd f(sys.R());
  for (int i = 0; i < sys.R(); ++i) f(i) = sys.eval_real(i, x, y);
  return f;
}

}  // namespace

bool validate_real_witness(const FormSystem& sys, const BoxPair& boxes, RealWitness& w,
                           const RealZeroOptions& opts) {
  check_boxes(sys, boxes);
  if (static_cast<int>(w.x.size()) != sys.n1() || static_cast<int>(w.y.size()) != sys.n2()) {
    return false;
  }
  Eigen::VectorXd f = residual(sys, w.x.data(), w.y.data());
  w.residuals.assign(f.data(), f.data() + f.size());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(full_jacobian(sys, w.x.data(), w.y.data()));
  const auto& sv = svd.singularValues();
  w.singular_values.assign(sv.data(), sv.data() + sv.size());
  w.rank = 0;
  for (double s : w.singular_values) w.rank += s > opts.sv_floor;
  bool ok = w.rank == sys.R();
  for (double r : w.residuals) ok = ok && std::abs(r) < opts.residual;
  for (int j = 0; j < sys.n1(); ++j) ok = ok && boxes.b1[j].lo < w.x[j] && w.x[j] < boxes.b1[j].hi;
  for (int k = 0; k < sys.n2(); ++k) ok = ok && boxes.b2[k].lo < w.y[k] && w.y[k] < boxes.b2[k].hi;
  return ok;
}

std::optional<RealWitness> find_nonsingular_real_zero(const FormSystem& sys, const BoxPair& boxes,
                                                      const RealZeroOptions& opts) {
  check_boxes(sys, boxes);
  const int n = sys.total_dim(), n1 = sys.n1(), R = sys.R();
  if (n > 16) throw std::invalid_argument("real zero search supports n1 + n2 <= 16");
  std::vector<double> lo, hi;
  for (const auto& iv : boxes.b1) {
    lo.push_back(iv.lo);
    hi.push_back(iv.hi);
  }
  for (const auto& iv : boxes.b2) {
    lo.push_back(iv.lo);
    hi.push_back(iv.hi);
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd z0(n), z(n);
  Eigen::MatrixXd D(n, R);
  for (int s = 0; s < opts.starts; ++s) {
    for (int j = 0; j < n; ++j) z0(j) = lo[j] + (hi[j] - lo[j]) * halton(s + 1, j);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < R; ++i) D(j, i) = unif(rng);
    }
    Eigen::VectorXd t = Eigen::VectorXd::Zero(R);
    z = z0;
    Eigen::VectorXd f = residual(sys, z.data(), z.data() + n1);
    for (int it = 0; it < opts.max_iter && f.lpNorm<Eigen::Infinity>() > 1e-15; ++it) {
      Eigen::MatrixXd A = full_jacobian(sys, z.data(), z.data() + n1) * D;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < R) break;
      Eigen::VectorXd step = lu.solve(-f);
      double lambda = 1;
      bool moved = false;
      while (lambda > 1e-6) {
        Eigen::VectorXd tn = t + lambda * step;
        Eigen::VectorXd zn = z0 + D * tn;
        Eigen::VectorXd fn = residual(sys, zn.data(), zn.data() + n1);
        if (fn.norm() < (1 - 1e-4 * lambda) * f.norm()) {
          t = tn;
          z = zn;
          f = fn;
          moved = true;
          break;
        }
        lambda /= 2;
      }
      if (!moved) break;
    }
    RealWitness w;
    w.x.assign(z.data(), z.data() + n1);
    w.y.assign(z.data() + n1, z.data() + n);
    if (validate_real_witness(sys, boxes, w, opts)) return w;
  }
  return std::nullopt;
}

}  // namespace bihom
