// quadrature.cpp

#include "bihom/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace bihom {

namespace gk {
// Abscissae and weights of the 15-point Kronrod rule and its embedded 7-point
// Gauss rule (QUADPACK values).
const double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 200) throw std::invalid_argument("Gauss-Legendre order out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1);
    double w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  if (n == 1) rule.weights[0] = 2;
  return cache.emplace(n, std::move(rule)).first->second;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& opts) {
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  AdaptiveResult res;
  std::priority_queue<Panel> heap;
  auto eval = [&](double lo, double hi) {
    auto r = gk15<double>(f, lo, hi);
    res.evals += 15;
    return Panel{lo, hi, r.value, r.error};
  };
  Panel first = eval(a, b);
  heap.push(first);
  double value = first.value, error = first.error;
  while (true) {
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
      res.converged = true;
      break;
    }
    if (res.evals + 30 > opts.max_evals) break;
    Panel p = heap.top();
    heap.pop();
    double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      heap.push(p);
      break;
    }
    Panel l = eval(p.a, m), r = eval(m, p.b);
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum from the panels to avoid drift in the running totals.
  value = 0;
  error = 0;
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    value += p.value;
    error += p.error;
  }
  res.value = value;
  res.error = error;
  res.converged = res.converged || error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  return res;
}

namespace {

struct GMRegion {
  std::vector<double> lo, hi;
  double value = 0, error = 0;
  int split = 0;
  bool operator<(const GMRegion& o) const { return error < o.error; }
};

class GenzMalik {
 public:
  explicit GenzMalik(int d) : d_(d) {
    const double n = d;
    l2_ = std::sqrt(9.0 / 70.0);
    l4_ = std::sqrt(9.0 / 10.0);
    l5_ = std::sqrt(9.0 / 19.0);
    w1_ = (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0;
    w2_ = 980.0 / 6561.0;
    w3_ = (1820.0 - 400.0 * n) / 19683.0;
    w4_ = 200.0 / 19683.0;
    w5_ = 6859.0 / 19683.0 / std::ldexp(1.0, d);
    e1_ = (729.0 - 950.0 * n + 50.0 * n * n) / 729.0;
    e2_ = 245.0 / 486.0;
    e3_ = (265.0 - 100.0 * n) / 1458.0;
    e4_ = 25.0 / 729.0;
  }

  std::size_t points() const {
    return (std::size_t{1} << d_) + 2 * static_cast<std::size_t>(d_) * d_ + 2 * d_ + 1;
  }

  void apply(const std::function<double(const double*)>& f, GMRegion& r) const {
    std::vector<double> c(d_), h(d_), x(d_);
    double vol = 1;
    for (int i = 0; i < d_; ++i) {
      c[i] = 0.5 * (r.lo[i] + r.hi[i]);
      h[i] = 0.5 * (r.hi[i] - r.lo[i]);
      vol *= r.hi[i] - r.lo[i];
    }
    x = c;
    const double f0 = f(x.data());
    double s2 = 0, s3 = 0, s4 = 0, s5 = 0;
    double best = -1;
    int split = 0;
    for (int i = 0; i < d_; ++i) {
      x[i] = c[i] - l2_ * h[i];
      double a = f(x.data());
      x[i] = c[i] + l2_ * h[i];
      double b = f(x.data());
      x[i] = c[i] - l4_ * h[i];
      double a4 = f(x.data());
      x[i] = c[i] + l4_ * h[i];
      double b4 = f(x.data());
      x[i] = c[i];
      s2 += a + b;
      s3 += a4 + b4;
      double diff = std::abs(a + b - 2 * f0 - (a4 + b4 - 2 * f0) / 7.0);
      if (diff > best * (1 + 1e-12)) {
        best = diff;
        split = i;
      }
    }
    for (int i = 0; i < d_; ++i) {
      for (int j = i + 1; j < d_; ++j) {
        for (int si = -1; si <= 1; si += 2) {
          for (int sj = -1; sj <= 1; sj += 2) {
            x[i] = c[i] + si * l4_ * h[i];
            x[j] = c[j] + sj * l4_ * h[j];
            s4 += f(x.data());
          }
        }
        x[i] = c[i];
        x[j] = c[j];
      }
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << d_); ++mask) {
      for (int i = 0; i < d_; ++i) x[i] = c[i] + ((mask >> i) & 1 ? l5_ : -l5_) * h[i];
      s5 += f(x.data());
    }
    double r7 = w1_ * f0 + w2_ * s2 + w3_ * s3 + w4_ * s4 + w5_ * s5;
    double r5 = e1_ * f0 + e2_ * s2 + e3_ * s3 + e4_ * s4;
    r.value = vol * r7;
    r.error = vol * std::abs(r7 - r5);
    r.split = split;
  }

 private:
  int d_;
  double l2_, l4_, l5_, w1_, w2_, w3_, w4_, w5_, e1_, e2_, e3_, e4_;
};

}  // namespace

AdaptiveResult cubature_adaptive(const std::function<double(const double*)>& f,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 const AdaptiveOptions& opts, const ZeroRegion& zero) {
  const int d = static_cast<int>(lo.size());
  if (d != static_cast<int>(hi.size()) || d < 1) throw std::invalid_argument("bad cubature box");
  if (d == 1) {
    if (zero && zero(lo, hi)) return {0, 0, 0, true};
    return integrate_adaptive([&](double t) { return f(&t); }, lo[0], hi[0], opts);
  }
  GenzMalik rule(d);
  AdaptiveResult res;
  std::priority_queue<GMRegion> heap;
  double value = 0, error = 0;
  auto make = [&](std::vector<double> a, std::vector<double> b) {
    if (zero && zero(a, b)) return;  // contributes exactly 0
    GMRegion r{std::move(a), std::move(b)};
    rule.apply(f, r);
    res.evals += rule.points();
    value += r.value;
    error += r.error;
    heap.push(std::move(r));
  };
  // Deterministic re-summation in a fixed region order.
  auto resum = [&]() {
    std::vector<GMRegion> all;
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const GMRegion& x, const GMRegion& y) {
      return std::tie(x.lo, x.hi) < std::tie(y.lo, y.hi);
    });
    value = 0;
    error = 0;
    for (const auto& r : all) {
      value += r.value;
      error += r.error;
    }
  };
  make(lo, hi);
  std::size_t iter = 0;
  while (!heap.empty()) {
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) break;
    if (res.evals + 2 * rule.points() > opts.max_evals) break;
    GMRegion r = heap.top();
    heap.pop();
    value -= r.value;
    error -= r.error;
    const int s = r.split;
    const double m = 0.5 * (r.lo[s] + r.hi[s]);
    auto lhi = r.hi;
    lhi[s] = m;
    auto rlo = r.lo;
    rlo[s] = m;
    make(r.lo, lhi);
    make(std::move(rlo), r.hi);
    if (++iter % 4096 == 0) resum();
  }
  resum();
  res.value = value;
  res.error = error;
  res.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  return res;
}

double halton(std::size_t index, int dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim < 0 || dim >= 16) throw std::invalid_argument("halton dimension out of range");
  const int base = primes[dim];
  double f = 1, r = 0;
  std::size_t i = index;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace bihom
