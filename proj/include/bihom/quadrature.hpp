// quadrature.hpp
//
// Deterministic quadrature building blocks: Gauss-Legendre rules, the
// 7/15-point Gauss-Kronrod pair, adaptive 1-D integration, Genz-Malik
// degree 7/5 adaptive cubature, and a Halton sequence for start points.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace bihom {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule (cached; nodes by Newton iteration).
const GaussRule& gauss_legendre(int n);

namespace gk {
extern const double xgk[8];
extern const double wgk[8];
extern const double wg[4];
}  // namespace gk

template <class V>
struct RuleValue {
  V value{};
  double error = 0;
};

// One 15-point Kronrod panel on [a, b]; error = |K15 - G7|.
template <class V, class F>
RuleValue<V> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  V fc = f(c);
  V k = fc * gk::wgk[7];
  V g = fc * gk::wg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * gk::xgk[j];
    V f1 = f(c - dx), f2 = f(c + dx);
    k += (f1 + f2) * gk::wgk[j];
    if (j % 2 == 1) g += (f1 + f2) * gk::wg[j / 2];
  }
  RuleValue<V> r;
  r.value = k * h;
  r.error = std::abs((k - g) * h);
  return r;
}

struct AdaptiveResult {
  double value = 0;
  double error = 0;
  std::size_t evals = 0;
  bool converged = false;
};

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_evals = 2000000;
};

// Globally adaptive bisection with gk15 panels.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& opts = {});

// Region predicate: true when the integrand vanishes identically on the box.
using ZeroRegion = std::function<bool(const std::vector<double>& lo, const std::vector<double>& hi)>;

// Globally adaptive Genz-Malik cubature over a box of dimension >= 2.
// Dimension 1 falls back to integrate_adaptive.
AdaptiveResult cubature_adaptive(const std::function<double(const double*)>& f,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 const AdaptiveOptions& opts = {}, const ZeroRegion& zero = {});

// Component `dim` of the index-th Halton point (prime bases 2, 3, 5, ...).
double halton(std::size_t index, int dim);

}  // namespace bihom
