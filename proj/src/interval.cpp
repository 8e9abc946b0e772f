// interval.cpp

#include "bihom/interval.hpp"

namespace bihom {

namespace {

Bounds monomial_bounds(const Term& t, const std::vector<Bounds>& xs, const std::vector<Bounds>& ys,
                       Axis skip_axis, int skip) {
  Bounds acc{static_cast<double>(t.coeff), static_cast<double>(t.coeff)};
  for (std::size_t j = 0; j < xs.size(); ++j) {
    int e = t.xexp[j];
    if (skip_axis == Axis::x && static_cast<int>(j) == skip) {
      if (e == 0) return {0, 0};
      acc = static_cast<double>(e) * acc;
      --e;
    }
    if (e) acc = acc * power(xs[j], e);
  }
  for (std::size_t k = 0; k < ys.size(); ++k) {
    int e = t.yexp[k];
    if (skip_axis == Axis::y && static_cast<int>(k) == skip) {
      if (e == 0) return {0, 0};
      acc = static_cast<double>(e) * acc;
      --e;
    }
    if (e) acc = acc * power(ys[k], e);
  }
  return acc;
}

}  // namespace

Bounds form_bounds(const FormSystem& sys, int i, const std::vector<Bounds>& xs,
                   const std::vector<Bounds>& ys) {
  Bounds total{0, 0};
  for (const auto& t : sys.terms(i)) total = total + monomial_bounds(t, xs, ys, Axis::x, -1);
  return pad(total);
}

Bounds partial_bounds(const FormSystem& sys, int i, Axis a, int j, const std::vector<Bounds>& xs,
                      const std::vector<Bounds>& ys) {
  Bounds total{0, 0};
  for (const auto& t : sys.terms(i)) total = total + monomial_bounds(t, xs, ys, a, j);
  return pad(total);
}

}  // namespace bihom
