// interval.hpp
//
// Naive interval arithmetic for enclosing polynomial ranges over boxes.
// Enclosures are padded by a small relative margin to absorb rounding.

#pragma once

#include "bihom/forms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bihom {

struct Bounds {
  double lo = 0;
  double hi = 0;

  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

inline Bounds operator+(Bounds a, Bounds b) { return {a.lo + b.lo, a.hi + b.hi}; }

inline Bounds operator*(Bounds a, Bounds b) {
  double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

inline Bounds operator*(double s, Bounds a) {
  return s >= 0 ? Bounds{s * a.lo, s * a.hi} : Bounds{s * a.hi, s * a.lo};
}

// Tight enclosure of x^e (even powers stay non-negative).
inline Bounds power(Bounds x, int e) {
  if (e == 0) return {1, 1};
  double a = std::pow(x.lo, e), b = std::pow(x.hi, e);
  if (e % 2 == 1) return {a, b};
  if (x.lo <= 0 && x.hi >= 0) return {0, std::max(a, b)};
  return {std::min(a, b), std::max(a, b)};
}

inline Bounds pad(Bounds b) {
  double m = 1e-12 * (std::abs(b.lo) + std::abs(b.hi)) + 1e-300;
  return {b.lo - m, b.hi + m};
}

// Enclosure of the scaled form i over the box x in xs, y in ys.
Bounds form_bounds(const FormSystem& sys, int i, const std::vector<Bounds>& xs,
                   const std::vector<Bounds>& ys);

// Enclosure of a partial derivative of the scaled form i.
Bounds partial_bounds(const FormSystem& sys, int i, Axis a, int j, const std::vector<Bounds>& xs,
                      const std::vector<Bounds>& ys);

}  // namespace bihom
