// counting.hpp
//
// Integer points in scaled boxes and exact solution counts N(P1, P2).

#pragma once

#include "bihom/forms.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bihom {

struct Interval {
  double lo = 0;
  double hi = 0;
};

// closed: P*lo <= c <= P*hi.  half_open: P*lo <= c < P*hi (complete residue
// systems, e.g. [0,1) scaled by q).
enum class Boundary { closed, half_open };

std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& s);

struct BoxPair {
  std::vector<Interval> b1;
  std::vector<Interval> b2;
  double p1 = 1;
  double p2 = 1;
  Boundary boundary = Boundary::closed;

  // log P1 / log P2; infinite when P2 = 1.
  double b() const;
  // Interval lengths <= 1, lo <= hi, P >= 1, dimensions n1/n2.
  void validate(int n1, int n2) const;
};

// Inclusive integer ranges per coordinate.
struct IntBox {
  IntVector lo;
  IntVector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool empty() const;
  UInt128 size() const;
};

// Integer range of one scaled interval, computed in exact arithmetic.
std::pair<Int, Int> scaled_range(const Interval& iv, double P, Boundary boundary);
IntBox scaled_box(const std::vector<Interval>& ivs, double P, Boundary boundary);

// Lexicographic odometer; f receives a pointer to the current point.
template <class F>
void for_each_point(const IntBox& box, F&& f) {
  if (box.empty()) return;
  const int n = box.dim();
  IntVector pt = box.lo;
  if (n == 0) {
    f(pt.data());
    return;
  }
  while (true) {
    f(static_cast<const Int*>(pt.data()));
    int c = n - 1;
    while (c >= 0 && pt[c] == box.hi[c]) {
      pt[c] = box.lo[c];
      --c;
    }
    if (c < 0) return;
    ++pt[c];
  }
}

std::vector<IntVector> enumerate_box_points(const std::vector<Interval>& ivs, double P,
                                            Boundary boundary = Boundary::closed);

enum class CountStrategy { automatic, generic, fibered };

std::string to_string(CountStrategy s);
CountStrategy parse_count_strategy(const std::string& s);

struct CountOptions {
  CountStrategy strategy = CountStrategy::automatic;
  // Upper bound on inner-loop evaluations; 0 means unlimited.
  double budget = 0;
};

struct CountResult {
  Int128 n = 0;
  UInt128 pairs = 0;  // size of the enumerated product box
  CountStrategy used = CountStrategy::generic;
};

CountResult count_solutions(const FormSystem& sys, const BoxPair& boxes,
                            const CountOptions& opts = {});

}  // namespace bihom
