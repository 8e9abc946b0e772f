// types.hpp
//
// Shared scalar types and error classes. Exact arithmetic goes through
// Boost.Multiprecision (header-only); hot enumeration loops use 64/128-bit
// machine integers.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bihom {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using Int = std::int64_t;
using Int128 = __int128;
using UInt128 = unsigned __int128;

using IntVector = std::vector<Int>;
using RealVector = std::vector<double>;

// Thrown when an enumeration would exceed its configured work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : std::runtime_error("budget exceeded: " + what) {}
};

// A strict-inequality count hit a value within the guard band of its
// threshold; the caller must perturb the inputs.
class AmbiguousThreshold : public std::runtime_error {
 public:
  explicit AmbiguousThreshold(const std::string& what)
      : std::runtime_error("ambiguous threshold: " + what) {}
};

std::string to_string(Int128 v);
std::string to_string(UInt128 v);
BigInt to_bigint(Int128 v);

// Exact conversion: every finite double is a dyadic rational.
Rational exact_rational(double v);
double to_double(const Rational& r);

// Parses "p", "-p" or "p/q".
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int mod(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace bihom
