// types.cpp

#include "bihom/types.hpp"

#include <algorithm>
#include <cmath>

namespace bihom {

std::string to_string(UInt128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string to_string(Int128 v) {
  if (v < 0) return "-" + to_string(static_cast<UInt128>(-(v + 1)) + 1);
  return to_string(static_cast<UInt128>(v));
}

BigInt to_bigint(Int128 v) {
  bool neg = v < 0;
  UInt128 mag = neg ? static_cast<UInt128>(-(v + 1)) + 1 : static_cast<UInt128>(v);
  BigInt r = static_cast<std::uint64_t>(mag >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(mag);
  return neg ? BigInt(-r) : r;
}

Rational exact_rational(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational form");
  int exp = 0;
  double mant = std::frexp(v, &exp);
  // 53 significant bits fit in an int64 after scaling.
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  BigInt num = m;
  BigInt den = 1;
  if (exp >= 0) {
    num <<= exp;
  } else {
    den <<= -exp;
  }
  return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  auto parse_int = [&](const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer in '" + text + "'");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw std::invalid_argument("bad integer in '" + text + "'");
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad integer in '" + text + "'");
    }
    return BigInt(s[0] == '+' ? s.substr(1) : s);
  };
  if (slash == std::string::npos) return Rational(parse_int(text));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  return Rational(parse_int(text.substr(0, slash)), den);
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace bihom
