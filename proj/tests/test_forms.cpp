#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace bihom;
using oracle::mono;

namespace {

std::vector<Rational> rat(const IntVector& v) { return {v.begin(), v.end()}; }

Rational scaled_eval(const FormSystem& sys, int i, const IntVector& x, const IntVector& y) {
  return sys.eval_form(i, x, y) * Rational(sys.scale(i));
}

// Full difference: d2 times in y with x fixed, then d1 times in x.
BigInt full_difference(const FormSystem& sys, const IntVector& alpha, const VectorTuple& t) {
  auto G = [&](const IntVector& x) {
    auto inner = [&](const IntVector& y) {
      BigInt s = 0;
      for (int i = 0; i < sys.R(); ++i) s += BigInt(alpha[i]) * numerator(scaled_eval(sys, i, x, y));
      return s;
    };
    return iterated_difference<BigInt>(inner, t.ys);
  };
  return iterated_difference<BigInt>(G, t.xs);
}

}  // namespace

TEST_CASE("forms: symmetrised tensor entries") {
  auto f = make_system(std::vector<std::vector<Monomial>>{{mono(1, {2, 0}, {1, 0})}}, 1, 2, 2, 2, 1);
  std::vector<int> j11{0, 0}, k1{0};
  CHECK(f.form(0).tensor_entry(j11, k1) == 1);
  std::vector<int> j12{0, 1}, j22{1, 1}, k2{1};
  CHECK(f.form(0).tensor_entry(j12, k1) == 0);
  CHECK(f.form(0).tensor_entry(j22, k1) == 0);
  CHECK(f.form(0).tensor_entry(j11, k2) == 0);

  auto g = make_system(std::vector<std::vector<Monomial>>{{mono(1, {1, 1}, {1, 0})}}, 1, 2, 2, 2, 1);
  std::vector<int> j21{1, 0};
  CHECK(g.form(0).tensor_entry(j12, k1) == Rational(1, 2));
  CHECK(g.form(0).tensor_entry(j21, k1) == Rational(1, 2));
}

TEST_CASE("forms: construction errors") {
  std::vector<std::vector<Monomial>> mixed{{mono(1, {1, 0}, {1, 0})}, {mono(1, {2, 0}, {1, 0})}};
  CHECK_THROWS_WITH_AS(make_system(mixed, 2, 2, 2, 1, 1), "bidegree mismatch", std::invalid_argument);
  CHECK_THROWS_AS(make_system(std::vector<std::vector<Monomial>>{{}}, 1, 2, 2, 1, 1),
                  std::invalid_argument);
  std::vector<std::vector<Monomial>> ragged{{mono(1, {1, 0, 0}, {1, 0})}};
  CHECK_THROWS_AS(make_system(ragged, 1, 2, 2, 1, 1), std::invalid_argument);
}

TEST_CASE("forms: evaluation examples") {
  auto b = oracle::sys_b();
  CHECK(b.eval_form(0, IntVector{1, 2}, IntVector{3, 4}) == 19);
  CHECK(b.eval_form(0, IntVector{2, 4}, IntVector{3, 4}) == 76);
  CHECK(b.eval_form(0, IntVector{0, 0}, IntVector{5, -7}) == 0);
  CHECK_THROWS_AS(b.eval_form(0, IntVector{1}, IntVector{3, 4}), std::invalid_argument);
  CHECK_THROWS_AS(b.eval_form(1, IntVector{1, 2}, IntVector{3, 4}), std::out_of_range);
}

TEST_CASE("forms: Gamma examples") {
  auto b = oracle::sys_b();
  CHECK(b.gamma(0, VectorTuple{{{1, 0}, {1, 0}}, {{1, 0}}}) == 2);
  CHECK(b.gamma(0, VectorTuple{{{1, 2}, {1, 2}}, {{3, 4}}}) == 38);
  auto a = oracle::sys_a();
  CHECK(a.gamma(0, VectorTuple{{{0, 1, 0}}, {{0, 1, 0}}}) == 1);
  CHECK_THROWS_AS(a.gamma(0, VectorTuple{{{0, 1}}, {{0, 1, 0}}}), std::invalid_argument);
  std::vector<double> alpha{0.5};
  CHECK(multilinear_eval(a, alpha, VectorTuple{{{1, 2, 3}}, {{1, 1, 1}}}) == doctest::Approx(3.0));
}

TEST_CASE("forms: iterated differences") {
  auto g = [](const IntVector& y) { return BigInt(y[0] * y[0]); };
  CHECK(iterated_difference<BigInt>(g, {}) == 0);
  BigInt d2 = iterated_difference<BigInt>(g, {{1}, {1}});
  CHECK(abs(d2) == 2);
  auto a = oracle::sys_a();
  auto f = [&](const IntVector& y) { return BigInt(numerator(a.eval_form(0, IntVector{1, 0, 0}, y))); };
  CHECK(abs(iterated_difference<BigInt>(f, {{1, 0, 0}})) == 1);
}

TEST_CASE("forms: jacobian rank examples") {
  auto b = oracle::sys_b();
  CHECK(jacobian_rank(b, rat({1, 0}), rat({0, 1}), Axis::x) == 0);
  CHECK(jacobian_rank(b, rat({1, 1}), rat({1, 1}), Axis::x) == 1);
  auto a = oracle::sys_a();
  CHECK(jacobian_rank(a, rat({3, -1, 2}), rat({0, 0, 0}), Axis::x) == 0);
  CHECK(jacobian_rank(a, rat({3, -1, 2}), rat({0, 0, 0}), Axis::y) == 1);
  CHECK(bareiss_rank({{1, 2}, {2, 4}}) == 1);
  CHECK(rank_mod_p({{1, 2}, {3, 4}}, 2) == 1);
  CHECK(rank_mod_p({{1, 2}, {3, 4}}, 5) == 2);
}

TEST_CASE("forms: monomial records round-trip") {
  auto r = parse_monomial_record("1 -3/4 2,0 0,1");
  CHECK(r.form == 1);
  CHECK(r.monomial.coeff == Rational(-3, 4));
  CHECK(r.monomial.xexp == std::vector<int>{2, 0});
  CHECK(format_monomial_record(r) == "1 -3/4 2,0 0,1");
  CHECK_THROWS_AS(parse_monomial_record("0 1 1,0"), std::invalid_argument);
}

TEST_CASE("forms: properties on 1000 random systems") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    auto sys = oracle::random_system(rng);
    const int d1 = sys.d1(), d2 = sys.d2(), n1 = sys.n1(), n2 = sys.n2();
    const int i = static_cast<int>(rng() % sys.R());

    // symmetry under permutations of j and k blocks
    std::vector<int> j(d1), k(d2);
    for (auto& v : j) v = static_cast<int>(rng() % n1);
    for (auto& v : k) v = static_cast<int>(rng() % n2);
    Rational base = sys.form(i).tensor_entry(j, k);
    std::sort(j.begin(), j.end());
    std::sort(k.begin(), k.end());
    do {
      auto kk = k;
      do {
        REQUIRE(sys.form(i).tensor_entry(j, kk) == base);
      } while (std::next_permutation(kk.begin(), kk.end()));
    } while (std::next_permutation(j.begin(), j.end()));

    // bihomogeneity
    auto x = oracle::random_vector(rng, n1, 4);
    auto y = oracle::random_vector(rng, n2, 4);
    Int lam = static_cast<Int>(rng() % 7) - 3, mu = static_cast<Int>(rng() % 7) - 3;
    IntVector lx = x, my = y;
    for (auto& c : lx) c *= lam;
    for (auto& c : my) c *= mu;
    Rational fx = sys.eval_form(i, x, y);
    REQUIRE(sys.eval_form(i, lx, my) == oracle::rpow(Rational(lam), d1) * oracle::rpow(Rational(mu), d2) * fx);

    // contraction consistency
    REQUIRE(sys.form(i).contract(rat(x), rat(y)) == fx);

    // Gamma with repeated arguments
    VectorTuple rep{std::vector<IntVector>(d1, x), std::vector<IntVector>(d2, y)};
    BigInt g = to_bigint(sys.gamma(i, rep));
    REQUIRE(Rational(g) == Rational(factorial(d1) * factorial(d2)) * scaled_eval(sys, i, x, y));

    // multilinearity in a random slot
    VectorTuple t;
    for (int s = 0; s < d1; ++s) t.xs.push_back(oracle::random_vector(rng, n1, 3));
    for (int s = 0; s < d2; ++s) t.ys.push_back(oracle::random_vector(rng, n2, 3));
    const int slot = static_cast<int>(rng() % (d1 + d2));
    VectorTuple ta = t, tb = t, tsum = t, tscaled = t;
    auto& va = slot < d1 ? ta.xs[slot] : ta.ys[slot - d1];
    auto& vs = slot < d1 ? tsum.xs[slot] : tsum.ys[slot - d1];
    auto& vk = slot < d1 ? tscaled.xs[slot] : tscaled.ys[slot - d1];
    auto& vb = slot < d1 ? tb.xs[slot] : tb.ys[slot - d1];
    vb = oracle::random_vector(rng, static_cast<int>(va.size()), 3);
    for (std::size_t c = 0; c < va.size(); ++c) {
      vs[c] = va[c] + vb[c];
      vk[c] = 5 * va[c];
    }
    REQUIRE(sys.gamma(i, tsum) == sys.gamma(i, ta) + sys.gamma(i, tb));
    REQUIRE(sys.gamma(i, tscaled) == 5 * sys.gamma(i, ta));

    // full difference of alpha . F equals Gamma up to sign
    IntVector alpha = oracle::random_vector(rng, sys.R(), 3);
    BigInt gam = 0;
    for (int r = 0; r < sys.R(); ++r) gam += BigInt(alpha[r]) * to_bigint(sys.gamma(r, t));
    REQUIRE(abs(full_difference(sys, alpha, t)) == abs(gam));

    // rank along X vanishes at y = 0
    REQUIRE(jacobian_rank(sys, rat(x), std::vector<Rational>(n2, 0), Axis::x) == 0);
  }
}
