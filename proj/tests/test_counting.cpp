#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bihom;

TEST_CASE("counting: box enumeration examples") {
  auto pts = enumerate_box_points({{-0.5, 0.5}}, 2);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0] == IntVector{-1});
  CHECK(pts[2] == IntVector{1});

  auto sq = enumerate_box_points({{0, 1}, {0, 1}}, 1);
  CHECK(sq == std::vector<IntVector>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

  CHECK(enumerate_box_points({{0.3, 0.4}}, 2).empty());
  CHECK(scaled_box({{0.3, 0.4}}, 2, Boundary::closed).empty());

  // half-open boxes give complete residue systems
  CHECK(enumerate_box_points({{0, 1}}, 4, Boundary::half_open).size() == 4);
  CHECK(enumerate_box_points({{-0.5, 0.5}}, 32, Boundary::half_open).size() == 32);
}

TEST_CASE("counting: size formula matches enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<Interval> ivs;
    for (int c = 0; c < 3; ++c) {
      double lo = U(rng);
      ivs.push_back({lo, lo + 0.999 * (U(rng) + 1) / 2});
    }
    double P = 1 + 12 * (U(rng) + 1);
    for (auto b : {Boundary::closed, Boundary::half_open}) {
      auto lib = enumerate_box_points(ivs, P, b);
      auto ref = oracle::box_points(ivs, P, b);
      REQUIRE(lib == ref);
      REQUIRE(scaled_box(ivs, P, b).size() == lib.size());
    }
  }
}

TEST_CASE("counting: SYS-A at P = 2 gives 245") {
  auto a = oracle::sys_a();
  auto r = count_solutions(a, oracle::centered(a, 2, 2));
  CHECK(r.n == 245);
  CHECK(r.pairs == 729);
  CHECK(oracle::brute_count(a, oracle::centered(a, 2, 2)) == 245);
}

TEST_CASE("counting: empty boxes and zero forms") {
  auto a = oracle::sys_a();
  BoxPair bp = oracle::centered(a, 2, 2);
  bp.b1.assign(3, Interval{0.3, 0.4});
  CHECK(count_solutions(a, bp).n == 0);

  auto z = oracle::zero_form();
  CHECK(z.has_zero_form());
  auto zb = oracle::centered(z, 4, 3);
  // 5 x-values per coordinate, 3 y-values per coordinate
  CHECK(count_solutions(z, zb).n == 25 * 9);
}

TEST_CASE("counting: validation") {
  auto a = oracle::sys_a();
  BoxPair bp = oracle::centered(a, 2, 2);
  bp.b1[0] = {-0.75, 0.75};
  CHECK_THROWS_WITH_AS(bp.validate(3, 3), "box side exceeds 1", std::invalid_argument);
  CHECK_THROWS_AS(count_solutions(a, bp), std::invalid_argument);
  BoxPair small = oracle::centered(a, 0.5, 2);
  CHECK_THROWS_AS(count_solutions(a, small), std::invalid_argument);
}

TEST_CASE("counting: b = log P1 / log P2") {
  auto a = oracle::sys_a();
  CHECK(oracle::centered(a, 64, 16).b() == doctest::Approx(1.5));
  CHECK(std::isinf(oracle::centered(a, 64, 1).b()));
}

TEST_CASE("counting: strategies agree with the brute oracle") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 60; ++t) {
    oracle::RandomShape shape;
    shape.max_R = 2;
    shape.max_deg = 3;
    shape.max_n = 4;
    shape.coeff = 2;
    auto sys = oracle::random_system(rng, shape);
    double p1 = 2 + static_cast<double>(rng() % 4), p2 = 2 + static_cast<double>(rng() % 4);
    BoxPair bp = oracle::centered(sys, p1, p2);
    if (t % 3 == 0) {
      bp.b1.assign(sys.n1(), Interval{0, 1});
      bp.boundary = Boundary::half_open;
    }
    Int ref = oracle::brute_count(sys, bp);
    CountOptions g;
    g.strategy = CountStrategy::generic;
    REQUIRE(count_solutions(sys, bp, g).n == ref);
    REQUIRE(count_solutions(sys, bp).n == ref);
    if (sys.linear_fiber()) {
      CountOptions f;
      f.strategy = CountStrategy::fibered;
      REQUIRE(count_solutions(sys, bp, f).n == ref);
    }
  }
}

TEST_CASE("counting: budget") {
  auto a = oracle::sys_a();
  CountOptions o;
  o.strategy = CountStrategy::generic;
  o.budget = 10;
  CHECK_THROWS_AS(count_solutions(a, oracle::centered(a, 4, 4), o), BudgetExceeded);
}
