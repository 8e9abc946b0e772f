#include "bihom/arcs.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace bihom;

namespace {

CircleParams base_params(double theta0, double delta, double K) {
  CircleParams p;
  p.R = 1;
  p.d1 = p.d2 = 1;
  p.dtilde = 0;
  p.b = 1;
  p.K = K;
  p.theta0 = theta0;
  p.delta = delta;
  p.eta = theta0;
  return p;
}

}  // namespace

TEST_CASE("arcs: admissibility conditions") {
  auto ok = check_conditions(base_params(0.05, 0.02, 3));
  CHECK(ok.k_lower);
  CHECK(ok.gap);
  CHECK(ok.k_delta);
  CHECK(ok.exponent);

  auto low = check_conditions(base_params(0.05, 0.02, 2));
  CHECK_FALSE(low.k_lower);
  CHECK(low.first_violation().find("K > max") == 0);

  auto gap = check_conditions(base_params(0.05, 0.2, 3));
  CHECK_FALSE(gap.gap);
}

TEST_CASE("arcs: choose_parameters") {
  CircleParams p = choose_parameters(1, 1, 1, 1.0, 3.0);
  CHECK(check_conditions(p).all());
  CHECK(p.eta == doctest::Approx(p.theta0));
  CHECK_THROWS_WITH_AS(choose_parameters(1, 1, 1, 1.0, 2.0),
                       doctest::Contains("K > max(R(R+1)(dtilde+1), R(b d1 + d2))"),
                       std::invalid_argument);
  // K fixed, b large: k_lower (via R(b d1 + d2)) eventually fails
  CHECK_THROWS_AS(choose_parameters(1, 1, 1, 5.0, 3.0), std::invalid_argument);
  CHECK(K_from_codims(3, 3, 1, 1) == 3);
  CHECK(K_from_codims(2, 4, 2, 1) == 1);
}

TEST_CASE("arcs: rational location") {
  std::vector<double> third{1.0 / 3 + 1e-9};
  auto c = locate_rational(third, 10, 1e-6, false);
  REQUIRE(c);
  CHECK(c->q == 3);
  CHECK(c->a == IntVector{1});

  std::vector<double> exact{5.0 / 8};
  auto e = locate_rational(exact, 10, 1e-12, false);
  REQUIRE(e);
  CHECK(e->q == 8);
  CHECK(e->a == IntVector{5});

  // midpoint between neighbours of every fraction with q <= 4
  std::vector<double> far{(1.0 / 4 + 1.0 / 3) / 2};
  CHECK_FALSE(locate_rational(far, 4, 1e-3, false));

  std::vector<double> pair{0.5, 0.0};
  auto two = locate_rational(pair, 5, 1e-9, false);
  REQUIRE(two);
  CHECK(two->q == 2);
  CHECK(two->a == IntVector{1, 0});
}

TEST_CASE("arcs: disjointness") {
  auto big = check_disjointness(2, Rational(1, 4), 1);
  CHECK_FALSE(big.disjoint);
  REQUIRE(big.witness);
  CHECK(big.witness->first.q == 1);
  CHECK(big.witness->second.q == 2);

  CHECK(check_disjointness(1, Rational(1, 4), 2).disjoint);
  CHECK(check_disjointness(1, Rational(1, 4), 2).arcs == 1);

  CircleParams p = choose_parameters(1, 1, 1, 1.0, 3.0);
  p.set_scale(64, 64);
  const double qm = static_cast<double>(p.q_max());
  if (p.width() < 1 / (2 * qm * qm)) CHECK(check_disjointness(p).disjoint);
  CHECK(disjointness_threshold(p) > 1);
  CHECK(check_disjointness(3, Rational(1, 100), 1).arcs == 4);  // 0/1, 1/2, 1/3, 2/3
}

TEST_CASE("arcs: measure") {
  CircleParams p = choose_parameters(1, 1, 1, 1.0, 3.0);
  double prev = 2;
  for (double P : {8.0, 32.0, 128.0}) {
    p.set_scale(P, P);
    auto m = arcs_measure(p);
    CHECK(m.disjoint);
    CHECK(to_double(m.measure) < prev);
    prev = to_double(m.measure);
    CHECK(m.constant > 0);
  }
  // overlapping arcs: union measure is below the naive sum
  CircleParams wide = base_params(0.3, 0.01, 3);
  wide.set_scale(2, 2);
  auto m = arcs_measure(wide);
  CHECK(to_double(m.measure) <= 1.0);
}

TEST_CASE("arcs: containment of PLAIN in PRIME arcs") {
  CircleParams p = choose_parameters(1, 1, 1, 1.0, 3.0);
  p.set_scale(256, 256);
  auto rep = check_containment(p, 2000, 3, 0.12);
  CHECK(rep.samples == 2000);
  CHECK(rep.plain_hits > 0);
  CHECK(rep.violations == 0);
}
