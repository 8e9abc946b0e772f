#include "bihom/lattice.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bihom;

namespace {

LinearSystem zero_system(int n1, int n2, Rational a) {
  LinearSystem ls;
  ls.lambda.assign(n1, std::vector<Rational>(n2, Rational(0)));
  ls.a = a;
  return ls;
}

RationalMatrix diag(std::vector<Rational> d) {
  RationalMatrix m(d.size(), std::vector<Rational>(d.size(), Rational(0)));
  for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
  return m;
}

}  // namespace

TEST_CASE("lattice: decoupled U count") {
  auto ls = zero_system(1, 1, 2);
  CHECK(count_U(ls, 1) == 3);
  CHECK(oracle::brute_U(ls, 1) == 3);
  CHECK_THROWS_AS(count_U(ls, 0), std::invalid_argument);
  CHECK_THROWS_AS(count_U(zero_system(1, 1, 1), 1), std::invalid_argument);
}

TEST_CASE("lattice: U and U^t against the oracle") {
  std::mt19937_64 rng(17);
  RandomFamily fam;
  for (int t = 0; t < 80; ++t) {
    int n1 = 1 + static_cast<int>(rng() % 3), n2 = 1 + static_cast<int>(rng() % 3);
    auto ls = random_linear_system(rng, n1, n2, fam);
    Rational Z = random_rational(rng, Rational(1, 16), 1, 16);
    REQUIRE(count_U(ls, Z) == oracle::brute_U(ls, Z));
    REQUIRE(count_U(ls, Z, true) == oracle::brute_U(ls, Z, true));
  }
}

TEST_CASE("lattice: Davenport lattice shape") {
  auto d = davenport_lattice(zero_system(1, 1, 2));
  CHECK(d.lambda.matrix == diag({Rational(1, 2), 2}));
  CHECK(d.b == doctest::Approx(1.0));
  CHECK(d.lambda_nor[0][0] == doctest::Approx(0.5));

  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    int n1 = 1 + static_cast<int>(rng() % 3), n2 = 1 + static_cast<int>(rng() % 3);
    auto ls = random_linear_system(rng, n1, n2, RandomFamily{});
    auto dl = davenport_lattice(ls);
    Rational det = determinant(dl.lambda.matrix);
    Rational expect = 1;
    for (int k = 0; k < n1; ++k) expect *= ls.a;
    for (int k = 0; k < n2; ++k) expect /= ls.a;
    REQUIRE(det == expect);
    REQUIRE(det * determinant(dl.adjoint.matrix) == 1);
    REQUIRE(multiply(transpose(dl.lambda.matrix), dl.adjoint.matrix) == identity_matrix(n1 + n2));
    REQUIRE(abs(determinant(dl.adjoint_tilde.matrix)) == abs(determinant(dl.adjoint.matrix)));
  }
}

TEST_CASE("lattice: successive minima") {
  auto id = successive_minima(LatticeBasis{identity_matrix(3)});
  CHECK(id.squared == std::vector<Rational>{1, 1, 1});
  auto dg = successive_minima(LatticeBasis{diag({Rational(1, 2), 2})});
  REQUIRE(dg.values.size() == 2);
  CHECK(dg.values[0] == doctest::Approx(0.5));
  CHECK(dg.values[1] == doctest::Approx(2.0));

  // hexagonal-type basis: (1, 0), (1/2, 1): minima 1 and sqrt(5/4)
  RationalMatrix hex{{1, Rational(1, 2)}, {0, 1}};
  auto hm = successive_minima(LatticeBasis{hex});
  CHECK(hm.squared[0] == 1);
  CHECK(hm.squared[1] == Rational(5, 4));
}

TEST_CASE("lattice: shrinking-lemma ratios") {
  auto ls = zero_system(2, 2, 3);
  auto same = check_shrinking_lemma(ls, Rational(1, 2), Rational(1, 2));
  CHECK(same.ratio == 1);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    auto r = random_linear_system(rng, 2, 2, RandomFamily{});
    Rational z = random_rational(rng, Rational(1, 16), 1, 16);
    auto c = check_shrinking_lemma(r, z, z);
    REQUIRE(c.ratio <= 1);
  }
  CHECK_THROWS_AS(check_shrinking_lemma(ls, Rational(1, 2), Rational(1, 4)), std::invalid_argument);

  auto rows = lemma51_batch(20, 5);
  REQUIRE(rows.size() == 20);
  for (const auto& row : rows) {
    REQUIRE(row.check.bound > 0);
    REQUIRE(row.z1 <= row.z2);
  }
  auto again = lemma51_batch(20, 5);
  for (std::size_t i = 0; i < rows.size(); ++i) REQUIRE(again[i].check.ratio == rows[i].check.ratio);
}

TEST_CASE("lattice: Mahler products stay in [1/8, 8]") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    int n1 = 1 + static_cast<int>(rng() % 2), n2 = 1 + static_cast<int>(rng() % 2);
    auto ls = random_linear_system(rng, n1, n2, RandomFamily{});
    for (double v : mahler_products(ls)) {
      REQUIRE(v >= 0.125);
      REQUIRE(v <= 8.0);
    }
  }
}
