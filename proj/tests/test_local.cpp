#include "bihom/local.hpp"
#include "bihom/numtheory.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bihom;

TEST_CASE("local: number theory helpers") {
  CHECK(is_prime(101));
  CHECK_FALSE(is_prime(91));
  CHECK(primes_up_to(13) == std::vector<Int>{2, 3, 5, 7, 11, 13});
  CHECK(mobius(30) == -1);
  CHECK(mobius(12) == 0);
  CHECK(euler_phi(12) == 4);
  CHECK(jordan_totient(4, 2) == 12);
  CHECK(divisors(12) == std::vector<Int>{1, 2, 3, 4, 6, 12});
  auto lat = column_lattice_mod({{2, 4}}, 2, 8);
  CHECK(lat.index() == 16);
}

TEST_CASE("local: congruence counts") {
  auto a = oracle::sys_a();
  CHECK(count_mod_q(a, 1) == 1);
  CHECK(count_mod_q(a, 2) == 36);
  auto z = oracle::zero_form();
  CHECK(count_mod_q(z, 3) == 81);

  std::mt19937_64 rng(13);
  for (int t = 0; t < 25; ++t) {
    oracle::RandomShape shape;
    shape.max_deg = 3;
    shape.max_n = 4;
    auto sys = oracle::random_system(rng, shape);
    Int q = 2 + static_cast<Int>(rng() % 5);
    Int ref = oracle::brute_count_mod(sys, q);
    LocalOptions brute;
    brute.strategy = CongruenceStrategy::brute;
    REQUIRE(count_mod_q(sys, q, brute) == ref);
    REQUIRE(count_mod_q(sys, q) == ref);
  }
}

TEST_CASE("local: singular series truncations") {
  auto a = oracle::sys_a();
  CHECK(singular_series_partial(a, 1).value == 1);
  CHECK(singular_series_partial(a, 2).value == Rational(9, 8));
  CHECK(local_factor(a, 2, 1).partial == Rational(9, 8));
  CHECK(local_factor(a, 2, 0).partial == 1);
  CHECK(local_factor(oracle::sys_b(), 3, 0).partial == 1);

  LocalOptions direct;
  direct.multiplicative = false;
  auto m = singular_series_partial(a, 12);
  auto d = singular_series_partial(a, 12, direct);
  CHECK(m.value == d.value);
  CHECK(m.a_values == d.a_values);

  auto b = oracle::sys_b();
  auto mb = singular_series_partial(b, 10);
  auto db = singular_series_partial(b, 10, direct);
  CHECK(mb.value == db.value);
}

TEST_CASE("local: coprime sums against the oracle") {
  auto b = oracle::sys_b();
  for (Int q : {2, 3, 4, 5, 6}) {
    auto cs = coprime_sum(b, q);
    std::complex<double> ref = 0;
    for (Int a = 1; a < q; ++a) {
      if (std::gcd(a, q) == 1) ref += oracle::brute_complete(b, {a}, q);
    }
    CHECK(cs.float_value == doctest::Approx(ref.real()).epsilon(1e-9));
    CHECK(static_cast<double>(cs.exact) == doctest::Approx(ref.real()).epsilon(1e-9));
    CHECK(std::abs(ref.imag()) < 1e-8);
  }
}

TEST_CASE("local: orthogonality identity is exact") {
  auto a = oracle::sys_a();
  LocalOptions brute;
  brute.strategy = CongruenceStrategy::brute;
  for (auto [p, l] : std::vector<std::pair<Int, int>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}, {5, 1}}) {
    auto chk = orthogonality_check(a, p, l, {}, brute);
    CHECK(chk.equal());
  }
  auto b = oracle::sys_b();
  CHECK(orthogonality_check(b, 2, 3).equal());
  CHECK(orthogonality_check(b, 3, 2).equal());
}

TEST_CASE("local: p-adic witnesses") {
  auto a = oracle::sys_a();
  auto w2 = find_nonsingular_padic_zero(a, 2);
  REQUIRE(w2.witness);
  CHECK(w2.witness->rank == 1);
  CHECK(verify_padic_witness(a, *w2.witness));
  PadicWitness hand{2, {1, 0, 0}, {0, 1, 0}, 1};
  CHECK(verify_padic_witness(a, hand));
  PadicWitness bad{2, {1, 0, 0}, {1, 0, 0}, 1};
  CHECK_FALSE(verify_padic_witness(a, bad));

  auto b = oracle::sys_b();
  auto w3 = find_nonsingular_padic_zero(b, 3);
  REQUIRE(w3.witness);
  CHECK(verify_padic_witness(b, *w3.witness));
  PadicWitness hb{3, {1, 1}, {1, 2}, 1};
  CHECK(verify_padic_witness(b, hb));

  auto z = oracle::zero_form();
  auto wz = find_nonsingular_padic_zero(z, 5);
  CHECK_FALSE(wz.witness);
  CHECK(wz.inconclusive > 0);
  CHECK_THROWS_AS(find_nonsingular_padic_zero(a, 4), std::invalid_argument);
}
