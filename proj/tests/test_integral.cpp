#include "bihom/integral.hpp"
#include "bihom/quadrature.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace bihom;

namespace {

FormSystem two_forms() {
  using oracle::mono;
  // x1 y1 - x2 y2, x1 y2 + x2 y1 - x2 y2
  std::vector<std::vector<Monomial>> f{
      {mono(1, {1, 0}, {1, 0}), mono(-1, {0, 1}, {0, 1})},
      {mono(1, {1, 0}, {0, 1}), mono(1, {0, 1}, {1, 0}), mono(-1, {0, 1}, {0, 1})}};
  return make_system(f, 2, 2, 2, 1, 1);
}

FormSystem biquadratic() {
  using oracle::mono;
  std::vector<std::vector<Monomial>> f{
      {mono(1, {2, 0}, {2}), mono(-2, {1, 1}, {2}), mono(Rational(1, 2), {0, 2}, {2})}};
  return make_system(f, 1, 2, 1, 2, 2);
}

}  // namespace

TEST_CASE("integral: quadrature rules") {
  const auto& g = gauss_legendre(5);
  double s = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9).epsilon(1e-13));
  auto r = integrate_adaptive([](double x) { return std::exp(x); }, 0, 1);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-12));
  auto c = cubature_adaptive([](const double* x) { return x[0] * x[1]; }, {0, 0}, {1, 2});
  CHECK(c.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(halton(1, 0) == 0.5);
  CHECK(halton(1, 1) == doctest::Approx(1.0 / 3));

  QuadratureSpec bad;
  bad.order = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("integral: I(0) is the box volume") {
  for (const auto& sys : {oracle::sys_a(), oracle::sys_b(), biquadratic()}) {
    std::vector<double> u(sys.R(), 0.0);
    auto r = oracle::centered(sys, 1, 1);
    auto I = oscillatory_I(sys, u, r);
    CHECK(I.value.real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(I.value.imag()) < 1e-14);
  }
  auto sys = oracle::sys_a();
  BoxPair half = oracle::centered(sys, 1, 1);
  half.b1[0] = {0, 0.5};
  std::vector<double> u{0.0};
  CHECK(oscillatory_I(sys, u, half).value.real() == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("integral: conjugation and modulus bound") {
  for (const auto& sys : {oracle::sys_a(), oracle::sys_b(), two_forms(), biquadratic()}) {
    auto boxes = oracle::centered(sys, 1, 1);
    for (double s : {0.3, 1.0, 2.5, 7.0}) {
      std::vector<double> u(sys.R(), s), v(sys.R(), -s);
      if (sys.R() == 2) {
        u[1] = -0.4 * s;
        v[1] = 0.4 * s;
      }
      auto a = oscillatory_I(sys, u, boxes);
      auto b = oscillatory_I(sys, v, boxes);
      REQUIRE(a.converged);
      CHECK(std::abs(a.value - std::conj(b.value)) < 1e-8);
      CHECK(std::abs(a.value) <= 1 + 1e-9);
    }
  }
}

TEST_CASE("integral: oscillatory I against quasi-Monte Carlo") {
  struct Case {
    FormSystem sys;
    std::vector<double> u;
  };
  std::vector<Case> cases{{oracle::sys_a(), {1.0}},
                          {oracle::sys_b(), {2.0}},
                          {two_forms(), {1.5, -0.5}},
                          {biquadratic(), {3.0}}};
  for (const auto& c : cases) {
    auto boxes = oracle::centered(c.sys, 1, 1);
    auto I = oscillatory_I(c.sys, c.u, boxes);
    auto q = oracle::qmc_oscillatory(c.sys, c.u, boxes, std::size_t{1} << 20, 16, 99);
    double bar = std::hypot(I.error, q.stderr_);
    INFO("I = " << I.value << " qmc = " << q.value << " bar = " << bar);
    CHECK(std::abs(I.value - q.value) <= 3 * bar);
    CHECK(q.stderr_ < 1e-3);
  }
  // SYS-A value from the product formula: int sinc over the y-box
  auto a = oracle::sys_a();
  std::vector<double> one{1.0};
  auto I = oscillatory_I(a, one, oracle::centered(a, 1, 1));
  auto inner = [](double x) {
    return std::abs(x) < 1e-15 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
  };
  auto r = integrate_adaptive(inner, -0.5, 0.5);
  CHECK(I.value.real() == doctest::Approx(std::pow(r.value, 3)).epsilon(1e-9));
}

TEST_CASE("integral: J(Phi) near zero and realness") {
  auto a = oracle::sys_a();
  auto boxes = oracle::centered(a, 1, 1);
  auto small = singular_integral_partial(a, 1e-3, boxes);
  CHECK(small.value == doctest::Approx(2e-3).epsilon(1e-5));
  auto two = two_forms();
  auto s2 = singular_integral_partial(two, 1e-3, oracle::centered(two, 1, 1));
  CHECK(s2.value == doctest::Approx(4e-6).epsilon(1e-5));

  QuadratureSpec spec;
  auto j = singular_integral_partial(a, 2, boxes, spec);
  CHECK(j.converged);
  CHECK(j.real_ok);
  CHECK(std::abs(j.imag) <= 10 * spec.tolerance);
  CHECK(j.value == doctest::Approx(2.58474244).epsilon(1e-6));

  auto b = oracle::sys_b();
  auto jb = singular_integral_partial(b, 2, oracle::centered(b, 1, 1), spec);
  CHECK(jb.real_ok);
  CHECK_THROWS_AS(singular_integral_partial(a, 0, boxes), std::invalid_argument);
}

TEST_CASE("integral: hat weights") {
  CHECK(psi(0) == 1);
  CHECK(psi(0.5) == 0.5);
  CHECK(psi(-2) == 0);
  CHECK(psi_T(0.25, 2) == 1);
  CHECK(psi_T(0.6, 2) == 0);
  CHECK(psi_T(-0.1, 4) == doctest::Approx(2.4));
}

TEST_CASE("integral: Jt_T against quasi-Monte Carlo") {
  struct Case {
    FormSystem sys;
    double T;
  };
  std::vector<Case> cases{{oracle::sys_a(), 4}, {oracle::sys_b(), 4}, {two_forms(), 3},
                          {biquadratic(), 4}};
  for (const auto& c : cases) {
    auto boxes = oracle::centered(c.sys, 1, 1);
    auto v = schmidt_J_T(c.sys, c.T, boxes);
    auto q = oracle::qmc_hat(c.sys, c.T, boxes, std::size_t{1} << 20, 16, 5);
    double bar = std::hypot(v.error, q.stderr_);
    INFO("Jt = " << v.value << " qmc = " << q.value.real() << " bar = " << bar);
    CHECK(v.converged);
    CHECK(std::abs(v.value - q.value.real()) <= 3 * bar + 1e-6);
  }
}

TEST_CASE("integral: zero form is degenerate") {
  auto z = oracle::zero_form();
  auto boxes = oracle::centered(z, 1, 1);
  CHECK(schmidt_J_T(z, 8, boxes).value == doctest::Approx(8.0).epsilon(1e-12));
  auto r = schmidt_J(z, 16, boxes);
  CHECK(r.degenerate);
  CHECK_FALSE(r.converged);
  CHECK(r.note == "degenerate: dim V(0) hypothesis violated");
  CHECK(r.value == doctest::Approx(16.0));
}

TEST_CASE("integral: real witnesses") {
  auto a = oracle::sys_a();
  auto boxes = oracle::centered(a, 1, 1);
  RealWitness hand;
  hand.x = {0.25, 0, 0};
  hand.y = {0, 0.25, 0};
  CHECK(validate_real_witness(a, boxes, hand));
  CHECK(hand.rank == 1);
  RealWitness edge;
  edge.x = {0.5, 0, 0};
  edge.y = {0, 0.25, 0};
  CHECK_FALSE(validate_real_witness(a, boxes, edge));
  RealWitness off;
  off.x = {0.25, 0, 0};
  off.y = {0.25, 0, 0};
  CHECK_FALSE(validate_real_witness(a, boxes, off));

  for (const auto& sys : {oracle::sys_a(), oracle::sys_b(), two_forms(), biquadratic()}) {
    auto bx = oracle::centered(sys, 1, 1);
    auto w = find_nonsingular_real_zero(sys, bx);
    REQUIRE(w);
    CHECK(w->rank == sys.R());
    for (double r : w->residuals) CHECK(std::abs(r) < 1e-10);
    RealWitness copy = *w;
    CHECK(validate_real_witness(sys, bx, copy));
  }

  auto z = oracle::zero_form();
  CHECK_FALSE(find_nonsingular_real_zero(z, oracle::centered(z, 1, 1)));
}
