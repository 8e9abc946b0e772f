// arcs.hpp
//
// Circle-method parameters, major-arc membership, disjointness and measure.
//
// With P = P1^d1 P2^d2, dtilde = d1 + d2 - 2 and eta(theta) = R (dtilde+1) theta:
//   PLAIN arcs:  1 <= q <= P^eta,  2 |q alpha_i - a_i| <= P^(-1 + eta)
//   PRIME arcs:  1 <= q <= P^eta,  |q alpha_i - a_i| <= q P^(-1 + eta)
// Both require gcd(q, a_1, ..., a_R) = 1.

#pragma once

#include "bihom/counting.hpp"
#include "bihom/expsum.hpp"
#include "bihom/forms.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bihom {

struct CircleParams {
  int R = 1, d1 = 1, d2 = 1;
  int dtilde = 0;
  double b = 1;
  double K = 0;
  double theta0 = 0;
  double delta = 0;
  double eta = 0;  // R (dtilde + 1) theta0
  double P = 0;    // P1^d1 P2^d2; 0 until set_scale

  void set_scale(double p1, double p2);
  double eta_at(double theta) const { return R * (dtilde + 1) * theta; }
  // floor(P^eta(theta)); at theta0 unless given.
  Int q_max(std::optional<double> theta = std::nullopt) const;
  // P^(-1 + eta(theta)).
  double width(std::optional<double> theta = std::nullopt) const;
};

// 2^dtilde K = min(codim V1*, codim V2*).
double K_from_codims(double codim1, double codim2, int d1, int d2);

// The four admissibility conditions on (K, theta0, delta):
//   k_lower:  K > max(R (R+1) (dtilde+1), R (b d1 + d2))
//   gap:      K - R (R+1) (dtilde+1) > 2 delta / theta0
//   k_delta:  K > (2 delta + R) (b d1 + d2)
//   exponent: 1 > (b d1 + d2) R (dtilde+1) theta0 (2R + 3) + delta (b d1 + d2)
struct ConditionReport {
  bool k_lower = false, gap = false, k_delta = false, exponent = false;
  bool all() const { return k_lower && gap && k_delta && exponent; }
  std::string first_violation() const;
};

// Evaluates the conditions as stated (strict inequalities, no slack).
ConditionReport check_conditions(const CircleParams& p);

// Largest delta (then theta0) on a logarithmic grid meeting gap, k_delta
// and exponent with 10% slack. Throws when k_lower fails.
CircleParams choose_parameters(int R, int d1, int d2, double b, double K);

// Explicit P beyond which distinct PRIME arcs at theta0 cannot meet:
// P > 2^(1 / (1 - 3 eta)).
double disjointness_threshold(const CircleParams& p);

struct RationalCenter {
  Int q = 1;
  IntVector a;
  std::vector<double> beta;  // alpha - a/q, reduced to the nearest representative
};

enum class ArcVariant { plain, prime };

// Smallest q <= q_max with |q alpha_i - a_i| <= tol (times q when
// tol_scales_with_q) for all i and gcd(q, a) = 1.
std::optional<RationalCenter> locate_rational(std::span<const double> alpha, Int q_max, double tol,
                                              bool tol_scales_with_q);

std::optional<RationalCenter> locate_arc(std::span<const double> alpha, const CircleParams& p,
                                         ArcVariant variant,
                                         std::optional<double> theta = std::nullopt);

// All centers (q, a) with q <= q_max and gcd(q, a) = 1, a in [0, q)^R.
std::vector<RationalCenter> arc_centers(Int q_max, int R);

struct DisjointnessResult {
  bool disjoint = true;
  std::size_t arcs = 0;
  std::optional<std::pair<RationalCenter, RationalCenter>> witness;
};

// Exact check on the torus: two closed arcs of half-width w meet iff every
// coordinate distance between centers is <= 2w.
DisjointnessResult check_disjointness(Int q_max, const Rational& half_width, int R);
DisjointnessResult check_disjointness(const CircleParams& p,
                                      std::optional<double> theta = std::nullopt);

struct MeasureResult {
  Rational measure;    // exact measure of the union (on the torus)
  std::size_t arcs = 0;
  bool disjoint = true;
  double bound = 0;    // P^(-R + eta (2R + 1))
  double constant = 0; // measure / bound
};

MeasureResult arcs_measure(const CircleParams& p, std::optional<double> theta = std::nullopt);

struct ContainmentReport {
  std::size_t samples = 0;
  std::size_t plain_hits = 0;
  std::size_t violations = 0;  // located on a PLAIN arc but not on the PRIME arc
};

// Samples alpha near random centers and checks PLAIN membership implies
// PRIME membership for the same (q, a).
ContainmentReport check_containment(const CircleParams& p, std::size_t samples,
                                    std::uint64_t seed, std::optional<double> theta = std::nullopt);

struct DichotomyProbe {
  double s_abs = 0;
  double pairs = 0;
  double ratio = 0;  // |S(alpha)| / S(0)
  std::optional<Int128> m1;  // ||Gamma(xhat, e_l; ytilde)|| < P1^-1
  std::optional<Int128> m2;  // ||Gamma(xtilde; yhat, e_l)|| < P^-1
  std::optional<RationalCenter> arc;
};

DichotomyProbe probe_weyl_dichotomy(const FormSystem& sys, std::span<const double> alpha,
                                    const BoxPair& boxes, const CircleParams& p,
                                    const NearSolutionOptions& opts = {});

}  // namespace bihom
