// harness.hpp
//
// Experiment orchestration: exact counts N(P1, P2) against the prediction
// sigma P1^(n1 - R d1) P2^(n2 - R d2) with sigma = S(Q) * Jt, plus the
// codimension heuristic, positivity witnesses and report emission.

#pragma once

#include "bihom/arcs.hpp"
#include "bihom/config.hpp"
#include "bihom/integral.hpp"
#include "bihom/local.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bihom {

// HEURISTIC estimate of the codimension (in F_p^(n1+n2)) of the locus where
// the R x n_axis Jacobian along `axis` has rank < R. Random affine s-planes
// are enumerated mod p for s = 0, 1, 2, ...; the estimate is the least s for
// which at least half of the planes meet the locus. Each frequency is also
// computed on two disjoint halves of the planes and `spread` is the
// disagreement between the resulting estimates.
struct CodimEstimate {
  Axis axis = Axis::x;
  int estimate = 0;
  int spread = 0;
  bool lower_bound_only = false;  // stopped before any s reached 1/2
  Int modulus = 101;
  int samples = 0;
  std::vector<double> frequencies;  // index s
  std::string note;
};

CodimEstimate estimate_codimension(const FormSystem& sys, Axis axis, int samples, Int modulus,
                                   std::uint64_t seed = 1);

struct EntryReport {
  double p1 = 0, p2 = 0, b = 0;
  bool b_below_1 = false;
  std::string status = "ok";  // ok | budget | error
  std::optional<Int> N;
  std::optional<double> main_term;           // sigma P1^(n1 - R d1) P2^(n2 - R d2)
  std::optional<double> main_term_identity;  // P1^n1 P2^n2 P^(-R) sigma
  std::optional<double> ratio;               // N / main_term
  std::string mode;  // "conditional" or "unconditional comparison"
  std::optional<CircleParams> params;
  std::vector<std::string> diagnostics;
  double wall_time_s = 0;  // CSV only; never serialized to JSON
};

struct PadicReport {
  Int p = 2;
  bool certified = false;
  IntVector x, y;
  int rank = 0;
  std::size_t inconclusive = 0;
  std::string status = "ok";
};

struct RealReport {
  bool found = false;
  RealVector x, y;
  std::vector<double> residuals, singular_values;
  int rank = 0;
};

struct PredictionReport {
  std::string config;  // canonical config text, defaults included

  std::optional<double> declared_codim_v1, declared_codim_v2;
  std::optional<CodimEstimate> heuristic_v1, heuristic_v2;
  std::optional<double> K;

  Int Q = 0;
  std::optional<std::string> S_Q_exact;
  std::optional<double> S_Q;
  std::optional<SchmidtResult> J_tilde;
  std::optional<SingularIntegral> J_osc;
  std::optional<double> sigma;

  std::vector<EntryReport> entries;
  std::optional<double> empirical_rate;  // slope of log|ratio - 1| against log P1

  std::vector<PadicReport> padic;
  std::optional<RealReport> real;

  std::vector<std::pair<std::string, std::string>> stages;  // stage -> status
  std::vector<std::string> warnings;

  bool partial() const;
  int exit_code() const { return partial() ? 2 : 0; }
};

PredictionReport run_experiment(const ExperimentConfig& cfg);

nlohmann::ordered_json to_json(const PredictionReport& r);
PredictionReport report_from_json(const nlohmann::ordered_json& j);
std::string report_json_text(const PredictionReport& r);

// Columns: p1, p2, b, N, main_term, ratio, sigma, S_Q, J_tilde, wall_time_s.
std::string report_csv(const PredictionReport& r);

}  // namespace bihom
