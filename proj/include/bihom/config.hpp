// config.hpp
//
// Experiment configuration: a small INI/TOML-like text format with the
// tables [system], [boxes], [schedule] and [parameters].
//
//   [system]
//   n1 = 3
//   n2 = 3
//   d1 = 1
//   d2 = 1
//   R = 1
//   monomial = 0 1 1,0,0 1,0,0     # form coeff x-exponents y-exponents
//
//   [boxes]
//   b1 = -1/2:1/2                  # one interval is broadcast
//   b2 = -1/2:1/2, -1/2:1/2, 0:1   # or one per coordinate
//   boundary = closed
//
//   [schedule]
//   pair = 16 16
//
//   [parameters]
//   Q = 50
//
// '#' starts a comment. Keys are case-sensitive; unknown keys are errors.

#pragma once

#include "bihom/counting.hpp"
#include "bihom/forms.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bihom {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemSpec {
  int R = 1;
  int n1 = 0, n2 = 0;
  int d1 = 1, d2 = 1;
  std::vector<MonomialRecord> records;

  FormSystem build() const;
};

struct ExperimentConfig {
  std::string source;
  SystemSpec system;

  std::vector<Interval> b1, b2;
  Boundary boundary = Boundary::closed;

  std::vector<std::pair<double, double>> schedule;  // (P1, P2)

  Int Q = 50;         // singular series truncation
  double T = 32;      // largest T for the psi_T pipeline
  double phi = 16;    // Phi for the oscillatory cross-check
  std::optional<double> codim_v1, codim_v2;  // user-declared, authoritative
  bool allow_b_below_1 = false;
  bool oscillatory_check = true;
  bool heuristic_check = true;
  std::uint64_t seed = 20240101;
  CountStrategy count_strategy = CountStrategy::automatic;
  double count_budget = 0;     // 0 = unlimited
  double local_budget = 1e9;
  double integral_budget = 5e8;
  int heuristic_samples = 10000;
  Int heuristic_modulus = 101;
  Int padic_max = 13;

  BoxPair boxes(double p1, double p2) const;
  // Semantic checks; throws ConfigError.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

// Canonical text form with every default written out.
std::string format_config(const ExperimentConfig& cfg);

}  // namespace bihom
