// bihom: command-line front end.
//
//   bihom count      --config F [--p1 X --p2 Y] [--strategy auto|generic|fibered]
//   bihom expsum     --config F --p1 X --p2 Y --alpha a1,...,aR
//   bihom expsum     --config F --q Q --a a1,...,aR
//   bihom lattice verify-lemma51 [--instances N] [--seed S] [--csv out.csv]
//   bihom arcs       --config F --p1 X --p2 Y [--locate a1,...,aR]
//   bihom sseries    --config F [--Q N] [--euler p:l,p:l,...]
//   bihom sintegral  --config F [--phi X] [--T X] [--method osc|schmidt]
//   bihom experiment --config F [--out report.json] [--csv table.csv]
//
// Exit codes: 0 success, 2 partial success (budget exhausted), 1 error.

#include "bihom/arcs.hpp"
#include "bihom/config.hpp"
#include "bihom/counting.hpp"
#include "bihom/expsum.hpp"
#include "bihom/harness.hpp"
#include "bihom/integral.hpp"
#include "bihom/lattice.hpp"
#include "bihom/local.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bihom;
using nlohmann::ordered_json;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_of(".eE") != std::string::npos) {
      out.push_back(std::stod(item));
    } else {
      out.push_back(to_double(parse_rational(item)));
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string rational_text(const Rational& r) { return to_string(r); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting and circle-method predictions for bihomogeneous systems"};
  app.require_subcommand(1);

  std::string config_path;
  double p1 = 0, p2 = 0;

  auto* count = app.add_subcommand("count", "exact solution counts N(P1, P2)");
  std::string strategy = "auto";
  count->add_option("--config", config_path, "experiment config")->required();
  count->add_option("--p1", p1, "P1 (default: every schedule entry)");
  count->add_option("--p2", p2, "P2");
  count->add_option("--strategy", strategy, "auto|generic|fibered");

  auto* expsum = app.add_subcommand("expsum", "exponential sum S(alpha) or complete sum S_{a,q}");
  std::string alpha_text, a_text;
  Int q = 0;
  expsum->add_option("--config", config_path, "experiment config")->required();
  expsum->add_option("--p1", p1, "P1");
  expsum->add_option("--p2", p2, "P2");
  auto* alpha_opt = expsum->add_option("--alpha", alpha_text, "comma-separated alpha (rationals allowed)");
  auto* q_opt = expsum->add_option("--q", q, "modulus of a complete sum");
  expsum->add_option("--a", a_text, "comma-separated residues for --q")->needs(q_opt);
  q_opt->excludes(alpha_opt);

  auto* lattice = app.add_subcommand("lattice", "geometry-of-numbers checks");
  auto* lemma = lattice->add_subcommand("verify-lemma51", "shrinking-lemma ratios on random systems");
  lattice->require_subcommand(1);
  int instances = 200;
  std::uint64_t seed = 20240101;
  std::string csv_path;
  lemma->add_option("--instances", instances, "number of random instances");
  lemma->add_option("--seed", seed, "RNG seed");
  lemma->add_option("--csv", csv_path, "CSV output (stdout if omitted)");

  auto* arcs = app.add_subcommand("arcs", "circle-method parameters and arc hygiene");
  arcs->add_option("--config", config_path, "experiment config")->required();
  arcs->add_option("--p1", p1, "P1")->required();
  arcs->add_option("--p2", p2, "P2")->required();
  std::string locate_text;
  arcs->add_option("--locate", locate_text, "alpha to place on a major arc");

  auto* sseries = app.add_subcommand("sseries", "singular series truncation S(Q)");
  Int Q = 0;
  sseries->add_option("--config", config_path, "experiment config")->required();
  sseries->add_option("--Q", Q, "truncation (default: config value)");
  std::string euler_text;
  sseries->add_option("--euler", euler_text, "local factors as p:l pairs, e.g. 2:3,3:2");

  auto* sintegral = app.add_subcommand("sintegral", "singular integral");
  double phi = 0, T = 0;
  std::string method = "schmidt";
  sintegral->add_option("--config", config_path, "experiment config")->required();
  sintegral->add_option("--phi", phi, "Phi for the oscillatory route");
  sintegral->add_option("--T", T, "largest T for the psi_T route");
  sintegral->add_option("--method", method, "osc|schmidt")->check(CLI::IsMember({"osc", "schmidt"}));

  auto* experiment = app.add_subcommand("experiment", "full count-vs-prediction run");
  std::string out_path;
  experiment->add_option("--config", config_path, "experiment config")->required();
  experiment->add_option("--out", out_path, "JSON report (stdout if omitted)");
  experiment->add_option("--csv", csv_path, "CSV table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*lattice) {
      std::ostringstream csv;
      csv << "instance,n1,n2,a,z1,z2,u_z2,bound,ratio\n";
      for (const auto& r : lemma51_batch(instances, seed)) {
        csv << r.instance << "," << r.n1 << "," << r.n2 << "," << rational_text(r.a) << ","
            << rational_text(r.z1) << "," << rational_text(r.z2) << "," << to_string(r.check.u_z2)
            << "," << to_double(r.check.bound) << "," << to_double(r.check.ratio) << "\n";
      }
      if (csv_path.empty()) {
        std::cout << csv.str();
      } else {
        write_file(csv_path, csv.str());
      }
      return 0;
    }

    ExperimentConfig cfg = load_config(config_path);
    FormSystem sys = cfg.system.build();

    if (*count) {
      std::vector<std::pair<double, double>> pairs = cfg.schedule;
      if (p1 > 0 || p2 > 0) pairs = {{p1, p2}};
      ordered_json out = ordered_json::array();
      for (auto [a, b] : pairs) {
        CountOptions co;
        co.strategy = parse_count_strategy(strategy);
        co.budget = cfg.count_budget;
        auto t0 = std::chrono::steady_clock::now();
        CountResult r = count_solutions(sys, cfg.boxes(a, b), co);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back({{"p1", a}, {"p2", b}, {"n", to_string(r.n)}, {"wall_time", secs}});
      }
      // one record for an explicit pair, an array for the schedule
      std::cout << (out.size() == 1 ? out[0] : out).dump(2) << "\n";
      return 0;
    }
    if (*expsum) {
      ordered_json out;
      if (q > 0) {
        IntVector av;
        for (double v : parse_list(a_text)) av.push_back(static_cast<Int>(v));
        if (a_text.empty()) av.assign(sys.R(), 0);
        CompleteSum cs = complete_sum(sys, av, q);
        Int pairs = 0;
        for (Int c : cs.histogram) pairs += c;
        out = {{"re", cs.value.real()}, {"im", cs.value.imag()}, {"abs", std::abs(cs.value)},
               {"pairs", pairs}};
      } else {
        if (alpha_text.empty() || p1 <= 0 || p2 <= 0) throw std::runtime_error("expsum needs --p1, --p2 and --alpha, or --q");
        BoxPair bp = cfg.boxes(p1, p2);
        Complex s = weyl_sum(sys, parse_list(alpha_text), bp);
        std::size_t pairs = enumerate_box_points(bp.b1, bp.p1, bp.boundary).size() *
                            enumerate_box_points(bp.b2, bp.p2, bp.boundary).size();
        out = {{"re", s.real()}, {"im", s.imag()}, {"abs", std::abs(s)}, {"pairs", pairs}};
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*arcs) {
      if (!cfg.codim_v1 || !cfg.codim_v2) throw std::runtime_error("config must declare codim_v1/codim_v2");
      double K = K_from_codims(*cfg.codim_v1, *cfg.codim_v2, sys.d1(), sys.d2());
      CircleParams cp = choose_parameters(sys.R(), sys.d1(), sys.d2(), cfg.boxes(p1, p2).b(), K);
      cp.set_scale(p1, p2);
      DisjointnessResult dj = check_disjointness(cp);
      MeasureResult ms = arcs_measure(cp);
      ordered_json out;
      out["K"] = K;
      out["theta0"] = cp.theta0;
      out["delta"] = cp.delta;
      out["eta"] = cp.eta;
      out["P"] = cp.P;
      out["q_max"] = cp.q_max();
      out["width"] = cp.width();
      out["disjointness_threshold"] = disjointness_threshold(cp);
      out["disjoint"] = dj.disjoint;
      out["arcs"] = dj.arcs;
      out["measure"] = to_double(ms.measure);
      out["measure_bound"] = ms.bound;
      out["measure_constant"] = ms.constant;
      if (!locate_text.empty()) {
        auto alpha = parse_list(locate_text);
        auto c = locate_arc(alpha, cp, ArcVariant::prime);
        if (c) {
          out["locate"] = {{"q", c->q}, {"a", c->a}, {"beta", c->beta}};
        } else {
          out["locate"] = nullptr;
        }
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*sseries) {
      LocalOptions lo;
      lo.budget = cfg.local_budget;
      SeriesResult s = singular_series_partial(sys, Q > 0 ? Q : cfg.Q, lo);
      ordered_json out{{"Q", Q > 0 ? Q : cfg.Q},
                       {"exact", to_string(s.value)},
                       {"value", to_double(s.value)}};
      if (!euler_text.empty()) {
        ordered_json factors = ordered_json::array();
        std::stringstream in(euler_text);
        std::string item;
        while (std::getline(in, item, ',')) {
          auto colon = item.find(':');
          if (colon == std::string::npos) throw std::runtime_error("--euler expects p:l, got " + item);
          LocalFactor f = local_factor(sys, std::stoll(item.substr(0, colon)), std::stoi(item.substr(colon + 1)), lo);
          factors.push_back({{"p", f.p}, {"l", f.l}, {"exact", to_string(f.partial)},
                             {"value", to_double(f.partial)}});
        }
        out["euler"] = factors;
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*sintegral) {
      ordered_json out;
      if (method == "osc") {
        QuadratureSpec qs;
        qs.budget = cfg.integral_budget;
        SingularIntegral j = singular_integral_partial(sys, phi > 0 ? phi : cfg.phi, cfg.boxes(1, 1), qs);
        out = {{"value", j.value}, {"error_estimate", j.error}, {"converged", j.converged}};
      } else {
        SchmidtResult j = schmidt_J(sys, T > 0 ? T : cfg.T, cfg.boxes(1, 1));
        out = {{"value", j.value}, {"error_estimate", j.error}, {"converged", j.converged}};
        if (j.degenerate) out["note"] = j.note;
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*experiment) {
      PredictionReport rep = run_experiment(cfg);
      std::string text = report_json_text(rep);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_file(out_path, text);
      }
      if (!csv_path.empty()) write_file(csv_path, report_csv(rep));
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
      return rep.exit_code();
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
