#include "bihom/harness.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>

using namespace bihom;

namespace {

const char* kSysA = R"([system]
n1 = 3
n2 = 3
d1 = 1
d2 = 1
R = 1
monomial = 0 1 1,0,0 1,0,0
monomial = 0 1 0,1,0 0,1,0
monomial = 0 1 0,0,1 0,0,1
)";

std::string with(const std::string& rest) { return std::string(kSysA) + rest; }

// Small but complete run.
const char* kSmall = R"([system]
n1 = 3
n2 = 3
d1 = 1
d2 = 1
R = 1
monomial = 0 1 1,0,0 1,0,0
monomial = 0 1 0,1,0 0,1,0
monomial = 0 1 0,0,1 0,0,1

[boxes]
b1 = -1/2:1/2
b2 = -1/2:1/2

[schedule]
pair = 8 8
pair = 16 8

[parameters]
Q = 6
T = 8
phi = 2
codim_v1 = 3
codim_v2 = 3
heuristic_samples = 1000
padic_max = 5
)";

}  // namespace

TEST_CASE("harness: minimal config materialises defaults") {
  auto cfg = parse_config(with("[boxes]\nb1 = -1/2:1/2\nb2 = -1/2:1/2\n[schedule]\npair = 8 8\n"));
  CHECK(cfg.Q == 50);
  CHECK(cfg.T == 32);
  CHECK(cfg.phi == 16);
  CHECK(cfg.boundary == Boundary::closed);
  CHECK_FALSE(cfg.codim_v1);
  CHECK(cfg.b1.size() == 3);
  CHECK(cfg.schedule.size() == 1);
  auto text = format_config(cfg);
  CHECK(text.find("Q = 50") != std::string::npos);
  CHECK(text.find("T = 32") != std::string::npos);
  // the canonical text parses back to itself
  CHECK(format_config(parse_config(text)) == text);
  auto from_file = load_config(std::string(BIHOM_CONFIG_DIR) + "/minimal.cfg");
  CHECK(format_config(from_file).find("pair = 8 8") != std::string::npos);
}

TEST_CASE("harness: config errors") {
  CHECK_THROWS_WITH_AS(parse_config(with("[boxes]\nb1 = -3/4:3/4\nb2 = -1/2:1/2\n[schedule]\npair = 8 8\n")),
                       doctest::Contains("box side exceeds 1"), ConfigError);
  CHECK_THROWS_AS(parse_config(with("[boxes]\nb1 = -1/2:1/2\nb2 = -1/2:1/2\n[schedule]\npair = 4 8\n")),
                  ConfigError);
  auto ok = parse_config(with("[boxes]\nb1 = -1/2:1/2\nb2 = -1/2:1/2\n[schedule]\npair = 4 8\n"
                              "[parameters]\nallow_b_below_1 = true\n"));
  CHECK(ok.allow_b_below_1);
  CHECK_THROWS_WITH_AS(parse_config(with("[boxes]\nb1 = -1/2:1/2\nb2 = -1/2:1/2\n[schedule]\npair = 8 8\n"
                                         "[parameters]\nbogus = 1\n")),
                       doctest::Contains(":16:"), ConfigError);
  CHECK_THROWS_AS(parse_config(with("[boxes]\nb1 = -1/2:1/2\nb2 = -1/2:1/2\n[schedule]\npair = 8 8\n"
                                    "[parameters]\nQ = 5\nQ = 6\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(with("[boxes]\nb1 = -1/2:1/2\nb2 = -1/2:1/2\n[schedule]\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("[boxes]\nb1 = -1/2:1/2\nb2 = -1/2:1/2\n[schedule]\npair = 8 8\n"
                                    "[parameters]\nheuristic_modulus = 100\n")),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ConfigError);
  std::string mixed = "[system]\nn1 = 2\nn2 = 2\nd1 = 1\nd2 = 1\nR = 1\nmonomial = 0 1 2,0 1,0\n"
                      "[boxes]\nb1 = 0:1\nb2 = 0:1\n[schedule]\npair = 2 2\n";
  CHECK_THROWS_WITH_AS(parse_config(mixed), doctest::Contains("bidegree mismatch"), ConfigError);
}

TEST_CASE("harness: codimension heuristic") {
  auto a = estimate_codimension(oracle::sys_a(), Axis::x, 10000, 101);
  CHECK(a.estimate == 3);
  CHECK(a.spread == 0);
  CHECK(a.note.rfind("HEURISTIC", 0) == 0);
  CHECK(estimate_codimension(oracle::sys_a(), Axis::y, 10000, 101).estimate == 3);
  auto b = estimate_codimension(oracle::sys_b(), Axis::x, 10000, 101);
  CHECK(b.estimate == 2);
  CHECK(estimate_codimension(oracle::zero_form(), Axis::x, 10000, 101).estimate == 0);
  CHECK_THROWS_AS(estimate_codimension(oracle::sys_a(), Axis::x, 10000, 100), std::invalid_argument);
  CHECK_THROWS_AS(estimate_codimension(oracle::sys_a(), Axis::x, 10, 101), std::invalid_argument);
}

TEST_CASE("harness: small experiment, round trip and CSV") {
  auto cfg = parse_config(kSmall, "small");
  auto rep = run_experiment(cfg);
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) {
    REQUIRE(e.N);
    REQUIRE(e.ratio);
    CHECK(*e.ratio > 0.5);
    CHECK(*e.ratio < 2.0);
    CHECK(e.mode == "conditional");
  }
  CHECK(*rep.entries[0].N == oracle::brute_count(cfg.system.build(), cfg.boxes(8, 8)));
  CHECK(rep.exit_code() == 0);
  REQUIRE(rep.padic.size() == 3);
  for (const auto& w : rep.padic) CHECK(w.certified);
  REQUIRE(rep.real);
  CHECK(rep.real->found);

  std::string text = report_json_text(rep);
  auto back = report_from_json(nlohmann::ordered_json::parse(text));
  CHECK(report_json_text(back) == text);
  CHECK(text.find("wall_time") == std::string::npos);

  std::string csv = report_csv(rep);
  CHECK(csv.rfind("p1,p2,b,N,main_term,ratio,sigma,S_Q,J_tilde,wall_time_s\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  auto again = run_experiment(cfg);
  CHECK(report_json_text(again) == text);
}

TEST_CASE("harness: zero main term omits the ratio") {
  std::string cfg_text = R"([system]
n1 = 1
n2 = 1
d1 = 1
d2 = 1
R = 1
monomial = 0 1 1 1

[boxes]
b1 = 1/2:1
b2 = 1/2:1

[schedule]
pair = 8 8

[parameters]
Q = 4
T = 32
oscillatory_check = false
heuristic_check = false
padic_max = 3
)";
  auto rep = run_experiment(parse_config(cfg_text));
  REQUIRE(rep.sigma);
  CHECK(*rep.sigma == 0);
  REQUIRE(rep.entries.size() == 1);
  CHECK_FALSE(rep.entries[0].ratio);
  CHECK_FALSE(rep.entries[0].main_term);
  CHECK(rep.entries[0].mode == "unconditional comparison");
  bool diag = false;
  for (const auto& d : rep.entries[0].diagnostics) diag |= d.find("ratio omitted") != std::string::npos;
  CHECK(diag);
  CHECK(rep.real);
  CHECK_FALSE(rep.real->found);
}
