// config.cpp

#include "bihom/config.hpp"

#include "bihom/numtheory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bihom {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Parser {
 public:
  Parser(const std::string& source) : source_(source) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  void set_line(int l) { line_ = l; }

  double number(const std::string& v) const {
    try {
      return to_double(parse_rational(v));
    } catch (const std::exception&) {
    }
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(d)) fail("expected a number, got '" + v + "'");
    return d;
  }

  long long integer(const std::string& v) const {
    double d = number(v);
    if (d != std::floor(d) || std::abs(d) > 9e15) fail("expected an integer, got '" + v + "'");
    return static_cast<long long>(d);
  }

  bool boolean(const std::string& v) const {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("expected true/false, got '" + v + "'");
  }

  std::vector<Interval> intervals(const std::string& v) const {
    std::vector<Interval> out;
    for (const auto& part : split(v, ',')) {
      auto ends = split(part, ':');
      if (ends.size() != 2) fail("interval must be lo:hi, got '" + part + "'");
      out.push_back({number(ends[0]), number(ends[1])});
    }
    if (out.empty()) fail("empty interval list");
    return out;
  }

 private:
  std::string source_;
  int line_ = 0;
};

std::vector<Interval> broadcast(const std::vector<Interval>& ivs, int n, const char* name,
                                const std::string& source) {
  if (ivs.empty()) {
    throw ConfigError(source + ": [boxes] " + name + " is missing");
  }
  if (ivs.size() == 1) return std::vector<Interval>(n, ivs[0]);
  if (static_cast<int>(ivs.size()) != n) {
    throw ConfigError(source + ": [boxes] " + name + " has " + std::to_string(ivs.size()) +
                      " intervals, expected 1 or " + std::to_string(n));
  }
  return ivs;
}

}  // namespace

FormSystem SystemSpec::build() const {
  return make_system(records, R, n1, n2, d1, d2);
}

BoxPair ExperimentConfig::boxes(double p1, double p2) const {
  BoxPair bp;
  bp.b1 = b1;
  bp.b2 = b2;
  bp.p1 = p1;
  bp.p2 = p2;
  bp.boundary = boundary;
  return bp;
}

void ExperimentConfig::validate() const {
  const std::string where = source + ": ";
  try {
    system.build();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + "[system] " + e.what());
  }
  if (schedule.empty()) throw ConfigError(where + "[schedule] is empty");
  for (const auto& [p1, p2] : schedule) {
    try {
      boxes(p1, p2).validate(system.n1, system.n2);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + e.what());
    }
    if (!allow_b_below_1 && boxes(p1, p2).b() < 1) {
      throw ConfigError(where + "schedule entry (" + shortest(p1) + ", " + shortest(p2) +
                        ") has b = log P1 / log P2 < 1; set allow_b_below_1 = true to run it");
    }
  }
  if (Q < 1) throw ConfigError(where + "Q must be >= 1");
  if (!(T > 0)) throw ConfigError(where + "T must be positive");
  if (!(phi > 0)) throw ConfigError(where + "phi must be positive");
  if (!is_prime(heuristic_modulus)) throw ConfigError(where + "heuristic_modulus must be prime");
  if (heuristic_samples < 1000) throw ConfigError(where + "heuristic_samples must be >= 1000");
  if (padic_max < 2) throw ConfigError(where + "padic_max must be >= 2");
  for (const auto& c : {codim_v1, codim_v2}) {
    if (c && *c < 0) throw ConfigError(where + "declared codimensions must be >= 0");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  cfg.source = source;
  Parser p(source);
  std::istringstream in(text);
  std::string raw, section;
  std::vector<Interval> b1, b2;
  std::map<std::string, int> seen;
  bool have_dims[5] = {false, false, false, false, false};
  int lineno = 0;
  while (std::getline(in, raw)) {
    p.set_line(++lineno);
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "boxes" && section != "schedule" &&
          section != "parameters") {
        p.fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) p.fail("expected key = value");
    if (section.empty()) p.fail("key '" + key + "' outside of a section");
    const bool repeatable = key == "monomial" || key == "pair";
    if (!repeatable && seen[section + "." + key]++) p.fail("duplicate key '" + key + "'");

    if (section == "system") {
      static const char* dims[5] = {"n1", "n2", "d1", "d2", "R"};
      int* slots[5] = {&cfg.system.n1, &cfg.system.n2, &cfg.system.d1, &cfg.system.d2,
                       &cfg.system.R};
      bool matched = false;
      for (int d = 0; d < 5; ++d) {
        if (key == dims[d]) {
          long long v = p.integer(value);
          if (v < 0 || v > 64) p.fail(key + " out of range");
          *slots[d] = static_cast<int>(v);
          have_dims[d] = true;
          matched = true;
        }
      }
      if (matched) continue;
      if (key == "monomial") {
        try {
          cfg.system.records.push_back(parse_monomial_record(value));
        } catch (const std::exception& e) {
          p.fail(e.what());
        }
        continue;
      }
    } else if (section == "boxes") {
      if (key == "b1") {
        b1 = p.intervals(value);
        continue;
      }
      if (key == "b2") {
        b2 = p.intervals(value);
        continue;
      }
      if (key == "boundary") {
        try {
          cfg.boundary = parse_boundary(value);
        } catch (const std::exception& e) {
          p.fail(e.what());
        }
        continue;
      }
    } else if (section == "schedule") {
      if (key == "pair") {
        std::istringstream ps(value);
        std::string a, b, extra;
        if (!(ps >> a >> b) || (ps >> extra)) p.fail("pair needs exactly two values: P1 P2");
        cfg.schedule.emplace_back(p.number(a), p.number(b));
        continue;
      }
    } else if (section == "parameters") {
      if (key == "Q") {
        cfg.Q = p.integer(value);
      } else if (key == "T") {
        cfg.T = p.number(value);
      } else if (key == "phi") {
        cfg.phi = p.number(value);
      } else if (key == "codim_v1") {
        cfg.codim_v1 = p.number(value);
      } else if (key == "codim_v2") {
        cfg.codim_v2 = p.number(value);
      } else if (key == "allow_b_below_1") {
        cfg.allow_b_below_1 = p.boolean(value);
      } else if (key == "oscillatory_check") {
        cfg.oscillatory_check = p.boolean(value);
      } else if (key == "heuristic_check") {
        cfg.heuristic_check = p.boolean(value);
      } else if (key == "seed") {
        long long s = p.integer(value);
        if (s < 0) p.fail("seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
      } else if (key == "count_strategy") {
        try {
          cfg.count_strategy = parse_count_strategy(value);
        } catch (const std::exception& e) {
          p.fail(e.what());
        }
      } else if (key == "count_budget") {
        cfg.count_budget = p.number(value);
      } else if (key == "local_budget") {
        cfg.local_budget = p.number(value);
      } else if (key == "integral_budget") {
        cfg.integral_budget = p.number(value);
      } else if (key == "heuristic_samples") {
        cfg.heuristic_samples = static_cast<int>(p.integer(value));
      } else if (key == "heuristic_modulus") {
        cfg.heuristic_modulus = p.integer(value);
      } else if (key == "padic_max") {
        cfg.padic_max = p.integer(value);
      } else {
        p.fail("unknown key '" + key + "' in [parameters]");
      }
      continue;
    }
    p.fail("unknown key '" + key + "' in [" + section + "]");
  }
  static const char* dims[5] = {"n1", "n2", "d1", "d2", "R"};
  for (int d = 0; d < 5; ++d) {
    if (!have_dims[d]) throw ConfigError(source + ": [system] " + dims[d] + " is missing");
  }
  cfg.b1 = broadcast(b1, cfg.system.n1, "b1", source);
  cfg.b2 = broadcast(b2, cfg.system.n2, "b2", source);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[system]\n";
  out << "n1 = " << cfg.system.n1 << "\nn2 = " << cfg.system.n2 << "\nd1 = " << cfg.system.d1
      << "\nd2 = " << cfg.system.d2 << "\nR = " << cfg.system.R << "\n";
  for (const auto& r : cfg.system.records) out << "monomial = " << format_monomial_record(r) << "\n";
  auto ivs = [](const std::vector<Interval>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += shortest(v[i].lo) + ":" + shortest(v[i].hi);
    }
    return s;
  };
  out << "\n[boxes]\nb1 = " << ivs(cfg.b1) << "\nb2 = " << ivs(cfg.b2)
      << "\nboundary = " << to_string(cfg.boundary) << "\n";
  out << "\n[schedule]\n";
  for (const auto& [p1, p2] : cfg.schedule) out << "pair = " << shortest(p1) << " " << shortest(p2) << "\n";
  out << "\n[parameters]\n";
  out << "Q = " << cfg.Q << "\nT = " << shortest(cfg.T) << "\nphi = " << shortest(cfg.phi) << "\n";
  if (cfg.codim_v1) out << "codim_v1 = " << shortest(*cfg.codim_v1) << "\n";
  if (cfg.codim_v2) out << "codim_v2 = " << shortest(*cfg.codim_v2) << "\n";
  out << std::boolalpha;
  out << "allow_b_below_1 = " << cfg.allow_b_below_1 << "\n";
  out << "oscillatory_check = " << cfg.oscillatory_check << "\n";
  out << "heuristic_check = " << cfg.heuristic_check << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "count_strategy = " << to_string(cfg.count_strategy) << "\n";
  out << "count_budget = " << shortest(cfg.count_budget) << "\n";
  out << "local_budget = " << shortest(cfg.local_budget) << "\n";
  out << "integral_budget = " << shortest(cfg.integral_budget) << "\n";
  out << "heuristic_samples = " << cfg.heuristic_samples << "\n";
  out << "heuristic_modulus = " << cfg.heuristic_modulus << "\n";
  out << "padic_max = " << cfg.padic_max << "\n";
  return out.str();
}

}  // namespace bihom
