// harness.cpp

#include "bihom/harness.hpp"

#include "bihom/numtheory.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bihom {

using nlohmann::ordered_json;

CodimEstimate estimate_codimension(const FormSystem& sys, Axis axis, int samples, Int modulus,
                                   std::uint64_t seed) {
  if (!is_prime(modulus)) throw std::invalid_argument("codimension modulus must be prime");
  if (samples < 1000) throw std::invalid_argument("codimension heuristic needs >= 1000 samples");
  const Int p = modulus;
  const int n = sys.total_dim(), n1 = sys.n1(), R = sys.R(), na = sys.dim(axis);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Int> unif(0, p - 1);
  std::vector<std::vector<Int>> jac(R, std::vector<Int>(na));
  auto deficient = [&](const Int* z) {
    bool all_zero = true;
    for (int i = 0; i < R; ++i) {
      for (int j = 0; j < na; ++j) {
        jac[i][j] = sys.partial_mod(i, axis, j, z, z + n1, p);
        all_zero = all_zero && jac[i][j] == 0;
      }
    }
    if (all_zero) return true;
    if (R == 1) return false;
    return rank_mod_p(jac, p) < R;
  };

  CodimEstimate out;
  out.axis = axis;
  out.modulus = p;
  out.samples = samples;
  // Enumerating a plane costs p^s rank tests.
  const double cap = 5e7;
  int est[3] = {-1, -1, -1};  // all planes, first half, second half
  IntVector z0(n), z(n), t;
  std::vector<IntVector> dirs;
  for (int s = 0; s <= n; ++s) {
    const double per_plane = std::pow(static_cast<double>(p), s);
    if (per_plane > cap) break;
    long planes = std::max<long>(8, static_cast<long>(samples / per_plane));
    planes += planes % 2;
    long hits[2] = {0, 0};
    for (long k = 0; k < planes; ++k) {
      for (auto& v : z0) v = unif(rng);
      dirs.assign(s, IntVector(n));
      for (auto& d : dirs) {
        for (auto& v : d) v = unif(rng);
      }
      t.assign(s, 0);
      bool hit = false;
      while (true) {
        for (int c = 0; c < n; ++c) {
          Int v = z0[c];
          for (int r = 0; r < s; ++r) v = (v + t[r] * dirs[r][c]) % p;
          z[c] = v;
        }
        if (deficient(z.data())) {
          hit = true;
          break;
        }
        int r = s - 1;
        while (r >= 0 && t[r] == p - 1) t[r--] = 0;
        if (r < 0) break;
        ++t[r];
      }
      hits[k < planes / 2 ? 0 : 1] += hit;
    }
    const double half = static_cast<double>(planes / 2);
    const double f[3] = {(hits[0] + hits[1]) / (2 * half), hits[0] / half, hits[1] / half};
    out.frequencies.push_back(f[0]);
    for (int c = 0; c < 3; ++c) {
      if (est[c] < 0 && f[c] >= 0.5) est[c] = s;
    }
    if (est[0] >= 0 && est[1] >= 0 && est[2] >= 0) break;
  }
  const int reached = static_cast<int>(out.frequencies.size());
  for (int& e : est) {
    if (e < 0) e = reached;
  }
  out.lower_bound_only = est[0] >= reached;
  out.estimate = est[0];
  out.spread = std::abs(est[1] - est[2]);
  out.note = "HEURISTIC: incidence of random affine planes mod " + std::to_string(p) +
             " with the rank-deficiency locus; advisory only";
  if (out.lower_bound_only) out.note += "; lower bound (plane enumeration cap reached)";
  return out;
}

bool PredictionReport::partial() const {
  for (const auto& [name, status] : stages) {
    if (status == "budget") return true;
  }
  for (const auto& e : entries) {
    if (e.status == "budget") return true;
  }
  for (const auto& w : padic) {
    if (w.status == "budget") return true;
  }
  return false;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Least-squares slope of y against x.
std::optional<double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace

PredictionReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  PredictionReport rep;
  rep.config = format_config(cfg);
  const FormSystem sys = cfg.system.build();
  const BoxPair unit_boxes = cfg.boxes(1, 1);
  auto stage = [&](const std::string& name, const std::string& status) {
    rep.stages.emplace_back(name, status);
  };

  // Codimensions: declared values are authoritative.
  rep.declared_codim_v1 = cfg.codim_v1;
  rep.declared_codim_v2 = cfg.codim_v2;
  if (cfg.heuristic_check) {
    try {
      rep.heuristic_v1 = estimate_codimension(sys, Axis::x, cfg.heuristic_samples,
                                              cfg.heuristic_modulus, cfg.seed);
      rep.heuristic_v2 = estimate_codimension(sys, Axis::y, cfg.heuristic_samples,
                                              cfg.heuristic_modulus, cfg.seed + 1);
      stage("codimension_heuristic", "ok");
      const std::pair<std::optional<double>, const CodimEstimate*> pairs[2] = {
          {cfg.codim_v1, &*rep.heuristic_v1}, {cfg.codim_v2, &*rep.heuristic_v2}};
      for (int a = 0; a < 2; ++a) {
        const auto& [declared, h] = pairs[a];
        if (declared && std::abs(*declared - h->estimate) > h->spread) {
          rep.warnings.push_back("declared codim of V" + std::to_string(a + 1) + "* is " +
                                 shortest(*declared) + " but the heuristic estimate is " +
                                 std::to_string(h->estimate) + " (declared value used)");
        }
      }
    } catch (const BudgetExceeded& e) {
      stage("codimension_heuristic", "budget");
      rep.warnings.push_back(e.what());
    }
  } else {
    stage("codimension_heuristic", "skipped");
  }
  if (cfg.codim_v1 && cfg.codim_v2) {
    rep.K = K_from_codims(*cfg.codim_v1, *cfg.codim_v2, sys.d1(), sys.d2());
  } else {
    rep.warnings.push_back("codimensions not declared: unconditional comparison mode");
  }

  // Singular series.
  rep.Q = cfg.Q;
  try {
    LocalOptions lo;
    lo.budget = cfg.local_budget;
    SeriesResult s = singular_series_partial(sys, cfg.Q, lo);
    rep.S_Q_exact = to_string(s.value);
    rep.S_Q = to_double(s.value);
    stage("singular_series", "ok");
  } catch (const BudgetExceeded& e) {
    stage("singular_series", "budget");
    rep.warnings.push_back(e.what());
  }

  // Singular integral, psi_T route.
  {
    SchmidtResult jt = schmidt_J(sys, cfg.T, unit_boxes);
    stage("schmidt_integral", jt.converged ? "ok" : "unconverged");
    if (jt.degenerate) rep.warnings.push_back(jt.note);
    rep.J_tilde = jt;
  }

  // Oscillatory cross-check.
  if (cfg.oscillatory_check && sys.R() <= 2) {
    try {
      QuadratureSpec qs;
      qs.budget = cfg.integral_budget;
      SingularIntegral j = singular_integral_partial(sys, cfg.phi, unit_boxes, qs);
      rep.J_osc = j;
      stage("oscillatory_integral", j.converged ? "ok" : "unconverged");
      if (!j.real_ok) rep.warnings.push_back("oscillatory J has a non-negligible imaginary part");
      const double diff = std::abs(j.value - rep.J_tilde->value);
      if (diff > 0.05 * std::abs(rep.J_tilde->value)) {
        rep.warnings.push_back("J(Phi) and extrapolated Jt differ by " + shortest(diff));
      }
    } catch (const BudgetExceeded& e) {
      stage("oscillatory_integral", "budget");
      rep.warnings.push_back(e.what());
    }
  } else {
    stage("oscillatory_integral", "skipped");
  }

  if (rep.S_Q && rep.J_tilde) rep.sigma = *rep.S_Q * rep.J_tilde->value;

  // Counts against the prediction.
  const int n1 = sys.n1(), n2 = sys.n2(), R = sys.R(), d1 = sys.d1(), d2 = sys.d2();
  bool count_budget_hit = false;
  std::vector<double> fit_x, fit_y;
  for (const auto& [p1, p2] : cfg.schedule) {
    EntryReport e;
    e.p1 = p1;
    e.p2 = p2;
    BoxPair boxes = cfg.boxes(p1, p2);
    e.b = boxes.b();
    e.b_below_1 = e.b < 1;
    if (e.b_below_1) e.diagnostics.push_back("b < 1: outside the theorem's range (allowed by flag)");
    e.mode = "unconditional comparison";
    if (rep.K) {
      try {
        CircleParams cp = choose_parameters(R, d1, d2, std::isfinite(e.b) ? e.b : 1e6, *rep.K);
        cp.set_scale(p1, p2);
        e.params = cp;
        e.mode = "conditional";
      } catch (const std::exception& ex) {
        e.diagnostics.push_back(ex.what());
      }
    }
    auto t0 = std::chrono::steady_clock::now();
    try {
      CountOptions co;
      co.strategy = cfg.count_strategy;
      co.budget = cfg.count_budget;
      CountResult cr = count_solutions(sys, boxes, co);
      if (cr.n > std::numeric_limits<Int>::max()) throw std::overflow_error("count exceeds 2^63");
      e.N = static_cast<Int>(cr.n);
    } catch (const BudgetExceeded& ex) {
      e.status = "budget";
      e.diagnostics.push_back(ex.what());
      count_budget_hit = true;
    }
    e.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rep.sigma && *rep.sigma > 0) {
      const double sigma = *rep.sigma;
      const double main = sigma * std::pow(p1, n1 - R * d1) * std::pow(p2, n2 - R * d2);
      const double P = std::pow(p1, d1) * std::pow(p2, d2);
      const double ident = std::pow(p1, n1) * std::pow(p2, n2) * std::pow(P, -R) * sigma;
      if (std::abs(main - ident) > 1e-12 * std::abs(main)) {
        throw std::logic_error("main-term identity failed at (" + shortest(p1) + ", " +
                               shortest(p2) + ")");
      }
      e.main_term = main;
      e.main_term_identity = ident;
      if (e.N) {
        e.ratio = static_cast<double>(*e.N) / main;
        if (*e.ratio != 1 && p1 > 1) {
          fit_x.push_back(std::log(p1));
          fit_y.push_back(std::log(std::abs(*e.ratio - 1)));
        }
      }
    } else {
      e.diagnostics.push_back("main term is zero or unavailable; ratio omitted");
    }
    rep.entries.push_back(std::move(e));
  }
  stage("counting", count_budget_hit ? "budget" : "ok");
  rep.empirical_rate = fit_slope(fit_x, fit_y);

  // Positivity witnesses.
  bool padic_budget = false;
  for (Int p : primes_up_to(cfg.padic_max)) {
    PadicReport w;
    w.p = p;
    try {
      PadicSearch s = find_nonsingular_padic_zero(sys, p, 1, cfg.local_budget);
      w.inconclusive = s.inconclusive;
      if (s.witness && verify_padic_witness(sys, *s.witness)) {
        w.certified = true;
        w.x = s.witness->x;
        w.y = s.witness->y;
        w.rank = s.witness->rank;
      }
    } catch (const BudgetExceeded& ex) {
      w.status = "budget";
      padic_budget = true;
      rep.warnings.push_back(ex.what());
    }
    rep.padic.push_back(std::move(w));
  }
  stage("padic_witnesses", padic_budget ? "budget" : "ok");

  RealZeroOptions ro;
  ro.seed = cfg.seed;
  RealReport rr;
  if (auto w = find_nonsingular_real_zero(sys, unit_boxes, ro)) {
    rr.found = true;
    rr.x = w->x;
    rr.y = w->y;
    rr.residuals = w->residuals;
    rr.singular_values = w->singular_values;
    rr.rank = w->rank;
  }
  rep.real = rr;
  stage("real_witness", "ok");
  return rep;
}

namespace {

template <class T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <class T>
std::optional<T> get_opt(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

ordered_json params_json(const CircleParams& p) {
  ordered_json j;
  j["R"] = p.R;
  j["d1"] = p.d1;
  j["d2"] = p.d2;
  j["dtilde"] = p.dtilde;
  j["b"] = p.b;
  j["K"] = p.K;
  j["theta0"] = p.theta0;
  j["delta"] = p.delta;
  j["eta"] = p.eta;
  j["P"] = p.P;
  j["q_max"] = p.q_max();
  j["width"] = p.width();
  return j;
}

CircleParams params_from(const ordered_json& j) {
  CircleParams p;
  p.R = j.at("R").get<int>();
  p.d1 = j.at("d1").get<int>();
  p.d2 = j.at("d2").get<int>();
  p.dtilde = j.at("dtilde").get<int>();
  p.b = j.at("b").get<double>();
  p.K = j.at("K").get<double>();
  p.theta0 = j.at("theta0").get<double>();
  p.delta = j.at("delta").get<double>();
  p.eta = j.at("eta").get<double>();
  p.P = j.at("P").get<double>();
  return p;
}

ordered_json codim_json(const CodimEstimate& c) {
  ordered_json j;
  j["axis"] = c.axis == Axis::x ? "x" : "y";
  j["estimate"] = c.estimate;
  j["spread"] = c.spread;
  j["lower_bound_only"] = c.lower_bound_only;
  j["modulus"] = c.modulus;
  j["samples"] = c.samples;
  j["frequencies"] = c.frequencies;
  j["note"] = c.note;
  return j;
}

CodimEstimate codim_from(const ordered_json& j) {
  CodimEstimate c;
  c.axis = j.at("axis").get<std::string>() == "x" ? Axis::x : Axis::y;
  c.estimate = j.at("estimate").get<int>();
  c.spread = j.at("spread").get<int>();
  c.lower_bound_only = j.at("lower_bound_only").get<bool>();
  c.modulus = j.at("modulus").get<Int>();
  c.samples = j.at("samples").get<int>();
  c.frequencies = j.at("frequencies").get<std::vector<double>>();
  c.note = j.at("note").get<std::string>();
  return c;
}

ordered_json schmidt_json(const SchmidtResult& s) {
  ordered_json j;
  j["levels"] = ordered_json::array();
  for (const auto& l : s.levels) {
    ordered_json e;
    e["T"] = l.T;
    e["value"] = l.value;
    e["error"] = l.error;
    e["evals"] = l.evals;
    e["converged"] = l.converged;
    j["levels"].push_back(e);
  }
  j["value"] = s.value;
  j["error"] = s.error;
  j["ratio"] = s.ratio;
  j["converged"] = s.converged;
  j["degenerate"] = s.degenerate;
  j["note"] = s.note;
  return j;
}

SchmidtResult schmidt_from(const ordered_json& j) {
  SchmidtResult s;
  for (const auto& e : j.at("levels")) {
    SchmidtValue l;
    l.T = e.at("T").get<double>();
    l.value = e.at("value").get<double>();
    l.error = e.at("error").get<double>();
    l.evals = e.at("evals").get<std::size_t>();
    l.converged = e.at("converged").get<bool>();
    s.levels.push_back(l);
  }
  s.value = j.at("value").get<double>();
  s.error = j.at("error").get<double>();
  s.ratio = j.at("ratio").get<double>();
  s.converged = j.at("converged").get<bool>();
  s.degenerate = j.at("degenerate").get<bool>();
  s.note = j.at("note").get<std::string>();
  return s;
}

ordered_json osc_json(const SingularIntegral& s) {
  ordered_json j;
  j["phi"] = s.phi;
  j["value"] = s.value;
  j["imag"] = s.imag;
  j["error"] = s.error;
  j["evals"] = s.evals;
  j["converged"] = s.converged;
  j["real_ok"] = s.real_ok;
  return j;
}

SingularIntegral osc_from(const ordered_json& j) {
  SingularIntegral s;
  s.phi = j.at("phi").get<double>();
  s.value = j.at("value").get<double>();
  s.imag = j.at("imag").get<double>();
  s.error = j.at("error").get<double>();
  s.evals = j.at("evals").get<std::size_t>();
  s.converged = j.at("converged").get<bool>();
  s.real_ok = j.at("real_ok").get<bool>();
  return s;
}

}  // namespace

ordered_json to_json(const PredictionReport& r) {
  ordered_json j;
  j["config"] = r.config;
  ordered_json cod;
  cod["declared_v1"] = opt(r.declared_codim_v1);
  cod["declared_v2"] = opt(r.declared_codim_v2);
  cod["heuristic_v1"] = r.heuristic_v1 ? codim_json(*r.heuristic_v1) : ordered_json(nullptr);
  cod["heuristic_v2"] = r.heuristic_v2 ? codim_json(*r.heuristic_v2) : ordered_json(nullptr);
  cod["K"] = opt(r.K);
  j["codimensions"] = cod;
  ordered_json sig;
  sig["Q"] = r.Q;
  sig["S_Q_exact"] = opt(r.S_Q_exact);
  sig["S_Q"] = opt(r.S_Q);
  sig["J_tilde"] = r.J_tilde ? schmidt_json(*r.J_tilde) : ordered_json(nullptr);
  sig["J_osc"] = r.J_osc ? osc_json(*r.J_osc) : ordered_json(nullptr);
  sig["sigma"] = opt(r.sigma);
  j["sigma"] = sig;
  j["entries"] = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json x;
    x["p1"] = e.p1;
    x["p2"] = e.p2;
    x["b"] = std::isfinite(e.b) ? ordered_json(e.b) : ordered_json("inf");
    x["b_below_1"] = e.b_below_1;
    x["status"] = e.status;
    x["N"] = opt(e.N);
    x["main_term"] = opt(e.main_term);
    x["main_term_identity"] = opt(e.main_term_identity);
    x["ratio"] = opt(e.ratio);
    x["mode"] = e.mode;
    x["params"] = e.params ? params_json(*e.params) : ordered_json(nullptr);
    x["diagnostics"] = e.diagnostics;
    j["entries"].push_back(x);
  }
  j["empirical_rate"] = opt(r.empirical_rate);
  ordered_json pos;
  pos["padic"] = ordered_json::array();
  for (const auto& w : r.padic) {
    ordered_json x;
    x["p"] = w.p;
    x["certified"] = w.certified;
    x["x"] = w.x;
    x["y"] = w.y;
    x["rank"] = w.rank;
    x["inconclusive"] = w.inconclusive;
    x["status"] = w.status;
    pos["padic"].push_back(x);
  }
  if (r.real) {
    ordered_json x;
    x["found"] = r.real->found;
    x["x"] = r.real->x;
    x["y"] = r.real->y;
    x["residuals"] = r.real->residuals;
    x["singular_values"] = r.real->singular_values;
    x["rank"] = r.real->rank;
    pos["real"] = x;
  } else {
    pos["real"] = nullptr;
  }
  j["positivity"] = pos;
  ordered_json st = ordered_json::array();
  for (const auto& [name, status] : r.stages) st.push_back({name, status});
  j["stages"] = st;
  j["warnings"] = r.warnings;
  j["status"] = r.partial() ? "partial" : "full";
  return j;
}

PredictionReport report_from_json(const ordered_json& j) {
  PredictionReport r;
  r.config = j.at("config").get<std::string>();
  const auto& cod = j.at("codimensions");
  r.declared_codim_v1 = get_opt<double>(cod, "declared_v1");
  r.declared_codim_v2 = get_opt<double>(cod, "declared_v2");
  if (!cod.at("heuristic_v1").is_null()) r.heuristic_v1 = codim_from(cod.at("heuristic_v1"));
  if (!cod.at("heuristic_v2").is_null()) r.heuristic_v2 = codim_from(cod.at("heuristic_v2"));
  r.K = get_opt<double>(cod, "K");
  const auto& sig = j.at("sigma");
  r.Q = sig.at("Q").get<Int>();
  r.S_Q_exact = get_opt<std::string>(sig, "S_Q_exact");
  r.S_Q = get_opt<double>(sig, "S_Q");
  if (!sig.at("J_tilde").is_null()) r.J_tilde = schmidt_from(sig.at("J_tilde"));
  if (!sig.at("J_osc").is_null()) r.J_osc = osc_from(sig.at("J_osc"));
  r.sigma = get_opt<double>(sig, "sigma");
  for (const auto& x : j.at("entries")) {
    EntryReport e;
    e.p1 = x.at("p1").get<double>();
    e.p2 = x.at("p2").get<double>();
    e.b = x.at("b").is_string() ? std::numeric_limits<double>::infinity() : x.at("b").get<double>();
    e.b_below_1 = x.at("b_below_1").get<bool>();
    e.status = x.at("status").get<std::string>();
    e.N = get_opt<Int>(x, "N");
    e.main_term = get_opt<double>(x, "main_term");
    e.main_term_identity = get_opt<double>(x, "main_term_identity");
    e.ratio = get_opt<double>(x, "ratio");
    e.mode = x.at("mode").get<std::string>();
    if (!x.at("params").is_null()) e.params = params_from(x.at("params"));
    e.diagnostics = x.at("diagnostics").get<std::vector<std::string>>();
    r.entries.push_back(std::move(e));
  }
  r.empirical_rate = get_opt<double>(j, "empirical_rate");
  const auto& pos = j.at("positivity");
  for (const auto& x : pos.at("padic")) {
    PadicReport w;
    w.p = x.at("p").get<Int>();
    w.certified = x.at("certified").get<bool>();
    w.x = x.at("x").get<IntVector>();
    w.y = x.at("y").get<IntVector>();
    w.rank = x.at("rank").get<int>();
    w.inconclusive = x.at("inconclusive").get<std::size_t>();
    w.status = x.at("status").get<std::string>();
    r.padic.push_back(std::move(w));
  }
  if (!pos.at("real").is_null()) {
    const auto& x = pos.at("real");
    RealReport rr;
    rr.found = x.at("found").get<bool>();
    rr.x = x.at("x").get<RealVector>();
    rr.y = x.at("y").get<RealVector>();
    rr.residuals = x.at("residuals").get<std::vector<double>>();
    rr.singular_values = x.at("singular_values").get<std::vector<double>>();
    rr.rank = x.at("rank").get<int>();
    r.real = rr;
  }
  for (const auto& s : j.at("stages")) {
    r.stages.emplace_back(s.at(0).get<std::string>(), s.at(1).get<std::string>());
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

std::string report_json_text(const PredictionReport& r) { return to_json(r).dump(2) + "\n"; }

std::string report_csv(const PredictionReport& r) {
  std::ostringstream out;
  out << "p1,p2,b,N,main_term,ratio,sigma,S_Q,J_tilde,wall_time_s\n";
  auto num = [](const std::optional<double>& v) { return v ? shortest(*v) : std::string(); };
  for (const auto& e : r.entries) {
    out << shortest(e.p1) << "," << shortest(e.p2) << ","
        << (std::isfinite(e.b) ? shortest(e.b) : std::string("inf")) << ","
        << (e.N ? std::to_string(*e.N) : std::string()) << "," << num(e.main_term) << ","
        << num(e.ratio) << "," << num(r.sigma) << "," << num(r.S_Q) << ","
        << (r.J_tilde ? shortest(r.J_tilde->value) : std::string()) << ",";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", e.wall_time_s);
    out << buf << "\n";
  }
  return out.str();
}

}  // namespace bihom
