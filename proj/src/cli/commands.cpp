#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdyn/cli.hpp"
#include "qdyn/dynamics.hpp"
#include "qdyn/errors.hpp"
#include "qdyn/parallel.hpp"
#include "qdyn/spectra.hpp"
#include "qdyn/traces.hpp"

namespace qdyn::cli {

using json = nlohmann::ordered_json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// CSV with a commented metadata header followed by the column line.
class Csv {
 public:
  Csv(const json& meta, const std::vector<std::string>& columns) {
    for (const auto& [k, v] : meta.items()) text_ += "# " + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    row(columns);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

PotentialSpec make_spec(const RunConfig& c) {
  PotentialSpec s;
  s.model = c.model;
  s.lambda = c.model == Model::Free ? 0.0 : c.lambda;
  s.geometry = c.geometry;
  return s;
}

json metadata(const RunConfig& c) {
  json m;
  m["tool"] = std::string("qdyn ") + kToolVersion;
  m["command"] = c.command + (c.check.empty() ? "" : " " + c.check);
  m["model"] = to_string(c.model);
  m["lambda"] = c.model == Model::Free ? 0.0 : c.lambda;
  m["geometry"] = to_string(c.geometry);
  m["element"] = element_id(make_spec(c));
  m["convention"] = convention_id();
  m["config_hash"] = config_hash_hex(c);
  m["tolerances"] = {{"edge", c.tol_edge}, {"slope", c.tol_slope}, {"l1", c.tol_l1}};
  return m;
}

struct Result {
  json summary;
  std::string csv;  // empty when the command has no table
  int code = kOk;
};

void require_fib(const RunConfig& c) {
  if (c.model != Model::Fibonacci) throw DomainError(c.command + " " + c.check + " needs --model fib");
}

// ---------------------------------------------------------------------------

Result run_spectrum(const RunConfig& c) {
  require_fib(c);
  BandSet set = approximant_spectrum(c.lambda, c.k, c.tol_edge);
  if (c.lambda > 4.0 && c.k >= 1) set = classify_bands(c.lambda, c.k, c.tol_edge);
  Csv csv(metadata(c), {"k", "band_index", "lo", "hi", "width", "kind"});
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Band& b = set.bands[i];
    csv.row({std::to_string(c.k), std::to_string(i), num(b.lo), num(b.hi), num(b.width()), to_string(b.kind)});
  }
  Result r;
  r.summary["k"] = c.k;
  r.summary["bands"] = set.size();
  r.summary["expected_bands"] = fibonacci_number(c.k);
  r.summary["measure"] = set.measure();
  r.summary["min_width"] = set.min_width();
  r.summary["warnings"] = set.warnings;
  r.csv = csv.str();
  return r;
}

Result run_trace(const RunConfig& c) {
  Result r;
  const double E = c.has_energy ? c.energy : 0.0;
  if (c.check == "roots") {
    if (c.model != Model::PeriodDoubling && c.model != Model::ThueMorse)
      throw DomainError("trace roots needs --model pd or tm");
    const auto se = c.model == Model::PeriodDoubling ? pd_special_energies(c.lambda, c.k)
                                                     : tm_special_energies(c.lambda, c.k);
    Csv csv(metadata(c), {"index", "E_root"});
    for (std::size_t i = 0; i < se.energies.size(); ++i) csv.row({std::to_string(i), num(se.energies[i])});
    r.summary["k"] = c.k;
    r.summary["roots"] = se.energies.size();
    r.summary["expected_count"] = se.expected_count;
    r.summary["count_ok"] = se.count_ok;
    r.summary["max_trace_residual"] = se.max_trace_residual;
    r.summary["max_matrix_defect"] = se.max_matrix_defect;
    r.csv = csv.str();
    r.code = se.count_ok ? kOk : kCheckFailed;
    return r;
  }
  if (!c.check.empty() && c.check != "orbit") throw DomainError("trace target must be orbit or roots");
  if (c.model == Model::Fibonacci) {
    const auto orbit = fib_trace_orbit(c.lambda, E, c.k);
    Csv csv(metadata(c), {"k", "x_k"});
    double drift = 0.0;
    for (int j = 0; j <= orbit.k_max(); ++j) {
      csv.row({std::to_string(j), num(orbit.xs[j])});
      if (j >= 2) drift = std::max(drift, std::abs(fib_invariant(orbit.xs[j - 2], orbit.xs[j - 1], orbit.xs[j]) -
                                                   (4.0 + c.lambda * c.lambda)));
    }
    r.summary["E"] = E;
    r.summary["overflow"] = orbit.overflow;
    r.summary["max_invariant_drift"] = drift;
    r.csv = csv.str();
    return r;
  }
  if (c.model == Model::PeriodDoubling || c.model == Model::ThueMorse) {
    const auto orbit = subst_trace_orbit(c.model, c.lambda, E, c.k);
    Csv csv(metadata(c), {"k", "x_k", "y_k"});
    for (std::size_t j = 0; j < orbit.xs.size(); ++j) csv.row({std::to_string(j), num(orbit.xs[j]), num(orbit.ys[j])});
    r.summary["E"] = E;
    r.summary["overflow"] = orbit.overflow;
    r.csv = csv.str();
    return r;
  }
  throw DomainError("trace needs --model fib, pd or tm");
}

Result run_potential(const RunConfig& c) {
  const auto spec = make_spec(c);
  const auto w = LatticeWindow::around_origin(c.geometry, c.window > 0 ? c.window : 100);
  const auto v = potential_on(spec, w);
  Csv csv(metadata(c), {"site", "value"});
  for (long n = w.lo; n <= w.hi; ++n) csv.row({std::to_string(n), num(v[w.index(n)])});
  Result r;
  r.summary["sites"] = w.size();
  r.csv = csv.str();
  return r;
}

// ---------------------------------------------------------------------------
// verify

json record(const std::string& name, bool pass, json measured, json tolerance) {
  return {{"name", name}, {"pass", pass}, {"measured", std::move(measured)}, {"tolerance", std::move(tolerance)}};
}

json check_report_json(const CheckReport& rep) {
  json v = json::array();
  for (std::size_t i = 0; i < rep.violations.size() && i < 20; ++i) v.push_back(rep.violations[i]);
  return {{"checked", rep.checked}, {"violations", rep.violations.size()}, {"first_violations", v}};
}

// Drift of the invariant relative to the size of the terms it is built from.
double invariant_drift(double lambda, double E, int kmax) {
  const auto orbit = fib_trace_orbit(lambda, E, kmax);
  double worst = 0.0;
  for (int j = 2; j <= orbit.k_max(); ++j) {
    const double x = orbit.xs[j - 2], y = orbit.xs[j - 1], z = orbit.xs[j];
    const double scale = std::max({1.0, x * x, y * y, z * z, std::abs(x * y * z)});
    worst = std::max(worst, std::abs(fib_invariant(x, y, z) - (4.0 + lambda * lambda)) / scale);
  }
  return worst;
}

std::vector<json> verify_checks(const RunConfig& c) {
  std::vector<json> out;
  const std::string& what = c.check;
  if (what == "invariant") {
    std::mt19937_64 rng(20261019);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < c.samples; ++i) {
      const double E = -2.0 - c.lambda + unit(rng) * (4.0 + 3.0 * c.lambda);
      worst = std::max(worst, invariant_drift(c.lambda, E, std::max(c.k, 12)));
    }
    out.push_back(record("fibonacci_invariant", worst < 1e-9, {{"max_relative_drift", worst}, {"samples", c.samples}}, 1e-9));
  } else if (what == "tracemap") {
    require_fib(c);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < c.samples; ++i) {
      const double E = -2.0 - c.lambda + unit(rng) * (4.0 + 3.0 * c.lambda);
      const auto orbit = fib_trace_orbit(c.lambda, E, std::min(c.k, 12));
      for (int j = 1; j <= orbit.k_max(); ++j) {
        const Mat2 m = word_product(fibonacci_period_values(c.lambda, j), cplx{E});
        worst = std::max(worst, std::abs(orbit.xs[j] - m.trace().real()) / std::max(1.0, norm(m)));
      }
    }
    out.push_back(record("trace_map_vs_product", worst <= 1e-9, {{"max_relative_error", worst}}, 1e-9));
  } else if (what == "special") {
    if (c.model == Model::PeriodDoubling) {
      double defect = 0.0;
      bool counts = true;
      for (int k = 1; k <= std::min(c.k, 6); ++k) {
        const auto se = pd_special_energies(c.lambda, k);
        defect = std::max(defect, se.max_matrix_defect);
        counts = counts && se.count_ok;
      }
      out.push_back(record("pd_root_matrices", defect <= 1e-8 && counts, {{"max_defect", defect}, {"counts_ok", counts}}, 1e-8));
    } else if (c.model == Model::ThueMorse) {
      const auto se = tm_special_energies(c.lambda, std::max(3, c.k));
      out.push_back(record("tm_level_matrices", se.max_matrix_defect <= 1e-8,
                           {{"energies", se.energies.size()}, {"max_defect", se.max_matrix_defect}}, 1e-8));
    } else {
      throw DomainError("verify special needs --model pd or tm");
    }
  } else if (what == "covering") {
    require_fib(c);
    std::vector<BandSet> sets;
    for (int k = 1; k <= c.mmax + 1; ++k) sets.push_back(approximant_spectrum(c.lambda, k, c.tol_edge));
    CheckReport total;
    for (int m = 2; m <= c.mmax; ++m) {
      const auto rep = covering_check(sets[m - 2], sets[m - 1], sets[m]);
      total.ok = total.ok && rep.ok;
      total.checked += rep.checked;
      total.violations.insert(total.violations.end(), rep.violations.begin(), rep.violations.end());
    }
    out.push_back(record("covering", total.ok, check_report_json(total), c.tol_edge * 10));
  } else if (what == "genealogy") {
    require_fib(c);
    const auto rep = genealogy_check(c.lambda, c.k, c.tol_edge);
    auto m = check_report_json(rep);
    m["type_a"] = rep.type_a;
    m["type_b"] = rep.type_b;
    out.push_back(record("genealogy", rep.ok, m, nullptr));
  } else if (what == "ratios") {
    require_fib(c);
    for (int k = 1; k + 2 <= c.k; ++k) {
      const auto rep = derivative_ratio_check(c.lambda, k, c.tol_edge);
      auto m = check_report_json(rep);
      m["k"] = k;
      m["max_ratio_a"] = rep.max_ratio_a;
      m["bound_a"] = rep.bound_a;
      m["max_ratio_b"] = rep.max_ratio_b;
      m["bound_b"] = rep.bound_b;
      out.push_back(record("derivative_ratios", rep.ok, m, rep.tolerance));
    }
  } else if (what == "partials") {
    const auto rep = partial_bound_check(c.lambda, static_cast<std::size_t>(c.samples));
    auto m = check_report_json(rep);
    m["max_partial"] = rep.max_partial;
    out.push_back(record("partial_bound", rep.ok, m, 1e-12));
  } else if (what == "measure") {
    require_fib(c);
    const auto rep = measure_report(c.lambda, c.k, c.tol_edge);
    json rows = json::array();
    for (const auto& row : rep.rows)
      rows.push_back({{"k", row.k}, {"bands", row.bands}, {"measure", row.measure}, {"min_width", row.min_width}});
    const bool pass = rep.decay_exponent >= -rep.gamma - 0.5;
    out.push_back(record("measure_decay", pass,
                         {{"decay_exponent", rep.decay_exponent}, {"minus_gamma", -rep.gamma}, {"rows", rows}}, 0.5));
  } else if (what == "tracebound") {
    require_fib(c);
    const auto rep = trace_bound_check(c.lambda, c.k, c.samples, c.tol_edge);
    auto m = check_report_json(rep);
    m["max_trace"] = rep.max_trace;
    m["C_lambda"] = rep.C_lambda;
    out.push_back(record("trace_locality", rep.ok, m, nullptr));
  } else if (what == "parseval") {
    const auto spec = make_spec(c);
    const auto w = c.window > 0 ? LatticeWindow::around_origin(c.geometry, c.window) : dynamics_window(c.geometry, c.T);
    const auto by_time = profile_time(spec, c.T, w);
    const auto by_resolvent = profile_resolvent(spec, c.T, w);
    const double d = l1_distance(by_time, by_resolvent) / by_resolvent.total();
    out.push_back(record("parseval_l1", d <= c.tol_l1,
                         {{"T", c.T}, {"relative_l1", d}, {"mass_time", by_time.total()},
                          {"mass_resolvent", by_resolvent.total()}, {"quadrature_error", by_resolvent.quadrature_error}},
                         c.tol_l1));
  } else if (what == "complex") {
    const auto spec = make_spec(c);
    const long N = c.window > 0 ? c.window : 200;
    std::vector<double> energies;
    if (c.has_energy) {
      energies.push_back(c.energy);
    } else if (c.model == Model::Fibonacci) {
      energies = sample_band_energies(approximant_spectrum(c.lambda, c.k, c.tol_edge), 5);
    } else {
      energies.push_back(0.0);
    }
    std::vector<cplx> deltas{0.0};
    for (double s : {1.0, 0.1, 0.01})
      for (cplx dir : {cplx{0, 1}, cplx{1, 0}, cplx{1, 1} / std::sqrt(2.0)}) deltas.push_back(dir * (s / N));
    ComplexBoundReport worst;
    std::size_t violations = 0, checked = 0;
    for (double E : energies) {
      const auto rep = complex_energy_bound_check(spec, E, N, deltas);
      violations += rep.violations;
      checked += rep.checked;
      if (rep.max_log_margin > worst.max_log_margin) worst = rep;
    }
    out.push_back(record("complex_perturbation", violations == 0,
                         {{"checked", checked}, {"violations", violations}, {"max_log_margin", worst.max_log_margin}}, 0.0));
  } else if (what == "tails") {
    require_fib(c);
    const auto rep = resolvent_tail_scaling(c.lambda, {1e2, 1e3, 1e4});
    json rows = json::array();
    for (const auto& row : rep.rows)
      rows.push_back({{"T", row.T}, {"N", row.N}, {"k", row.k}, {"min_tail", row.min_tail}, {"mean_tail", row.mean_tail}});
    out.push_back(record("resolvent_tail_scaling", rep.ok, {{"alpha_eff", rep.alpha_eff}, {"exponent", rep.exponent}, {"rows", rows}}, 0.0));
  } else {
    throw DomainError("unknown verify target '" + what + "'");
  }
  return out;
}

Result run_verify(const RunConfig& c) {
  Result r;
  const auto records = verify_checks(c);
  bool all = true;
  r.summary["records"] = json::array();
  for (const auto& rec : records) {
    all = all && rec["pass"].get<bool>();
    r.summary["records"].push_back(rec);
  }
  r.summary["pass"] = all;
  r.code = all ? kOk : kCheckFailed;
  return r;
}

// ---------------------------------------------------------------------------

Result run_powerlaw(const RunConfig& c) {
  const auto spec = make_spec(c);
  Result r;
  Csv csv(metadata(c), {"E", "alpha", "m_max", "max_ratio", "argmax", "violations", "step_violations"});
  std::vector<double> energies;
  double alpha = c.alpha, cap = 0.0, d = 0.0;
  long m_max = c.window > 0 ? c.window : 100000;
  if (c.model == Model::Fibonacci) {
    const auto bp = bound_parameters(c.lambda);
    if (alpha < 0.0) alpha = bp.alpha;
    cap = bp.d;
    d = bp.d;
    m_max = static_cast<long>(fibonacci_number(c.k));
    energies = c.has_energy ? std::vector<double>{c.energy}
                            : sample_band_energies(approximant_spectrum(c.lambda, c.k, c.tol_edge), c.samples);
  } else {
    if (alpha < 0.0) alpha = c.model == Model::PeriodDoubling ? 1.0 : 0.0;
    energies.push_back(c.has_energy ? c.energy : c.model == Model::ThueMorse ? 2.0 : 0.0);
  }
  std::vector<PowerlawReport> reps(energies.size());
  parallel_for(energies.size(), [&](std::size_t i) { reps[i] = powerlaw_check(spec, energies[i], alpha, m_max, cap, d); });
  std::size_t violations = 0;
  double worst = 0.0;
  for (const auto& rep : reps) {
    csv.row({num(rep.E), num(rep.alpha), std::to_string(rep.m_max), num(rep.max_ratio), std::to_string(rep.argmax),
             std::to_string(rep.violations), std::to_string(rep.step_violations)});
    violations += rep.violations + rep.step_violations;
    worst = std::max(worst, rep.max_ratio);
  }
  r.summary["alpha"] = alpha;
  r.summary["energies"] = energies.size();
  r.summary["m_max"] = m_max;
  r.summary["max_ratio"] = worst;
  r.summary["ratio_cap"] = cap > 0.0 ? json(cap) : json(nullptr);
  r.summary["violations"] = violations;
  r.csv = csv.str();
  r.code = violations == 0 ? kOk : kCheckFailed;
  return r;
}

Result run_dynamics(const RunConfig& c) {
  const auto spec = make_spec(c);
  const auto Ts = log_ladder(c.Tmin, c.Tmax, c.per_decade);
  const auto window = c.window > 0 ? LatticeWindow::around_origin(c.geometry, c.window) : dynamics_window(c.geometry, c.Tmax);
  const double cost = c.Tmax * static_cast<double>(window.size());
  if (cost > c.budget)
    throw ResourceError("dynamics: Tmax * window = " + num(cost) + " exceeds the budget " + num(c.budget) +
                        "; lower --Tmax or raise --budget");
  const BoundId id = c.bound.empty() ? default_bound(c.model) : parse_bound_id(c.bound);
  const auto profiles = profile_time_ladder(spec, Ts, window);
  Csv csv(metadata(c), {"T", "p", "log_moment"});
  Result r;
  r.summary["window"] = {window.lo, window.hi};
  r.summary["reports"] = json::array();
  for (double p : c.p) {
    const auto series = moment_series(profiles, p, to_string(c.model));
    for (std::size_t i = 0; i < series.T.size(); ++i) csv.row({num(series.T[i]), num(p), num(series.log_moment[i])});
    const auto rep = judge(series, c.model, spec.lambda, id, {c.tol_slope, c.eta});
    r.summary["reports"].push_back({{"p", p},
                                    {"bound_id", to_string(rep.bound)},
                                    {"formula", rep.formula},
                                    {"measured_slope", rep.measured.slope},
                                    {"confidence", rep.measured.confidence},
                                    {"bound_slope", rep.bound_slope},
                                    {"slope_tolerance", rep.slope_tol},
                                    {"verdict", to_string(rep.verdict)},
                                    {"note", rep.note}});
    if (rep.verdict == Verdict::SoftFail) r.code = kCheckFailed;
  }
  r.csv = csv.str();
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot write " + path);
  f << text;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  cfg.validate();
  set_worker_count(cfg.threads);
  const auto start = std::chrono::steady_clock::now();
  Result r;
  if (cfg.command == "spectrum") r = run_spectrum(cfg);
  else if (cfg.command == "trace") r = run_trace(cfg);
  else if (cfg.command == "verify") r = run_verify(cfg);
  else if (cfg.command == "dynamics") r = run_dynamics(cfg);
  else if (cfg.command == "powerlaw") r = run_powerlaw(cfg);
  else r = run_potential(cfg);
  json doc;
  doc["meta"] = metadata(cfg);
  doc["result"] = r.summary;
  doc["exit_code"] = r.code;
  const std::string text = doc.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_file(cfg.out + ".json", text);
    if (!r.csv.empty()) write_file(cfg.out + ".csv", r.csv);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json run_info{{"config_hash", config_hash_hex(cfg)}, {"threads", cfg.threads}, {"wall_clock_seconds", secs}};
    write_file(cfg.out + ".run.json", run_info.dump(2) + "\n");
  }
  return r.code;
}

namespace {

int error_record(std::ostream& err, const std::string& type, const std::string& msg, int code) {
  err << json{{"error", {{"type", type}, {"message", msg}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

}  // namespace

int main_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer-matrix, band-spectrum and wave-packet dynamics engine"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::map<std::string, std::string> flag;
  std::map<std::string, CLI::Option*> given;
  auto opt = [&](const std::string& name, const std::string& key, const std::string& help) {
    given[key] = app.add_option(name, flag[key], help);
  };
  opt("--model", "model", "fib | pd | tm | free | periodic");
  opt("--lambda", "lambda", "coupling constant (> 0)");
  opt("--geometry", "geometry", "whole | half");
  opt("--k", "k", "approximant / substitution level");
  opt("--mmax", "mmax", "largest m for the covering check");
  opt("--samples", "samples", "sample count");
  opt("--E", "E", "energy");
  opt("--alpha", "alpha", "power-law exponent for powerlaw");
  opt("--T", "T", "time scale for single-T checks");
  opt("--Tmin", "Tmin", "smallest T of the ladder");
  opt("--Tmax", "Tmax", "largest T of the ladder");
  opt("--per-decade", "per_decade", "ladder points per decade");
  opt("--p", "p", "moment orders, comma separated");
  opt("--window", "window", "lattice radius (0 = automatic)");
  opt("--bound", "bound", "fib_one_energy | fib_bands | period_doubling | thue_morse | one_energy_eta");
  opt("--eta", "eta", "exponent for one_energy_eta");
  opt("--tol-edge", "tol_edge", "band edge tolerance");
  opt("--tol-slope", "tol_slope", "slope tolerance for verdicts");
  opt("--tol-l1", "tol_l1", "relative l1 tolerance for parseval");
  opt("--budget", "budget", "max Tmax * window for dynamics");
  opt("--out", "out", "output prefix (writes PREFIX.csv, PREFIX.json, PREFIX.run.json)");
  opt("--threads", "threads", "worker threads");
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  std::string check;
  for (const char* name : {"spectrum", "powerlaw", "dynamics", "potential"}) app.add_subcommand(name);
  app.add_subcommand("trace")->add_option("target", check, "orbit | roots");
  app.add_subcommand("verify")->add_option("check", check, "invariant | tracemap | special | covering | genealogy | "
                                                            "ratios | partials | measure | tracebound | parseval | complex | tails")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return error_record(err, "usage", e.what(), kUsage);
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw DomainError("cannot read config file " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = parse_text(ss.str(), cfg);
    }
    std::string overrides = "command = " + app.get_subcommands().front()->get_name() + "\n";
    if (!check.empty()) overrides += "check = " + check + "\n";
    for (const auto& [key, value] : flag)
      if (given[key]->count() > 0) overrides += key + " = " + value + "\n";
    cfg = parse_text(overrides, cfg);
    return run(cfg, out, err);
  } catch (const DomainError& e) {
    return error_record(err, "usage", e.what(), kUsage);
  } catch (const ResourceError& e) {
    return error_record(err, "resource", e.what(), kResource);
  } catch (const TruncationError& e) {
    return error_record(err, "truncation", e.what(), kResource);
  } catch (const ScaleOverflow& e) {
    return error_record(err, "overflow", e.what(), kResource);
  } catch (const ResolutionError& e) {
    return error_record(err, "resolution", e.what(), kCheckFailed);
  } catch (const ClassificationError& e) {
    return error_record(err, "classification", e.what(), kCheckFailed);
  } catch (const std::exception& e) {
    return error_record(err, "internal", e.what(), kCheckFailed);
  }
}

}  // namespace qdyn::cli
