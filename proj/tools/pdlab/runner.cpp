#include "runner.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "pdlab/error.hpp"
#include "pdlab/lab.hpp"
#include "pdlab/random.hpp"
#include "pdlab/spectral.hpp"

namespace pdlab::cli {

using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const ComplexMatrix& op_matrix(const ExperimentConfig& cfg) { return cfg.op->matrix(); }

NumericalRangeSample range_sample(const ExperimentConfig& cfg) {
  if (cfg.hilbert()) return numerical_range_hilbert(op_matrix(cfg), cfg.params.range_angles);
  return numerical_range_lp(op_matrix(cfg), LpSpace(cfg.dim, *cfg.p), cfg.params.range_samples,
                            analysis_seed(cfg.seed, "numrange"));
}

std::vector<ComplexMatrix> ordered_projections(const ExperimentConfig& cfg) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i : cfg.map_order) out.push_back(cfg.projections[i].matrix());
  return out;
}

std::vector<double> iota(std::size_t count, double start = 0.0) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = start + static_cast<double>(i);
  return v;
}

void dichotomy(const ExperimentConfig& cfg, AnalysisResult& r) {
  const TraceNorm norm{cfg.p};
  const DichotomyReport d = dichotomy_report(op_matrix(cfg), cfg.params.iterations, cfg.params.tolerance, norm);
  const std::size_t n = d.gap.values.size();
  Table t{"dichotomy", {"n", "gap", "envelope"}, {}};
  std::vector<double> env(n);
  for (std::size_t k = 0; k < n; ++k) {
    env[k] = d.constant * std::pow(d.rate, static_cast<double>(k));
    t.rows.push_back({static_cast<double>(k), d.gap.values[k], env[k]});
  }
  r.tables.push_back(std::move(t));
  r.charts.push_back({"dichotomy", "||T^n - P_T|| (" + norm.label() + ")", "n", "gap", false, true, false,
                      {{"gap", iota(n), d.gap.values}, {"C r^n", iota(n), env}}});
  const bool long_run = cfg.params.iterations >= 200;
  r.passed = d.envelope_ok && (!long_run || d.rate_matches);
  r.summary = {{"regime", d.regime},
               {"rate", d.rate},
               {"constant", d.constant},
               {"restriction_spectral_radius", d.restriction_spectral_radius},
               {"fit_window", {d.fit_begin, d.fit_end}},
               {"envelope_ok", d.envelope_ok},
               {"rate_matches", d.rate_matches},
               {"norm", norm.label()}};
}

void numrange(const ExperimentConfig& cfg, AnalysisResult& r) {
  const NumericalRangeSample s = range_sample(cfg);
  Table pts{"numrange_points", {"re", "im"}, {}};
  for (Complex z : s.points) pts.rows.push_back({z.real(), z.imag()});
  Table hull{"numrange_hull", {"re", "im"}, {}};
  Series hs{"hull", {}, {}};
  for (Complex z : s.hull) {
    hull.rows.push_back({z.real(), z.imag()});
    hs.x.push_back(z.real());
    hs.y.push_back(z.imag());
  }
  if (!s.hull.empty()) hs.x.push_back(s.hull.front().real()), hs.y.push_back(s.hull.front().imag());
  Series circle{"unit circle", {}, {}};
  for (int k = 0; k <= 360; ++k) {
    circle.x.push_back(std::cos(k * std::numbers::pi / 180));
    circle.y.push_back(std::sin(k * std::numbers::pi / 180));
  }
  r.tables.push_back(std::move(pts));
  r.tables.push_back(std::move(hull));
  r.charts.push_back({"numrange", "numerical range", "Re", "Im", false, false, true, {hs, circle}});
  r.passed = true;
  r.summary = {{"method", to_string(s.method)}, {"points", s.points.size()}, {"hull_vertices", s.hull.size()}};
}

void resolvent(const ExperimentConfig& cfg, AnalysisResult& r) {
  const auto thetas = geometric_theta_grid(cfg.params.theta_grid);
  const ResolventProfile prof = resolvent_profile(op_matrix(cfg), thetas, cfg.params.resolvent_window);
  Table t{"resolvent", {"theta", "norm"}, {}};
  Series pos{"||R||", {}, {}};
  for (const auto& p : prof.points) {
    t.rows.push_back({p.theta, p.norm});
    if (p.theta > 0) pos.x.push_back(p.theta), pos.y.push_back(p.norm);
  }
  r.tables.push_back(std::move(t));
  r.summary = {{"alpha", prof.alpha},
               {"constant", prof.constant},
               {"r_squared", prof.r_squared},
               {"window", prof.window},
               {"skipped", prof.skipped.size()}};
  r.passed = true;
  std::vector<Series> series{pos};
  if (cfg.hilbert()) {
    const HullBoundReport h = hull_distance_bound_check(op_matrix(cfg), range_sample(cfg), thetas);
    Table hb{"resolvent_hull", {"theta", "resolvent", "hull_distance", "ok"}, {}};
    Series bound{"1 / dist(e^it, W)", {}, {}};
    for (const auto& row : h.rows) {
      hb.rows.push_back({row.theta, row.resolvent, row.distance, row.ok ? 1.0 : 0.0});
      if (row.theta > 0) bound.x.push_back(row.theta), bound.y.push_back(1.0 / row.distance);
    }
    r.tables.push_back(std::move(hb));
    series.push_back(bound);
    r.passed = h.passed;
    r.summary["hull_bound"] = {
        {"passed", h.passed}, {"slack", h.slack}, {"worst_ratio", h.worst_ratio}, {"skipped", h.skipped.size()}};
  }
  r.charts.push_back({"resolvent", "resolvent norm on the unit circle", "theta", "norm", true, true, false, series});
}

void ritt(const ExperimentConfig& cfg, AnalysisResult& r) {
  const RittDiagnostic d = ritt_diagnostic(op_matrix(cfg), cfg.params.iterations);
  Table t{"ritt", {"n", "value"}, {}};
  for (std::size_t k = 0; k < d.values.size(); ++k) t.rows.push_back({static_cast<double>(k + 1), d.values[k]});
  r.tables.push_back(std::move(t));
  r.charts.push_back({"ritt", "n ||T^n (I - T)||", "n", "value", false, false, false,
                      {{"n ||T^n (I - T)||", iota(d.values.size(), 1.0), d.values}}});
  r.passed = d.consistent;
  r.summary = {{"sup", d.sup}, {"head_max", d.head_max}, {"tail_max", d.tail_max}, {"consistent", d.consistent}};
}

void stolz(const ExperimentConfig& cfg, AnalysisResult& r) {
  const NumericalRangeSample s = range_sample(cfg);
  const StolzFit f = stolz_fit(s.points, cfg.params.stolz_window, {}, cfg.params.stolz_c_min);
  Table t{"stolz", {"alpha", "c"}, {}};
  Series cs{"c(alpha)", {}, {}};
  for (const auto& v : f.by_alpha) {
    t.rows.push_back({v.alpha, v.c});
    cs.x.push_back(v.alpha);
    cs.y.push_back(v.c);
  }
  r.tables.push_back(std::move(t));
  r.charts.push_back({"stolz", "Stolz constant by exponent", "alpha", "c", false, false, false, {cs}});
  r.passed = f.status != StolzFit::Status::fail;
  r.summary = {{"status", to_string(f.status)},
               {"alpha", f.alpha},
               {"c", f.c},
               {"window", f.window},
               {"window_points", f.window_points},
               {"witness", {f.witness.real(), f.witness.imag()}}};
}

void kspectral(const ExperimentConfig& cfg, AnalysisResult& r) {
  const KSpectralReport k = k_spectral_check(op_matrix(cfg), range_sample(cfg), cfg.params.kspectral_iterations);
  Table t{"kspectral", {"n", "lhs", "s", "bound"}, {}};
  std::vector<double> bound;
  for (std::size_t i = 0; i < k.lhs.size(); ++i) {
    bound.push_back(KSpectralReport::kConstant * k.s[i]);
    t.rows.push_back({static_cast<double>(i + 1), k.lhs[i], k.s[i], bound.back()});
  }
  r.tables.push_back(std::move(t));
  r.charts.push_back({"kspectral", "||T^n (I - T)|| against (1 + sqrt 2) s_n", "n", "norm", false, true, false,
                      {{"||T^n (I - T)||", iota(k.lhs.size(), 1.0), k.lhs}, {"bound", iota(bound.size(), 1.0), bound}}});
  r.passed = k.passed;
  r.summary = {{"constant", KSpectralReport::kConstant}, {"worst_margin", k.worst_margin}, {"passed", k.passed}};
}

void halperin(const ExperimentConfig& cfg, AnalysisResult& r) {
  const auto ps = ordered_projections(cfg);
  const int samples = cfg.params.halperin_samples;
  const HalperinReport h = halperin_inequality_check(ps, cfg.p, samples, analysis_seed(cfg.seed, "halperin"));
  r.tables.push_back({"halperin", {"samples", "c_hat"}, {{double(samples), h.c_hat_half}, {2.0 * samples, h.c_hat}}});
  bool ok = std::isfinite(h.c_hat) && h.stable;
  if (cfg.hilbert() && ps.size() == 1) ok = ok && h.c_hat <= std::numbers::sqrt2 + 1e-6;
  r.passed = ok;
  r.summary = {{"exponent", h.exponent},    {"c_hat", h.c_hat},         {"c_hat_half", h.c_hat_half},
               {"stable", h.stable},        {"evaluated", h.evaluated}, {"skipped", h.skipped},
               {"factors", ps.size()}};
}

void dr_rate(const ExperimentConfig& cfg, AnalysisResult& r) {
  const auto [a, b] = *cfg.dr_pair;
  const Subspace& m1 = cfg.subspaces[a];
  const Subspace& m2 = cfg.subspaces[b];
  const DrFixedSpace fixed = dr_fixed_space(m1, m2);
  const DrRateReport d = dr_rate_check(m1, m2, cfg.params.iterations);
  Table t{"dr_rate", {"n", "gap", "bound"}, {}};
  for (std::size_t k = 0; k < d.gaps.size(); ++k) t.rows.push_back({static_cast<double>(k), d.gaps[k], d.bounds[k]});
  r.tables.push_back(std::move(t));
  r.charts.push_back({"dr_rate", "Douglas-Rachford gap against c^n", "n", "norm", false, true, false,
                      {{"||T^n - P||", iota(d.gaps.size()), d.gaps}, {"c^n", iota(d.bounds.size()), d.bounds}}});
  r.passed = d.passed;
  r.summary = {{"pair", {cfg.subspace_names[a], cfg.subspace_names[b]}},
               {"friedrichs", d.friedrichs},
               {"max_violation", d.max_violation},
               {"fixed_space_dim", fixed.space.dim()},
               {"fixed_space_cosine", fixed.worst_cosine}};
  if (d.first_failure) r.summary["first_failure"] = *d.first_failure;
}

void slow(const ExperimentConfig& cfg, AnalysisResult& r) {
  const SlowInstance s = slow_instance(cfg.params.slow_rates);
  Table t{"slow", {"n", "norm", "rate", "weak"}, {}};
  for (std::size_t k = 0; k < s.rates.size(); ++k)
    t.rows.push_back({static_cast<double>(k), s.orbit_norms[k], s.rates[k], s.weak_values[k]});
  r.tables.push_back(std::move(t));
  r.charts.push_back({"slow", "certified slow orbit", "n + 1", "value", true, true, false,
                      {{"||T^n x||", iota(s.rates.size(), 1.0), s.orbit_norms},
                       {"r_n", iota(s.rates.size(), 1.0), s.rates},
                       {"Re <T^n x, phi>", iota(s.rates.size(), 1.0), s.weak_values}}});
  r.passed = true;
  r.summary = {{"dimension", s.dimension()}, {"kappa", s.kappa}, {"terms", s.rates.size()}};
}

void superpoly(const ExperimentConfig& cfg, AnalysisResult& r) {
  const SplitDecomposition split = fix_split(op_matrix(cfg), cfg.params.tolerance);
  const SuperpolyReport s =
      superpoly_vectors(op_matrix(cfg), split, cfg.params.superpoly_k_max, cfg.params.superpoly_iterations,
                        analysis_seed(cfg.seed, "superpoly"), cfg.params.superpoly_window_begin,
                        cfg.params.superpoly_window_end);
  Table t{"superpoly", {"n"}, {}};
  Chart chart{"superpoly", "||T^n x_k - P_T x_k||", "n", "residual", true, true, false, {}};
  json slopes = json::array();
  for (const auto& c : s.curves) {
    t.header.push_back("k" + std::to_string(c.k));
    chart.series.push_back({"k = " + std::to_string(c.k), iota(c.residuals.size()), c.residuals});
    slopes.push_back(c.slope ? json(*c.slope) : json(nullptr));
  }
  const std::size_t n = s.curves.empty() ? 0 : s.curves.front().residuals.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> row{static_cast<double>(k)};
    for (const auto& c : s.curves) row.push_back(c.residuals[k]);
    t.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(t));
  r.charts.push_back(std::move(chart));
  r.passed = s.slopes_ordered;
  r.summary = {{"slopes", slopes},
               {"window", {s.window_begin, s.window_end}},
               {"attempts", s.attempts},
               {"slopes_ordered", s.slopes_ordered}};
}

}  // namespace

std::uint64_t analysis_seed(std::uint64_t base, const std::string& name) {
  const auto& names = known_analyses();
  const auto it = std::find(names.begin(), names.end(), name);
  return derive_seed(base, 0x100 + static_cast<std::uint64_t>(it - names.begin()));
}

AnalysisResult run_analysis(const ExperimentConfig& cfg, const std::string& name) {
  AnalysisResult r;
  r.name = name;
  try {
    if (name == "dichotomy") dichotomy(cfg, r);
    else if (name == "numrange") numrange(cfg, r);
    else if (name == "resolvent") resolvent(cfg, r);
    else if (name == "ritt") ritt(cfg, r);
    else if (name == "stolz") stolz(cfg, r);
    else if (name == "kspectral") kspectral(cfg, r);
    else if (name == "halperin") halperin(cfg, r);
    else if (name == "dr-rate") dr_rate(cfg, r);
    else if (name == "slow") slow(cfg, r);
    else if (name == "superpoly") superpoly(cfg, r);
    else throw ConfigError("unknown analysis '" + name + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r = AnalysisResult{};
    r.name = name;
    r.error = e.what();
  }
  r.summary["passed"] = r.passed;
  if (r.error) r.summary["error"] = *r.error;
  return r;
}

bool RunReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const AnalysisResult& r) { return r.passed; });
}

RunReport run_experiment(const ExperimentConfig& cfg, int jobs) {
  RunReport run;
  run.results.resize(cfg.analyses.size());
  parallel_for(static_cast<int>(cfg.analyses.size()), jobs, [&](int i) {
    run.results[static_cast<std::size_t>(i)] = run_analysis(cfg, cfg.analyses[static_cast<std::size_t>(i)]);
  });

  json& rep = run.report;
  rep["tool"] = "pdlab";
  rep["version"] = kVersion;
  rep["seed"] = cfg.seed;
  rep["config"] = cfg.source;
  rep["space"] = cfg.hilbert() ? json{{"kind", "hilbert"}, {"dim", cfg.dim}}
                               : json{{"kind", "lp"}, {"dim", cfg.dim}, {"p", *cfg.p}};
  if (cfg.op)
    rep["operator"] = {{"kind", cfg.operator_kind}, {"expression", cfg.op->expression()}, {"dim", cfg.op->dim()}};
  rep["analyses"] = json::object();
  json failed = json::array();
  for (const auto& r : run.results) {
    rep["analyses"][r.name] = r.summary;
    if (!r.passed) failed.push_back(r.name);
  }
  rep["failed"] = failed;
  rep["passed"] = failed.empty();
  return run;
}

void write_outputs(const ExperimentConfig& cfg, const RunReport& run) {
  const std::filesystem::path dir = cfg.output.dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto& r : run.results) {
    if (cfg.output.csv)
      for (const auto& t : r.tables) write_csv(dir, t);
    if (cfg.output.svg)
      for (const auto& c : r.charts) write_svg(dir, c);
  }
  write_text(dir / "report.json", run.report.dump(2) + "\n");
}

namespace {

json sweep_document(const json& base, const std::string& param, double value) {
  json doc = base;
  if (param == "theta") {
    if (!doc.contains("subspaces") || !doc["subspaces"].is_array()) throw ConfigError("sweep theta: config has no subspaces");
    auto& list = doc["subspaces"];
    for (auto it = list.rbegin(); it != list.rend(); ++it)
      if (it->is_object() && it->contains("line")) {
        (*it)["line"]["theta"] = value;
        return doc;
      }
    throw ConfigError("sweep theta: config has no line subspace");
  }
  if (!doc.contains("space") || !doc["space"].is_object()) throw ConfigError("sweep: config has no space");
  if (param == "dim") {
    if (std::abs(value - std::round(value)) > 1e-9) throw ConfigError("sweep dim: values must be integers");
    doc["space"]["dim"] = static_cast<long long>(std::llround(value));
  } else if (param == "p") {
    if (doc["space"].value("kind", "") != "lp") throw ConfigError("sweep p: config space is not lp");
    doc["space"]["p"] = value;
  } else {
    throw ConfigError("sweep: unknown parameter '" + param + "' (expected theta, dim or p)");
  }
  return doc;
}

SweepRow sweep_row(const ExperimentConfig& cfg) {
  SweepRow row;
  row.c = row.r = row.alpha = row.beta = row.c_hat = kNan;
  try {
    bool ok = true;
    if (cfg.hilbert() && cfg.dr_pair)
      row.c = friedrichs_number(cfg.subspaces[cfg.dr_pair->first], cfg.subspaces[cfg.dr_pair->second]);
    if (cfg.op) {
      const DichotomyReport d =
          dichotomy_report(op_matrix(cfg), cfg.params.iterations, cfg.params.tolerance, TraceNorm{cfg.p});
      row.r = d.rate;
      ok = ok && d.envelope_ok;
      row.alpha = resolvent_profile(op_matrix(cfg), geometric_theta_grid(cfg.params.theta_grid),
                                    cfg.params.resolvent_window)
                      .alpha;
      const ZnBeta zb = zn_beta(range_sample(cfg).points, std::max(10, cfg.params.kspectral_iterations));
      if (zb.beta) row.beta = *zb.beta;
    }
    if (!cfg.projections.empty()) {
      const HalperinReport h = halperin_inequality_check(ordered_projections(cfg), cfg.p, cfg.params.halperin_samples,
                                                         analysis_seed(cfg.seed, "halperin"));
      row.c_hat = h.c_hat;
      ok = ok && h.stable;
    }
    row.passed = ok;
  } catch (const std::exception& e) {
    row.passed = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const json& base, std::uint64_t seed, const SweepRequest& req, int jobs) {
  if (!(req.from < req.to)) throw ConfigError("sweep: --from must be below --to");
  if (req.steps < 2) throw ConfigError("sweep: --steps must be at least 2");
  std::vector<ExperimentConfig> configs;
  std::vector<double> values;
  for (int i = 0; i < req.steps; ++i) {
    const double v = req.from + (req.to - req.from) * i / (req.steps - 1);
    values.push_back(v);
    try {
      configs.push_back(parse_config(sweep_document(base, req.param, v), derive_seed(seed, static_cast<std::uint64_t>(i))));
    } catch (const ConfigError& e) {
      throw ConfigError("sweep value " + format_number(v) + ": " + e.what());
    }
  }
  std::vector<SweepRow> rows(configs.size());
  parallel_for(req.steps, jobs, [&](int i) {
    rows[static_cast<std::size_t>(i)] = sweep_row(configs[static_cast<std::size_t>(i)]);
    rows[static_cast<std::size_t>(i)].index = i;
    rows[static_cast<std::size_t>(i)].value = values[static_cast<std::size_t>(i)];
  });
  return rows;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table t{"sweep", {"index", "value", "c", "r", "alpha", "beta", "C_hat", "passed"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({double(r.index), r.value, r.c, r.r, r.alpha, r.beta, r.c_hat, r.passed ? 1.0 : 0.0});
  return t;
}

std::vector<double> read_rates_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read rates file '" + path + "'");
  std::vector<double> rates;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    if (line.find(',') != std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected one column");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || !std::isfinite(v)) {
      if (rates.empty() && lineno == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + line + "'");
    }
    rates.push_back(v);
  }
  if (rates.empty()) throw ConfigError("rates file '" + path + "' holds no values");
  return rates;
}

}  // namespace pdlab::cli
