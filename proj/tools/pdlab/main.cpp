#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "output.hpp"
#include "pdlab/error.hpp"
#include "pdlab/lab.hpp"
#include "runner.hpp"

namespace {

using namespace pdlab;
using namespace pdlab::cli;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kUsage = 1, kCheckFailed = 2 };

std::optional<std::uint64_t> seed_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_seed(text, "--seed");
}

int cmd_run(const std::string& path, const std::string& seed_text, const std::string& out, int jobs, bool svg) {
  ExperimentConfig cfg = parse_config(read_json_file(path), seed_override(seed_flag(seed_text)));
  if (!out.empty()) cfg.output.dir = out;
  if (svg) cfg.output.svg = true;
  const RunReport run = run_experiment(cfg, jobs);
  write_outputs(cfg, run);
  for (const auto& r : run.results) {
    std::printf("%-10s %s", r.name.c_str(), r.passed ? "PASS" : "FAIL");
    if (r.error) std::printf("  error: %s", r.error->c_str());
    std::printf("\n");
  }
  if (!run.passed()) {
    std::string names;
    for (const auto& r : run.results)
      if (!r.passed) names += (names.empty() ? "" : ", ") + r.name;
    std::fprintf(stderr, "pdlab: failed analyses: %s\n", names.c_str());
    return kCheckFailed;
  }
  return kOk;
}

int cmd_validate(const std::string& path, const std::string& seed_text) {
  const ExperimentConfig cfg = parse_config(read_json_file(path), seed_override(seed_flag(seed_text)));
  std::printf("space      %s, dim %lld", cfg.hilbert() ? "hilbert" : "lp", static_cast<long long>(cfg.dim));
  if (cfg.p) std::printf(", p = %g", *cfg.p);
  std::printf("\nseed       %llu\n", static_cast<unsigned long long>(cfg.seed));
  for (std::size_t i = 0; i < cfg.projections.size(); ++i)
    std::printf("P%zu         %s, rank %lld\n", i + 1, cfg.subspace_names[i].c_str(),
                static_cast<long long>(cfg.projections[i].range_dim()));
  if (cfg.op) std::printf("operator   %s = %s\n", cfg.operator_kind.c_str(), cfg.op->expression().c_str());
  std::string names;
  for (const auto& a : cfg.analyses) names += (names.empty() ? "" : " ") + a;
  std::printf("analyses   %s\n", names.c_str());
  return kOk;
}

int cmd_sweep(const std::string& path, const SweepRequest& req, const std::string& seed_text, const std::string& out,
              int jobs) {
  const nlohmann::json doc = read_json_file(path);
  std::uint64_t seed = parse_config(doc, seed_override(seed_flag(seed_text))).seed;
  const auto rows = run_sweep(doc, seed, req, jobs);
  const fs::path dir = out.empty() ? fs::path("pdlab_sweep") : fs::path(out);
  fs::create_directories(dir);
  write_csv(dir, sweep_table(rows));
  bool ok = true;
  for (const auto& r : rows) {
    if (!r.error.empty()) std::fprintf(stderr, "pdlab: sweep row %d (%s): %s\n", r.index, format_number(r.value).c_str(), r.error.c_str());
    ok = ok && r.passed;
  }
  std::printf("sweep      %zu rows -> %s\n", rows.size(), (dir / "sweep.csv").string().c_str());
  return ok ? kOk : kCheckFailed;
}

int cmd_slow(const std::string& rates_path, const std::string& out) {
  const auto rates = read_rates_csv(rates_path);
  const SlowInstance s = [&] {
    try {
      return slow_instance(rates);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }();
  const fs::path dir = out.empty() ? fs::path("pdlab_slow") : fs::path(out);
  fs::create_directories(dir);

  Table bases{"bases", {"subspace", "column", "row", "re", "im"}, {}};
  const Subspace* spaces[] = {&s.m1, &s.m2};
  for (int k = 0; k < 2; ++k) {
    const ComplexMatrix& b = spaces[k]->basis();
    for (Index c = 0; c < b.cols(); ++c)
      for (Index i = 0; i < b.rows(); ++i)
        bases.rows.push_back({double(k + 1), double(c), double(i), b(i, c).real(), b(i, c).imag()});
  }
  Table x{"x", {"index", "re", "im"}, {}};
  for (Index i = 0; i < s.x.size(); ++i) x.rows.push_back({double(i), s.x[i].real(), s.x[i].imag()});
  Table cert{"certificate", {"n", "norm", "rate", "weak"}, {}};
  for (std::size_t n = 0; n < s.rates.size(); ++n)
    cert.rows.push_back({double(n), s.orbit_norms[n], s.rates[n], s.weak_values[n]});
  write_csv(dir, bases);
  write_csv(dir, x);
  write_csv(dir, cert);
  const nlohmann::json summary = {{"dimension", s.dimension()}, {"kappa", s.kappa}, {"terms", s.rates.size()}};
  write_text(dir / "slow.json", summary.dump(2) + "\n");
  std::printf("slow       dimension %lld, kappa %.6g -> %s\n", static_cast<long long>(s.dimension()), s.kappa,
              dir.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdlab: convergence rates of projection methods on finite-dimensional spaces"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config, seed_text, out;
  int jobs = 1;
  bool svg = false;

  auto* run = app.add_subcommand("run", "run the analyses listed in a config");
  run->add_option("config,--config", config, "experiment config (JSON)")->required();
  run->add_option("--seed", seed_text, "override the config seed (also PDLAB_SEED)");
  run->add_option("--out", out, "output directory (overrides output.dir)");
  run->add_option("--jobs", jobs, "analyses to run concurrently")->check(CLI::PositiveNumber);
  run->add_flag("--svg", svg, "also write SVG charts");

  auto* validate = app.add_subcommand("validate", "parse a config and print what it describes");
  validate->add_option("config,--config", config, "experiment config (JSON)")->required();
  validate->add_option("--seed", seed_text, "override the config seed");

  SweepRequest req;
  auto* sweep = app.add_subcommand("sweep", "scan one parameter and tabulate rate diagnostics");
  sweep->add_option("--param", req.param, "theta, dim or p")->required()->check(CLI::IsMember({"theta", "dim", "p"}));
  sweep->add_option("--from", req.from, "first value")->required();
  sweep->add_option("--to", req.to, "last value")->required();
  sweep->add_option("--steps", req.steps, "number of values (at least 2)")->required();
  sweep->add_option("--config", config, "base config (JSON)")->required();
  sweep->add_option("--out", out, "output directory");
  sweep->add_option("--seed", seed_text, "base seed; row i uses seed ^ i");
  sweep->add_option("--jobs", jobs, "rows to compute concurrently")->check(CLI::PositiveNumber);

  std::string rates;
  auto* slow = app.add_subcommand("slow", "build a certified slow instance from a rate sequence");
  slow->add_option("--rates", rates, "one-column CSV of rates r_0, r_1, ...")->required();
  slow->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config, seed_text, out, jobs, svg);
    if (*validate) return cmd_validate(config, seed_text);
    if (*sweep) return cmd_sweep(config, req, seed_text, out, jobs);
    if (*slow) return cmd_slow(rates, out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "pdlab: %s\n", e.what());
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "pdlab: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pdlab: %s\n", e.what());
    return kCheckFailed;
  }
  return kUsage;
}
