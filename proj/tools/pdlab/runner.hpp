#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "output.hpp"

namespace pdlab::cli {

inline constexpr const char* kVersion = "0.1.0";

struct AnalysisResult {
  std::string name;
  bool passed = false;
  std::optional<std::string> error;  // math error raised by the analysis
  nlohmann::json summary = nlohmann::json::object();
  std::vector<Table> tables;
  std::vector<Chart> charts;
};

/// Seed for one analysis, fixed by its name so that it does not depend on
/// the order of the analyses list or on scheduling.
std::uint64_t analysis_seed(std::uint64_t base, const std::string& name);

AnalysisResult run_analysis(const ExperimentConfig& cfg, const std::string& name);

struct RunReport {
  std::vector<AnalysisResult> results;  // in config order
  nlohmann::json report;
  bool passed() const;
};

RunReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);
void write_outputs(const ExperimentConfig& cfg, const RunReport& run);

struct SweepRequest {
  std::string param;  // theta, dim or p
  double from = 0.0;
  double to = 1.0;
  int steps = 2;
};

struct SweepRow {
  int index = 0;
  double value = 0.0;
  double c = 0.0;       // Friedrichs number of the first two subspaces
  double r = 0.0;       // fitted exponential rate
  double alpha = 0.0;   // resolvent growth exponent
  double beta = 0.0;    // decay exponent of max |z^n (1 - z)| over the numerical range, n <= kspectral_iterations
  double c_hat = 0.0;   // Halperin-type constant
  bool passed = false;
  std::string error;
};

/// Rebuilds the configuration at each value; row i uses seed ^ i.
std::vector<SweepRow> run_sweep(const nlohmann::json& base, std::uint64_t seed, const SweepRequest& req, int jobs = 1);
Table sweep_table(const std::vector<SweepRow>& rows);

/// Rates from a one-column CSV with an optional header line.
std::vector<double> read_rates_csv(const std::string& path);

/// Runs `f(i)` for i in [0, count) on up to `jobs` threads. `f` must not throw.
template <class F>
void parallel_for(int count, int jobs, F&& f) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) f(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace pdlab::cli
