#pragma once

// Experiment configuration: a single JSON document describing the space,
// the subspaces or l^p projections, the operator, the analyses to run and
// the numeric knobs.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdlab/operators.hpp"
#include "pdlab/projections.hpp"
#include "pdlab/spaces.hpp"

namespace pdlab::cli {

/// Usage or schema problem; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_analyses() {
  static const std::vector<std::string> names{"dichotomy", "numrange", "resolvent", "ritt",     "stolz",
                                              "kspectral", "halperin", "dr-rate",   "slow",     "superpoly"};
  return names;
}

struct Parameters {
  int iterations = 1000;
  int theta_grid = 200;
  double resolvent_window = 0.1;
  int range_angles = 720;
  int range_samples = 2000;
  double tolerance = 1e-9;
  double stolz_window = 0.5;
  double stolz_c_min = 1e-3;
  int halperin_samples = 10000;
  int kspectral_iterations = 200;
  int superpoly_k_max = 3;
  int superpoly_iterations = 100;
  int superpoly_window_begin = 10;
  std::optional<int> superpoly_window_end;
  std::vector<double> slow_rates;
};

struct OutputOptions {
  std::string dir = "pdlab_out";
  bool csv = true;
  bool svg = false;
};

struct ExperimentConfig {
  nlohmann::json source;
  std::uint64_t seed = 0;
  Index dim = 0;
  std::optional<double> p;  // set for l^p configurations

  std::vector<std::string> subspace_names;
  std::vector<Subspace> subspaces;        // Hilbert mode only
  std::vector<ProjectionOp> projections;  // P1..Pn, one per subspace or lp block set
  std::vector<std::size_t> map_order;     // indices into projections, P_1 applied first
  std::optional<std::pair<std::size_t, std::size_t>> dr_pair;

  std::string operator_kind;
  std::optional<OperatorSpec> op;

  std::vector<std::string> analyses;
  Parameters params;
  OutputOptions output;

  bool hilbert() const { return !p.has_value(); }
};

/// Seed precedence: explicit override, then PDLAB_SEED (passed in by the
/// caller), then the config's own seed.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);
nlohmann::json read_json_file(const std::string& path);

std::uint64_t parse_seed(const std::string& text, const std::string& what);

/// Resolves the seed override from a flag value and the PDLAB_SEED environment variable.
std::optional<std::uint64_t> seed_override(std::optional<std::uint64_t> flag);

}  // namespace pdlab::cli
