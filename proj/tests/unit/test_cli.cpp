#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "config.hpp"
#include "doctest.h"
#include "output.hpp"
#include "runner.hpp"

using namespace pdlab;
using namespace pdlab::cli;
using nlohmann::json;

namespace {

json two_lines(double theta) {
  return {{"seed", 9},
          {"space", {{"kind", "hilbert"}, {"dim", 2}}},
          {"subspaces", json::array({{{"line", {{"theta", 0.0}}}}, {{"line", {{"theta", theta}}}}})},
          {"operator", {{"kind", "dr"}}},
          {"analyses", {"dichotomy", "dr-rate"}},
          {"parameters", {{"iterations", 60}}}};
}

json random_map() {
  return json::parse(R"({
    "seed": 21,
    "space": {"kind": "hilbert", "dim": 6},
    "subspaces": [{"random": {"count": 3}}],
    "operator": {"kind": "map"},
    "analyses": ["dichotomy", "numrange", "resolvent", "ritt", "stolz", "kspectral", "halperin", "superpoly"],
    "parameters": {"iterations": 300, "halperin_samples": 500, "theta_grid": 60, "range_angles": 180}
  })");
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pdlab_test_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numbers::pi}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(to_csv({"t", {"a", "b"}, {{1, 0.5}, {2, 0.25}}}) == "a,b\n1,0.5\n2,0.25\n");
}

TEST_CASE("svg output is a single well-formed document") {
  const std::string svg =
      to_svg({"c", "a < b", "n", "y", false, true, false, {{"s", {0, 1, 2}, {1, 0.1, 0.0}}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(mentions(svg, "a &lt; b"));
  CHECK(mentions(svg, "</svg>"));
}

TEST_CASE("config basics") {
  const ExperimentConfig cfg = parse_config(two_lines(std::numbers::pi / 3));
  CHECK(cfg.hilbert());
  CHECK(cfg.dim == 2);
  CHECK(cfg.seed == 9);
  REQUIRE(cfg.projections.size() == 2);
  REQUIRE(cfg.op);
  CHECK(cfg.op->expression() == "T21");
  REQUIRE(cfg.dr_pair);
  CHECK(cfg.dr_pair->first == 0);
  CHECK(cfg.subspace_names[1] == "M2");
  CHECK(parse_config(two_lines(1.0), 77).seed == 77);
}

TEST_CASE("complex span entries") {
  json doc = two_lines(1.0);
  doc["subspaces"] = json::array({{{"name", "w"}, {"span", {{json::array({0.0, 1.0}), 1.0}}}}});
  doc["operator"] = {{"kind", "map"}};
  doc["analyses"] = {"dichotomy"};
  const ExperimentConfig cfg = parse_config(doc);
  const ComplexMatrix& p = cfg.projections[0].matrix();
  CHECK(std::abs(p(0, 1) - Complex(0.0, 0.5)) < 1e-14);
  CHECK(cfg.subspace_names[0] == "w");
}

TEST_CASE("random subspaces follow the seed") {
  const ExperimentConfig a = parse_config(random_map());
  const ExperimentConfig b = parse_config(random_map());
  const ExperimentConfig c = parse_config(random_map(), 22);
  REQUIRE(a.projections.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.subspaces[i].dim() >= 1);
    CHECK(a.subspaces[i].dim() <= 5);
    CHECK((a.projections[i].matrix() - b.projections[i].matrix()).norm() == 0.0);
  }
  CHECK((a.projections[0].matrix() - c.projections[0].matrix()).norm() > 1e-3);
}

TEST_CASE("schema errors name the offending field") {
  json doc = two_lines(1.0);
  doc["space"]["dim"] = "two";
  CHECK(mentions(error_of(doc), "space.dim"));

  doc = two_lines(1.0);
  doc["analyses"] = {"dichotomy", "spectra"};
  CHECK(mentions(error_of(doc), "analyses[1]"));

  doc = two_lines(1.0);
  doc["colour"] = "blue";
  CHECK(mentions(error_of(doc), "colour"));

  doc = two_lines(1.0);
  doc["subspaces"][1]["line"]["theta"] = "wide";
  CHECK(mentions(error_of(doc), "subspaces[1].line.theta"));

  doc = two_lines(1.0);
  doc["operator"] = {{"kind", "convex"},
                     {"terms", json::array({{{"weight", 0.7}, {"product", {"T12"}}}, {{"weight", 0.2}, {"product", {"P1"}}}})}};
  CHECK(mentions(error_of(doc), "weight"));

  doc["operator"]["terms"][1]["weight"] = 0.3;
  doc["operator"]["terms"][1]["product"] = {"Q7"};
  CHECK(mentions(error_of(doc), "operator.terms[1].product[0]"));

  doc = two_lines(1.0);
  doc["space"] = {{"kind", "lp"}, {"dim", 2}, {"p", 3.0}};
  doc.erase("subspaces");
  doc.erase("operator");
  doc["projections"] = json::array({{{"blocks", {{0}}}}});
  doc["analyses"] = {"halperin", "dr-rate"};
  CHECK(mentions(error_of(doc), "Hilbert"));

  doc["analyses"] = {"kspectral"};
  CHECK(mentions(error_of(doc), "Hilbert"));

  doc = two_lines(1.0);
  doc.erase("operator");
  doc["analyses"] = {"ritt"};
  CHECK(mentions(error_of(doc), "needs an operator"));
}

TEST_CASE("convex combination of Douglas-Rachford orderings") {
  json doc = two_lines(0.7);
  doc["operator"] = json::parse(R"({"kind": "convex", "terms": [
      {"weight": 0.5, "product": ["T12", "T21"]}, {"weight": 0.5, "product": ["T21", "T12"]}]})");
  doc["analyses"] = {"dichotomy"};
  const ExperimentConfig cfg = parse_config(doc);
  const ComplexMatrix& p1 = cfg.projections[0].matrix();
  const ComplexMatrix& p2 = cfg.projections[1].matrix();
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix t12 = p1 * p2 + (id - p1) * (id - p2);
  const ComplexMatrix t21 = p2 * p1 + (id - p2) * (id - p1);
  CHECK((cfg.op->matrix() - 0.5 * (t12 * t21 + t21 * t12)).norm() < 1e-14);
}

TEST_CASE("lp block projections") {
  const json doc = json::parse(R"({
    "space": {"kind": "lp", "dim": 4, "p": 3},
    "projections": [{"blocks": [[0, 1], [2, 3]]}, {"blocks": [[1, 2]]}],
    "operator": {"kind": "map"},
    "analyses": ["halperin"]
  })");
  const ExperimentConfig cfg = parse_config(doc);
  CHECK_FALSE(cfg.hilbert());
  REQUIRE(cfg.projections.size() == 2);
  const ComplexMatrix& p = cfg.projections[0].matrix();
  CHECK((p * p - p).norm() < 1e-12);
  ComplexVector v = ComplexVector::Zero(4);
  v << 1, 1, 0, 0;
  CHECK((p * v - v).norm() < 1e-12);
}

TEST_CASE("slow rate formulas") {
  json doc = two_lines(1.0);
  doc["analyses"] = {"slow"};
  doc["parameters"] = {{"slow", {{"formula", "inverse-sqrt"}, {"N", 4}}}};
  const ExperimentConfig cfg = parse_config(doc);
  REQUIRE(cfg.params.slow_rates.size() == 5);
  CHECK(cfg.params.slow_rates[3] == doctest::Approx(0.5));

  doc["parameters"] = json::object();
  CHECK(mentions(error_of(doc), "parameters.slow"));
}

TEST_CASE("seed resolution") {
  CHECK(parse_seed("18446744073709551615", "x") == 18446744073709551615ull);
  CHECK_THROWS_AS(parse_seed("18446744073709551616", "x"), ConfigError);
  CHECK_THROWS_AS(parse_seed("-1", "x"), ConfigError);
  CHECK_THROWS_AS(parse_seed("", "x"), ConfigError);

  ::setenv("PDLAB_SEED", "5", 1);
  CHECK(seed_override(std::nullopt) == 5u);
  CHECK(seed_override(8u) == 8u);
  ::unsetenv("PDLAB_SEED");
  CHECK_FALSE(seed_override(std::nullopt));
}

TEST_CASE("analysis seeds do not depend on list order") {
  CHECK(analysis_seed(100, "halperin") == analysis_seed(100, "halperin"));
  CHECK(analysis_seed(100, "halperin") != analysis_seed(100, "numrange"));
  CHECK(analysis_seed(100, "halperin") != analysis_seed(101, "halperin"));
}

TEST_CASE("run on two lines") {
  const ExperimentConfig cfg = parse_config(two_lines(std::numbers::pi / 3));
  const RunReport run = run_experiment(cfg);
  CHECK(run.passed());
  REQUIRE(run.results.size() == 2);
  CHECK(run.report["analyses"]["dichotomy"]["rate"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(run.report["analyses"]["dr-rate"]["friedrichs"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  const Table& gaps = run.results[1].tables.at(0);
  CHECK(gaps.rows.at(10).at(1) == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-9));
}

TEST_CASE("math failures are reported per analysis") {
  json doc = two_lines(1.0);
  doc["space"]["dim"] = 3;
  doc["subspaces"] = json::array({{{"coordinates", {0, 1, 2}}}});
  doc["operator"] = {{"kind", "map"}};
  doc["analyses"] = {"ritt", "superpoly"};
  const RunReport run = run_experiment(parse_config(doc));
  CHECK(run.results[0].passed);
  CHECK_FALSE(run.results[1].passed);
  REQUIRE(run.results[1].error);
  CHECK(run.report["failed"] == json::array({"superpoly"}));
}

TEST_CASE("parallel runs match serial runs byte for byte") {
  const ExperimentConfig cfg = parse_config(random_map());
  const RunReport a = run_experiment(cfg, 1);
  const RunReport b = run_experiment(cfg, 4);
  CHECK(a.report.dump() == b.report.dump());
  REQUIRE(a.results.size() == b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i)
    for (std::size_t k = 0; k < a.results[i].tables.size(); ++k)
      CHECK(to_csv(a.results[i].tables[k]) == to_csv(b.results[i].tables[k]));
}

TEST_CASE("outputs land in the configured directory") {
  ExperimentConfig cfg = parse_config(two_lines(0.9));
  cfg.output.dir = scratch("outputs").string();
  cfg.output.svg = true;
  write_outputs(cfg, run_experiment(cfg));
  for (const char* f : {"report.json", "dichotomy.csv", "dr_rate.csv", "dichotomy.svg"})
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.output.dir) / f));
  std::ifstream in(std::filesystem::path(cfg.output.dir) / "dichotomy.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,gap,envelope");
}

TEST_CASE("sweep") {
  json doc = two_lines(1.0);
  doc["parameters"]["halperin_samples"] = 200;
  const auto rows = run_sweep(doc, 4, {"theta", 0.3, 1.2, 4}, 2);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.passed);
    CHECK(r.c == doctest::Approx(std::cos(r.value)).epsilon(1e-9));
    CHECK(r.r == doctest::Approx(std::cos(r.value)).epsilon(1e-6));
  }
  CHECK(rows[3].value == doctest::Approx(1.2));
  CHECK(to_csv(sweep_table(rows)) == to_csv(sweep_table(run_sweep(doc, 4, {"theta", 0.3, 1.2, 4}, 1))));

  CHECK_THROWS_AS(run_sweep(doc, 4, {"theta", 1.0, 0.5, 4}), ConfigError);
  CHECK_THROWS_AS(run_sweep(doc, 4, {"theta", 0.1, 0.5, 1}), ConfigError);
  CHECK_THROWS_AS(run_sweep(doc, 4, {"p", 2.5, 3.5, 3}), ConfigError);
}

TEST_CASE("rates files") {
  const auto dir = scratch("rates");
  std::ofstream(dir / "a.csv") << "rate\n1\n0.5\r\n 0.25 \n\n";
  CHECK(read_rates_csv((dir / "a.csv").string()) == std::vector<double>{1.0, 0.5, 0.25});
  std::ofstream(dir / "b.csv") << "rate\n";
  CHECK_THROWS_AS(read_rates_csv((dir / "b.csv").string()), ConfigError);
  std::ofstream(dir / "c.csv") << "1\nhalf\n";
  CHECK_THROWS_AS(read_rates_csv((dir / "c.csv").string()), ConfigError);
  std::ofstream(dir / "d.csv") << "1,2\n";
  CHECK_THROWS_AS(read_rates_csv((dir / "d.csv").string()), ConfigError);
  CHECK_THROWS_AS(read_rates_csv((dir / "missing.csv").string()), ConfigError);
}
