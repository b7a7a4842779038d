#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "pdlab/error.hpp"
#include "pdlab/random.hpp"

namespace pdlab::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSubspaceStream = 0x5ab5'9ace;
constexpr std::uint64_t kDefaultSeed = 20240607;

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(where, "unknown field '" + key + "'");
  }
}

const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  return j;
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

int get_int(const json& j, const std::string& where, int lo) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > 100'000'000) fail(where, "must be at least " + std::to_string(lo));
  return static_cast<int>(v);
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

Complex get_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {get_number(j, where), 0.0};
  if (j.is_array() && j.size() == 2) return {get_number(j[0], where + "[0]"), get_number(j[1], where + "[1]")};
  fail(where, "expected a number or an [re, im] pair");
}

ComplexVector get_vector(const json& j, Index dim, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of entries");
  if (static_cast<Index>(j.size()) != dim)
    fail(where, "has " + std::to_string(j.size()) + " entries but the space has dimension " + std::to_string(dim));
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = get_complex(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
  return v;
}

Index get_index(const json& j, Index dim, const std::string& where) {
  const int i = get_int(j, where, 0);
  if (i >= dim) fail(where, "index " + std::to_string(i) + " outside dimension " + std::to_string(dim));
  return i;
}

void parse_hilbert_subspaces(const json& list, ExperimentConfig& cfg) {
  if (!list.is_array()) fail("subspaces", "expected an array");
  Rng rng(derive_seed(cfg.seed, kSubspaceStream));
  auto add = [&](std::string name, Subspace s) {
    if (name.empty()) name = "M" + std::to_string(cfg.subspaces.size() + 1);
    cfg.subspace_names.push_back(std::move(name));
    cfg.subspaces.push_back(std::move(s));
  };
  for (std::size_t e = 0; e < list.size(); ++e) {
    const std::string where = "subspaces[" + std::to_string(e) + "]";
    const json& item = require_object(list[e], where);
    reject_unknown(item, where, {"name", "span", "line", "coordinates", "random"});
    std::string name;
    if (item.contains("name")) {
      if (!item["name"].is_string()) fail(where + ".name", "expected a string");
      name = item["name"].get<std::string>();
    }
    const int kinds = item.contains("span") + item.contains("line") + item.contains("coordinates") + item.contains("random");
    if (kinds != 1) fail(where, "give exactly one of span, line, coordinates, random");

    if (item.contains("span")) {
      const json& vs = item["span"];
      if (!vs.is_array()) fail(where + ".span", "expected an array of vectors");
      ComplexMatrix m(cfg.dim, static_cast<Index>(vs.size()));
      for (std::size_t k = 0; k < vs.size(); ++k)
        m.col(static_cast<Index>(k)) = get_vector(vs[k], cfg.dim, where + ".span[" + std::to_string(k) + "]");
      add(name, vs.empty() ? Subspace::zero(cfg.dim) : Subspace::span(m));
    } else if (item.contains("line")) {
      const json& l = require_object(item["line"], where + ".line");
      reject_unknown(l, where + ".line", {"theta"});
      if (!l.contains("theta")) fail(where + ".line", "missing theta");
      if (cfg.dim < 2) fail(where + ".line", "needs dimension at least 2");
      const double theta = get_number(l["theta"], where + ".line.theta");
      ComplexVector v = ComplexVector::Zero(cfg.dim);
      v[0] = std::cos(theta);
      v[1] = std::sin(theta);
      add(name, Subspace::span(v));
    } else if (item.contains("coordinates")) {
      const json& cs = item["coordinates"];
      if (!cs.is_array()) fail(where + ".coordinates", "expected an array of indices");
      ComplexMatrix m = ComplexMatrix::Zero(cfg.dim, static_cast<Index>(cs.size()));
      for (std::size_t k = 0; k < cs.size(); ++k)
        m(get_index(cs[k], cfg.dim, where + ".coordinates[" + std::to_string(k) + "]"), static_cast<Index>(k)) = 1.0;
      add(name, cs.empty() ? Subspace::zero(cfg.dim) : Subspace::span(m));
    } else {
      const json& r = require_object(item["random"], where + ".random");
      reject_unknown(r, where + ".random", {"count", "dims"});
      if (!name.empty()) fail(where, "random entries are named automatically");
      const int count = r.contains("count") ? get_int(r["count"], where + ".random.count", 1) : 1;
      for (int c = 0; c < count; ++c) {
        Index k;
        if (!r.contains("dims")) {
          if (cfg.dim < 2) fail(where + ".random", "needs dimension at least 2 when dims is omitted");
          k = static_cast<Index>(rng.integer(1, static_cast<std::uint64_t>(cfg.dim - 1)));
        } else if (r["dims"].is_array()) {
          if (r["dims"].size() != static_cast<std::size_t>(count)) fail(where + ".random.dims", "needs one entry per subspace");
          k = get_int(r["dims"][static_cast<std::size_t>(c)], where + ".random.dims[" + std::to_string(c) + "]", 0);
        } else {
          k = get_int(r["dims"], where + ".random.dims", 0);
        }
        if (k > cfg.dim) fail(where + ".random.dims", "dimension " + std::to_string(k) + " exceeds the space");
        add("", Subspace::from_orthonormal(rng.orthonormal_columns(cfg.dim, k)));
      }
    }
  }
  for (const Subspace& s : cfg.subspaces) cfg.projections.push_back(orth_projection(s));
}

void parse_lp_projections(const json& list, ExperimentConfig& cfg) {
  if (!list.is_array()) fail("projections", "expected an array");
  const LpSpace space(cfg.dim, *cfg.p);
  for (std::size_t e = 0; e < list.size(); ++e) {
    const std::string where = "projections[" + std::to_string(e) + "]";
    const json& item = require_object(list[e], where);
    reject_unknown(item, where, {"name", "blocks", "vectors"});
    if (!item.contains("blocks") || !item["blocks"].is_array()) fail(where + ".blocks", "expected an array of index lists");
    std::vector<std::vector<Index>> blocks;
    for (std::size_t b = 0; b < item["blocks"].size(); ++b) {
      const json& blk = item["blocks"][b];
      const std::string bw = where + ".blocks[" + std::to_string(b) + "]";
      if (!blk.is_array()) fail(bw, "expected an array of indices");
      std::vector<Index> idx;
      for (std::size_t i = 0; i < blk.size(); ++i) idx.push_back(get_index(blk[i], cfg.dim, bw + "[" + std::to_string(i) + "]"));
      blocks.push_back(std::move(idx));
    }
    std::vector<ComplexVector> vectors;
    if (item.contains("vectors")) {
      const json& vs = item["vectors"];
      if (!vs.is_array() || vs.size() != blocks.size()) fail(where + ".vectors", "needs one vector per block");
      for (std::size_t b = 0; b < vs.size(); ++b)
        vectors.push_back(get_vector(vs[b], cfg.dim, where + ".vectors[" + std::to_string(b) + "]"));
    } else {
      for (const auto& blk : blocks) {
        ComplexVector u = ComplexVector::Zero(cfg.dim);
        for (Index i : blk) u[i] = std::pow(static_cast<double>(blk.size()), -1.0 / *cfg.p);
        vectors.push_back(u);
      }
    }
    try {
      cfg.projections.push_back(lp_partition_projection(space, std::move(blocks), std::move(vectors)).op);
    } catch (const pdlab::Error& err) {
      fail(where, err.what());
    }
    std::string name = item.contains("name") && item["name"].is_string() ? item["name"].get<std::string>() : "";
    cfg.subspace_names.push_back(name.empty() ? "P" + std::to_string(e + 1) : name);
  }
}

std::size_t resolve_factor(const json& j, const ExperimentConfig& cfg, const std::string& where) {
  if (j.is_number_integer()) {
    const int k = get_int(j, where, 1);
    if (static_cast<std::size_t>(k) > cfg.projections.size()) fail(where, "no projection number " + std::to_string(k));
    return static_cast<std::size_t>(k - 1);
  }
  if (!j.is_string()) fail(where, "expected a projection name or 1-based index");
  const std::string name = j.get<std::string>();
  for (std::size_t i = 0; i < cfg.projections.size(); ++i)
    if (cfg.subspace_names[i] == name || "P" + std::to_string(i + 1) == name) return i;
  fail(where, "unknown projection '" + name + "'");
}

void parse_operator(const json& j, ExperimentConfig& cfg) {
  const json& op = require_object(j, "operator");
  reject_unknown(op, "operator", {"kind", "order", "pair", "k", "l", "terms"});
  if (!op.contains("kind") || !op["kind"].is_string()) fail("operator.kind", "expected one of map, dr, dr-generalized, convex");
  cfg.operator_kind = op["kind"].get<std::string>();
  const std::size_t n = cfg.projections.size();
  if (n == 0) fail("operator", "no subspaces or projections to build from");

  if (op.contains("order")) {
    if (!op["order"].is_array() || op["order"].empty()) fail("operator.order", "expected a non-empty array");
    for (std::size_t i = 0; i < op["order"].size(); ++i)
      cfg.map_order.push_back(resolve_factor(op["order"][i], cfg, "operator.order[" + std::to_string(i) + "]"));
  } else {
    for (std::size_t i = 0; i < n; ++i) cfg.map_order.push_back(i);
  }
  if (op.contains("pair")) {
    if (!op["pair"].is_array() || op["pair"].size() != 2) fail("operator.pair", "expected two projections");
    cfg.dr_pair = {resolve_factor(op["pair"][0], cfg, "operator.pair[0]"), resolve_factor(op["pair"][1], cfg, "operator.pair[1]")};
  } else if (n >= 2) {
    cfg.dr_pair = {0, 1};
  }

  try {
    if (cfg.operator_kind == "map") {
      std::vector<ProjectionOp> ps;
      for (std::size_t i : cfg.map_order) ps.push_back(cfg.projections[i]);
      cfg.op = map_operator(ps);
    } else if (cfg.operator_kind == "dr") {
      if (!cfg.dr_pair) fail("operator", "dr needs two subspaces");
      cfg.op = dr_operator(cfg.projections[cfg.dr_pair->first], cfg.projections[cfg.dr_pair->second]);
    } else if (cfg.operator_kind == "dr-generalized") {
      if (!op.contains("k") || !op.contains("l")) fail("operator", "dr-generalized needs k and l");
      const std::size_t k = resolve_factor(op["k"], cfg, "operator.k");
      const std::size_t l = resolve_factor(op["l"], cfg, "operator.l");
      cfg.op = dr_generalized(cfg.projections[k], cfg.projections[l], static_cast<int>(k + 1), static_cast<int>(l + 1));
    } else if (cfg.operator_kind == "convex") {
      if (n > 9) fail("operator", "convex combinations support at most 9 projections");
      if (!op.contains("terms") || !op["terms"].is_array() || op["terms"].empty())
        fail("operator.terms", "expected a non-empty array");
      std::map<std::string, OperatorSpec> table;
      for (std::size_t k = 0; k < n; ++k) {
        table.emplace("P" + std::to_string(k + 1), map_operator(std::span(&cfg.projections[k], 1)));
        for (std::size_t l = 0; l < n; ++l)
          if (k != l)
            table.emplace("T" + std::to_string(k + 1) + std::to_string(l + 1),
                          dr_generalized(cfg.projections[k], cfg.projections[l], static_cast<int>(k + 1), static_cast<int>(l + 1)));
      }
      std::vector<ProductTerm> terms;
      double total = 0.0;
      for (std::size_t i = 0; i < op["terms"].size(); ++i) {
        const std::string where = "operator.terms[" + std::to_string(i) + "]";
        const json& t = require_object(op["terms"][i], where);
        reject_unknown(t, where, {"weight", "product"});
        if (!t.contains("weight")) fail(where, "missing weight");
        if (!t.contains("product") || !t["product"].is_array() || t["product"].empty())
          fail(where + ".product", "expected a non-empty array of factor names");
        ProductTerm term{get_number(t["weight"], where + ".weight"), {}};
        if (term.weight < 0.0) fail(where + ".weight", "must be nonnegative");
        total += term.weight;
        for (std::size_t f = 0; f < t["product"].size(); ++f) {
          const json& name = t["product"][f];
          const std::string fw = where + ".product[" + std::to_string(f) + "]";
          if (!name.is_string() || !table.count(name.get<std::string>()))
            fail(fw, "unknown factor (use P1.., or T12 style Douglas-Rachford names)");
          term.factors.push_back(name.get<std::string>());
        }
        terms.push_back(std::move(term));
      }
      if (std::abs(total - 1.0) > 1e-12) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", total);
        fail("operator.terms.weight", std::string("weights sum to ") + buf + ", expected 1");
      }
      cfg.op = convex_combination(table, std::move(terms));
    } else {
      fail("operator.kind", "unknown kind '" + cfg.operator_kind + "'");
    }
  } catch (const pdlab::Error& err) {
    fail("operator", err.what());
  }
}

std::vector<double> slow_rates(const json& j) {
  const json& s = require_object(j, "parameters.slow");
  reject_unknown(s, "parameters.slow", {"rates", "formula", "N", "ratio"});
  if (s.contains("rates")) {
    if (!s["rates"].is_array()) fail("parameters.slow.rates", "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < s["rates"].size(); ++i)
      out.push_back(get_number(s["rates"][i], "parameters.slow.rates[" + std::to_string(i) + "]"));
    return out;
  }
  if (!s.contains("formula") || !s["formula"].is_string()) fail("parameters.slow", "give rates or a formula");
  const int n = s.contains("N") ? get_int(s["N"], "parameters.slow.N", 0) : 200;
  const std::string formula = s["formula"].get<std::string>();
  std::vector<double> out;
  if (formula == "inverse-sqrt") {
    for (int k = 0; k <= n; ++k) out.push_back(1.0 / std::sqrt(k + 1.0));
  } else if (formula == "geometric") {
    const double ratio = s.contains("ratio") ? get_number(s["ratio"], "parameters.slow.ratio") : 0.5;
    for (int k = 0; k <= n; ++k) out.push_back(std::pow(ratio, k));
  } else {
    fail("parameters.slow.formula", "expected inverse-sqrt or geometric");
  }
  return out;
}

void parse_parameters(const json& j, Parameters& p) {
  const json& o = require_object(j, "parameters");
  reject_unknown(o, "parameters",
                 {"iterations", "theta_grid", "resolvent_window", "range_angles", "range_samples", "tolerance",
                  "stolz_window", "stolz_c_min", "halperin_samples", "kspectral_iterations", "superpoly", "slow"});
  if (o.contains("iterations")) p.iterations = get_int(o["iterations"], "parameters.iterations", 10);
  if (o.contains("theta_grid")) p.theta_grid = get_int(o["theta_grid"], "parameters.theta_grid", 2);
  if (o.contains("resolvent_window")) p.resolvent_window = get_number(o["resolvent_window"], "parameters.resolvent_window");
  if (o.contains("range_angles")) p.range_angles = get_int(o["range_angles"], "parameters.range_angles", 8);
  if (o.contains("range_samples")) p.range_samples = get_int(o["range_samples"], "parameters.range_samples", 100);
  if (o.contains("tolerance")) p.tolerance = get_number(o["tolerance"], "parameters.tolerance");
  if (o.contains("stolz_window")) p.stolz_window = get_number(o["stolz_window"], "parameters.stolz_window");
  if (o.contains("stolz_c_min")) p.stolz_c_min = get_number(o["stolz_c_min"], "parameters.stolz_c_min");
  if (o.contains("halperin_samples")) p.halperin_samples = get_int(o["halperin_samples"], "parameters.halperin_samples", 1);
  if (o.contains("kspectral_iterations"))
    p.kspectral_iterations = get_int(o["kspectral_iterations"], "parameters.kspectral_iterations", 1);
  if (o.contains("superpoly")) {
    const json& s = require_object(o["superpoly"], "parameters.superpoly");
    reject_unknown(s, "parameters.superpoly", {"k_max", "iterations", "window"});
    if (s.contains("k_max")) p.superpoly_k_max = get_int(s["k_max"], "parameters.superpoly.k_max", 2);
    if (s.contains("iterations")) p.superpoly_iterations = get_int(s["iterations"], "parameters.superpoly.iterations", 2);
    if (s.contains("window")) {
      if (!s["window"].is_array() || s["window"].size() != 2) fail("parameters.superpoly.window", "expected [begin, end]");
      p.superpoly_window_begin = get_int(s["window"][0], "parameters.superpoly.window[0]", 1);
      p.superpoly_window_end = get_int(s["window"][1], "parameters.superpoly.window[1]", 2);
    }
  }
  if (o.contains("slow")) p.slow_rates = slow_rates(o["slow"]);
  if (p.tolerance <= 0.0) fail("parameters.tolerance", "must be positive");
  if (!(p.resolvent_window > 0.0)) fail("parameters.resolvent_window", "must be positive");
}

}  // namespace

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(what + ": expected a nonnegative 64-bit integer, got '" + text + "'");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno == ERANGE) throw ConfigError(what + ": value out of 64-bit range");
  return v;
}

std::optional<std::uint64_t> seed_override(std::optional<std::uint64_t> flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("PDLAB_SEED"); env && *env) return parse_seed(env, "PDLAB_SEED");
  return std::nullopt;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg;
  cfg.source = doc;
  require_object(doc, "config");
  reject_unknown(doc, "config",
                 {"description", "seed", "space", "subspaces", "projections", "operator", "analyses", "parameters", "output"});

  if (seed) {
    cfg.seed = *seed;
  } else if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0))
      cfg.seed = s.get<std::uint64_t>();
    else if (s.is_string())
      cfg.seed = parse_seed(s.get<std::string>(), "seed");
    else
      fail("seed", "expected a nonnegative integer");
  } else {
    cfg.seed = kDefaultSeed;
  }

  if (!doc.contains("space")) fail("space", "missing");
  const json& space = require_object(doc["space"], "space");
  reject_unknown(space, "space", {"kind", "dim", "p"});
  if (!space.contains("kind") || !space["kind"].is_string()) fail("space.kind", "expected hilbert or lp");
  if (!space.contains("dim")) fail("space.dim", "missing");
  cfg.dim = get_int(space["dim"], "space.dim", 1);
  const std::string kind = space["kind"].get<std::string>();
  if (kind == "lp") {
    if (!space.contains("p")) fail("space.p", "missing for an lp space");
    const double p = get_number(space["p"], "space.p");
    if (!(p > 1.0)) fail("space.p", "must lie in (1, inf)");
    cfg.p = p;
  } else if (kind != "hilbert") {
    fail("space.kind", "expected hilbert or lp, got '" + kind + "'");
  } else if (space.contains("p")) {
    fail("space.p", "only meaningful for lp spaces");
  }

  if (cfg.hilbert()) {
    if (doc.contains("projections")) fail("projections", "Hilbert configs describe subspaces instead");
    if (doc.contains("subspaces")) parse_hilbert_subspaces(doc["subspaces"], cfg);
  } else {
    if (doc.contains("subspaces")) fail("subspaces", "lp configs describe projections by blocks and vectors");
    if (doc.contains("projections")) parse_lp_projections(doc["projections"], cfg);
  }

  if (doc.contains("parameters")) parse_parameters(doc["parameters"], cfg.params);

  if (doc.contains("output")) {
    const json& o = require_object(doc["output"], "output");
    reject_unknown(o, "output", {"dir", "csv", "svg"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) fail("output.dir", "expected a string");
      cfg.output.dir = o["dir"].get<std::string>();
    }
    if (o.contains("csv")) cfg.output.csv = get_bool(o["csv"], "output.csv");
    if (o.contains("svg")) cfg.output.svg = get_bool(o["svg"], "output.svg");
  }

  if (doc.contains("operator")) parse_operator(doc["operator"], cfg);

  if (!doc.contains("analyses") || !doc["analyses"].is_array() || doc["analyses"].empty())
    fail("analyses", "expected a non-empty array of analysis names");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc["analyses"].size(); ++i) {
    const std::string where = "analyses[" + std::to_string(i) + "]";
    const json& a = doc["analyses"][i];
    if (!a.is_string()) fail(where, "expected a string");
    const std::string name = a.get<std::string>();
    const auto& known = known_analyses();
    if (std::find(known.begin(), known.end(), name) == known.end()) fail(where, "unknown analysis '" + name + "'");
    if (!seen.insert(name).second) fail(where, "analysis '" + name + "' listed twice");
    if (!cfg.hilbert() && (name == "dr-rate" || name == "kspectral"))
      fail(where, "'" + name + "' needs a Hilbert space");
    if (name == "dr-rate" && (!cfg.dr_pair && cfg.subspaces.size() < 2)) fail(where, "dr-rate needs two subspaces");
    if (name == "slow" && cfg.params.slow_rates.empty()) fail("parameters.slow", "required by the slow analysis");
    if (name == "halperin" && cfg.projections.empty()) fail(where, "halperin needs projections");
    if (name != "slow" && name != "dr-rate" && name != "halperin" && !cfg.op)
      fail(where, "'" + name + "' needs an operator");
    cfg.analyses.push_back(name);
  }
  if (!cfg.dr_pair && cfg.subspaces.size() >= 2) cfg.dr_pair = {0, 1};
  if (cfg.map_order.empty())
    for (std::size_t i = 0; i < cfg.projections.size(); ++i) cfg.map_order.push_back(i);
  return cfg;
}

}  // namespace pdlab::cli
