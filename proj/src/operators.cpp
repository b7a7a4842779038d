#include "pdlab/operators.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "pdlab/error.hpp"

namespace pdlab {

namespace {

void require_iterations(int n, const char* op) {
  if (n < 1) throw InvalidArgument(std::string(op) + ": iteration count must be at least 1");
}

void require_square_match(const ComplexMatrix& t, const ComplexMatrix& limit, const char* op) {
  if (t.rows() != t.cols() || t.rows() == 0) throw DimensionError(std::string(op) + ": T must be square");
  if (limit.rows() != t.rows() || limit.cols() != t.cols())
    throw DimensionError(std::string(op) + ": limit projection does not match T");
}

double measure(const ComplexMatrix& m, const TraceNorm& norm) {
  return norm.p ? operator_pnorm(m, *norm.p, NormMode::estimate) : spectral_norm(m);
}

double measure(const ComplexVector& v, const TraceNorm& norm) {
  return norm.p ? lp_norm(v, *norm.p) : v.norm();
}

}  // namespace

OperatorSpec::OperatorSpec(std::map<std::string, ComplexMatrix> factors, std::vector<ProductTerm> terms)
    : factors_(std::move(factors)), terms_(std::move(terms)) {
  if (factors_.empty()) throw InvalidArgument("OperatorSpec: no factors");
  if (terms_.empty()) throw InvalidArgument("OperatorSpec: no terms");
  const Index d = factors_.begin()->second.rows();
  for (const auto& [name, m] : factors_) {
    if (m.rows() != d || m.cols() != d)
      throw DimensionError("OperatorSpec: factor '" + name + "' is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected " + std::to_string(d) + "x" + std::to_string(d));
    require_finite(m, "OperatorSpec factor " + name);
  }
  double total = 0.0;
  for (const auto& term : terms_) {
    if (!(term.weight >= 0.0)) throw InvalidArgument("OperatorSpec: weight " + std::to_string(term.weight) + " is negative");
    if (term.factors.empty()) throw InvalidArgument("OperatorSpec: empty product");
    for (const auto& name : term.factors)
      if (!factors_.count(name)) throw InvalidArgument("OperatorSpec: unknown factor '" + name + "'");
    total += term.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument("OperatorSpec: weights sum to " + std::to_string(total) + ", expected 1");

  matrix_ = ComplexMatrix::Zero(d, d);
  for (const auto& term : terms_) {
    ComplexMatrix product = factors_.at(term.factors.front());
    for (std::size_t k = 1; k < term.factors.size(); ++k) product = product * factors_.at(term.factors[k]);
    matrix_ += term.weight * product;
  }
}

std::string OperatorSpec::expression() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out << " + ";
    if (terms_.size() > 1 || terms_[i].weight != 1.0) out << terms_[i].weight << '*';
    for (std::size_t k = 0; k < terms_[i].factors.size(); ++k) {
      if (k) out << '*';
      out << terms_[i].factors[k];
    }
  }
  return out.str();
}

bool OperatorSpec::uses_every_factor() const {
  std::set<std::string> used;
  for (const auto& term : terms_)
    if (term.weight > 0.0) used.insert(term.factors.begin(), term.factors.end());
  return used.size() == factors_.size();
}

OperatorSpec map_operator(std::span<const ProjectionOp> projections) {
  if (projections.empty()) throw InvalidArgument("map_operator: need at least one projection");
  std::map<std::string, ComplexMatrix> table;
  std::vector<std::string> product;
  const Index d = projections.front().dim();
  for (std::size_t k = 0; k < projections.size(); ++k) {
    if (projections[k].dim() != d) throw DimensionError("map_operator: projection dimensions differ");
    const std::string name = "P" + std::to_string(k + 1);
    table.emplace(name, projections[k].matrix());
    product.insert(product.begin(), name);
  }
  return OperatorSpec(std::move(table), {ProductTerm{1.0, std::move(product)}});
}

ComplexMatrix dr_matrix(const ComplexMatrix& pk, const ComplexMatrix& pl) {
  if (pk.rows() != pl.rows() || pk.cols() != pl.cols() || pk.rows() != pk.cols())
    throw DimensionError("dr_matrix: projection dimensions differ");
  const ComplexMatrix id = ComplexMatrix::Identity(pk.rows(), pk.cols());
  return pk * pl + (id - pk) * (id - pl);
}

OperatorSpec dr_generalized(const ProjectionOp& pk, const ProjectionOp& pl, int k, int l) {
  const std::string name = "T" + std::to_string(k) + std::to_string(l);
  std::map<std::string, ComplexMatrix> table;
  table.emplace(name, dr_matrix(pk.matrix(), pl.matrix()));
  return OperatorSpec(std::move(table), {ProductTerm{1.0, {name}}});
}

OperatorSpec dr_operator(const ProjectionOp& p1, const ProjectionOp& p2) { return dr_generalized(p2, p1, 2, 1); }

OperatorSpec convex_combination(const std::map<std::string, OperatorSpec>& table, std::vector<ProductTerm> terms) {
  std::map<std::string, ComplexMatrix> factors;
  for (const auto& [name, spec] : table) factors.emplace(name, spec.matrix());
  return OperatorSpec(std::move(factors), std::move(terms));
}

std::string TraceNorm::label() const {
  if (!p) return "2-norm";
  std::ostringstream out;
  out << "lp-estimate(p=" << *p << ")";
  return out.str();
}

OrbitTrace orbit(const ComplexMatrix& t, const ComplexMatrix& limit, const ComplexVector& x, int iterations,
                 TraceNorm norm) {
  require_iterations(iterations, "orbit");
  require_square_match(t, limit, "orbit");
  if (x.size() != t.rows()) throw DimensionError("orbit: start vector length mismatch");
  OrbitTrace out{{}, norm};
  out.values.reserve(static_cast<std::size_t>(iterations) + 1);
  const ComplexVector target = limit * x;
  ComplexVector current = x;
  for (int n = 0; n <= iterations; ++n) {
    out.values.push_back(measure(ComplexVector(current - target), norm));
    current = t * current;
  }
  return out;
}

OrbitTrace power_norm_gap(const ComplexMatrix& t, const ComplexMatrix& limit, int iterations, TraceNorm norm) {
  require_iterations(iterations, "power_norm_gap");
  require_square_match(t, limit, "power_norm_gap");
  OrbitTrace out{{}, norm};
  out.values.reserve(static_cast<std::size_t>(iterations) + 1);
  ComplexMatrix power = ComplexMatrix::Identity(t.rows(), t.cols());
  for (int n = 0; n <= iterations; ++n) {
    out.values.push_back(measure(ComplexMatrix(power - limit), norm));
    power = t * power;
  }
  return out;
}

double power_bound(const ComplexMatrix& t, int iterations) {
  require_iterations(iterations, "power_bound");
  ComplexMatrix power = ComplexMatrix::Identity(t.rows(), t.cols());
  double best = 1.0;
  for (int n = 1; n <= iterations; ++n) {
    power = t * power;
    best = std::max(best, spectral_norm(power));
  }
  return best;
}

}  // namespace pdlab
