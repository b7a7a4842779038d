#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdlab/linalg.hpp"
#include "pdlab/projections.hpp"

namespace pdlab {

/// One summand of a convex combination. `factors` is written left to right
/// as a matrix product, so {"P2", "P1"} means P2 * P1 (P1 acts first).
struct ProductTerm {
  double weight;
  std::vector<std::string> factors;
};

/// Symbolic operator: a table of named factor matrices and a convex
/// combination of ordered products of them, plus the materialized matrix.
class OperatorSpec {
 public:
  /// Throws InvalidArgument for negative weights, weights not summing to 1
  /// within 1e-12, unknown factor names or empty products; DimensionError for
  /// mismatched factor sizes.
  OperatorSpec(std::map<std::string, ComplexMatrix> factors, std::vector<ProductTerm> terms);

  const ComplexMatrix& matrix() const { return matrix_; }
  const std::map<std::string, ComplexMatrix>& factors() const { return factors_; }
  const std::vector<ProductTerm>& terms() const { return terms_; }
  Index dim() const { return matrix_.rows(); }

  /// Human-readable expression, e.g. "0.5*T12*T21 + 0.5*T21*T12".
  std::string expression() const;
  /// Whether every named factor appears in at least one product with
  /// positive weight.
  bool uses_every_factor() const;

 private:
  std::map<std::string, ComplexMatrix> factors_;
  std::vector<ProductTerm> terms_;
  ComplexMatrix matrix_;
};

/// T = P_N ... P_1 for projections listed P_1 first (named "P1".."PN").
OperatorSpec map_operator(std::span<const ProjectionOp> projections);

/// T_{kl} = P_k P_l + (I - P_k)(I - P_l), as a single named factor.
ComplexMatrix dr_matrix(const ComplexMatrix& pk, const ComplexMatrix& pl);

/// Douglas-Rachford operator T = P2 P1 + (I - P2)(I - P1), factor "T21".
OperatorSpec dr_operator(const ProjectionOp& p1, const ProjectionOp& p2);

/// T_{kl} with factor name "T<k><l>" (1-based labels supplied by caller).
OperatorSpec dr_generalized(const ProjectionOp& pk, const ProjectionOp& pl, int k = 1, int l = 2);

/// Convex combination of products of already-built operators; the factor
/// table of the result maps each name to that operator's matrix.
OperatorSpec convex_combination(const std::map<std::string, OperatorSpec>& table, std::vector<ProductTerm> terms);

/// Which norm an orbit/gap trace was measured in.
struct TraceNorm {
  std::optional<double> p;  // nullopt: spectral 2-norm; otherwise l^p estimate (lower bound)
  std::string label() const;
};

struct OrbitTrace {
  std::vector<double> values;  // index n = 0..N
  TraceNorm norm;
};

/// ||T^n x - P_T x|| for n = 0..N by repeated matrix-vector products.
/// `limit` is P_T (pass a zero matrix when Fix T = {0}).
OrbitTrace orbit(const ComplexMatrix& t, const ComplexMatrix& limit, const ComplexVector& x, int iterations,
                 TraceNorm norm = {});

/// ||T^n - P_T|| for n = 0..N, with T^n = T * T^{n-1} kept for every n.
OrbitTrace power_norm_gap(const ComplexMatrix& t, const ComplexMatrix& limit, int iterations, TraceNorm norm = {});

/// max_{0 <= n <= N} ||T^n||_2.
double power_bound(const ComplexMatrix& t, int iterations);

}  // namespace pdlab
