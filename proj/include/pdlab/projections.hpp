#pragma once

#include <optional>
#include <vector>

#include "pdlab/linalg.hpp"
#include "pdlab/spaces.hpp"

namespace pdlab {

enum class ProjectionKind { hilbert_orthogonal, oblique, lp_conditional_expectation };

const char* to_string(ProjectionKind kind);

/// An idempotent matrix together with how it was built.
class ProjectionOp {
 public:
  /// Validates idempotency (||P^2 - P|| <= 1e-10 max(1, ||P||^2)) and, for
  /// hilbert_orthogonal, Hermitian symmetry and ||P|| <= 1 + 1e-10.
  ProjectionOp(ComplexMatrix matrix, ProjectionKind kind, double condition_number = 1.0);

  const ComplexMatrix& matrix() const { return matrix_; }
  ProjectionKind kind() const { return kind_; }
  Index dim() const { return matrix_.rows(); }
  Index range_dim() const { return range_dim_; }
  bool is_zero() const { return range_dim_ == 0; }
  /// Condition number of the stacked [range | kernel] basis for oblique
  /// projections; 1 otherwise.
  double condition_number() const { return condition_number_; }

 private:
  ComplexMatrix matrix_;
  ProjectionKind kind_;
  Index range_dim_;
  double condition_number_;
};

ProjectionOp orth_projection(const Subspace& s);

/// Projection onto `range` along `kernel`. Throws NonComplementaryError when
/// the two do not form a direct sum of the whole space.
ProjectionOp oblique_projection(const Subspace& range, const Subspace& kernel);

struct TypeDRadius {
  double r;  // in (0, 1)
  double g;  // ||P - rI|| - (1 - r) at r
};

/// Minimizes g(r) = ||A - rI||_2 - (1 - r) over (0, 1) by ternary search (g
/// is convex). Returns the minimizer when min g <= tol; r = 1/2 is preferred
/// whenever it already qualifies. Works for any square matrix, which is how
/// products and convex combinations are tested for membership in the class.
std::optional<TypeDRadius> type_d_radius(const ComplexMatrix& a, double tol = 1e-8);
/// Projection overload; throws InvalidArgument for P = 0.
std::optional<TypeDRadius> type_d_radius(const ProjectionOp& p, double tol = 1e-8);

/// ||P - I/2||_2 <= 1/2 + tol.
bool is_type_u(const ProjectionOp& p, double tol = 1e-8);
bool is_type_u(const ComplexMatrix& p, double tol = 1e-8);

/// Disjoint-support conditional expectation on l^p:
///   P x = sum_b <x, phi_{u_b}> u_b,
/// with u_b a p-unit vector supported on block b and phi its duality
/// functional. These are norm-one projections in every l^p.
struct LpPartitionProjection {
  LpSpace space;
  std::vector<std::vector<Index>> blocks;
  std::vector<ComplexVector> unit_vectors;  // full length, supported on the block
  ProjectionOp op;
  double certified_norm;    // ||P||_{p->p} from the certification run
  NormMode certified_with;  // exact_small when the oracle applies, else estimate
};

/// Builds and certifies (norm <= 1 + 1e-6) an l^p partition projection.
/// Throws InvalidArgument for overlapping blocks, out-of-range indices,
/// non-unit vectors or vectors leaking outside their block, and
/// VerificationError if certification fails.
LpPartitionProjection lp_partition_projection(const LpSpace& space, std::vector<std::vector<Index>> blocks,
                                              std::vector<ComplexVector> unit_vectors);

}  // namespace pdlab
