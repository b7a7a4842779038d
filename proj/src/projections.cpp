#include "pdlab/projections.hpp"

#include <cmath>
#include <set>
#include <string>

#include "pdlab/error.hpp"

namespace pdlab {

namespace {

double shifted_gap(const ComplexMatrix& a, double r) {
  const ComplexMatrix shifted = a - r * ComplexMatrix::Identity(a.rows(), a.cols());
  return spectral_norm(shifted) - (1.0 - r);
}

}  // namespace

const char* to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::hilbert_orthogonal: return "hilbert-orthogonal";
    case ProjectionKind::oblique: return "oblique";
    case ProjectionKind::lp_conditional_expectation: return "lp-conditional-expectation";
  }
  return "unknown";
}

ProjectionOp::ProjectionOp(ComplexMatrix matrix, ProjectionKind kind, double condition_number)
    : matrix_(std::move(matrix)), kind_(kind), range_dim_(0), condition_number_(condition_number) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw DimensionError("ProjectionOp: matrix must be square and nonempty");
  require_finite(matrix_, "ProjectionOp");
  const double norm = spectral_norm(matrix_);
  const double idem = spectral_norm(matrix_ * matrix_ - matrix_);
  if (idem > 1e-10 * std::max(1.0, norm * norm))
    throw InvalidArgument("ProjectionOp: matrix is not idempotent (||P^2 - P|| = " + std::to_string(idem) + ")");
  if (kind_ == ProjectionKind::hilbert_orthogonal) {
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw InvalidArgument("ProjectionOp: orthogonal projection is not Hermitian");
    if (norm > 1.0 + 1e-10) throw InvalidArgument("ProjectionOp: orthogonal projection has norm above 1");
  }
  // rank of an idempotent equals its trace
  range_dim_ = static_cast<Index>(std::llround(matrix_.trace().real()));
}

ProjectionOp orth_projection(const Subspace& s) {
  const ComplexMatrix& b = s.basis();
  ComplexMatrix p = b * b.adjoint();
  p = 0.5 * (p + p.adjoint());
  if (s.is_zero()) p = ComplexMatrix::Zero(s.ambient_dim(), s.ambient_dim());
  return ProjectionOp(std::move(p), ProjectionKind::hilbert_orthogonal);
}

ProjectionOp oblique_projection(const Subspace& range, const Subspace& kernel) {
  const Index d = range.ambient_dim();
  if (kernel.ambient_dim() != d) throw DimensionError("oblique_projection: ambient dimensions differ");
  if (range.dim() + kernel.dim() != d)
    throw NonComplementaryError("oblique_projection: dim(range) + dim(kernel) = " +
                                    std::to_string(range.dim() + kernel.dim()) + " != " + std::to_string(d),
                                0.0);
  if (range.is_zero()) return ProjectionOp(ComplexMatrix::Zero(d, d), ProjectionKind::oblique);
  if (kernel.is_zero()) return ProjectionOp(ComplexMatrix::Identity(d, d), ProjectionKind::oblique);

  ComplexMatrix stacked(d, d);
  stacked << range.basis(), kernel.basis();
  const SvdResult s = svd(stacked);
  const double smax = s.singular_values(0);
  const double smin = s.singular_values(d - 1);
  if (smin <= 1e-10 * smax)
    throw NonComplementaryError("oblique_projection: range and kernel are not complementary (smallest singular value " +
                                    std::to_string(smin) + ")",
                                smin);
  // P = S diag(I_r, 0) S^{-1}: keep the first r rows of S^{-1}.
  const ComplexMatrix inv = solve_linear(stacked, ComplexMatrix::Identity(d, d));
  ComplexMatrix p = range.basis() * inv.topRows(range.dim());
  return ProjectionOp(std::move(p), ProjectionKind::oblique, smax / smin);
}

std::optional<TypeDRadius> type_d_radius(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError("type_d_radius: matrix must be square");
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (shifted_gap(a, m1) <= shifted_gap(a, m2))
      hi = m2;
    else
      lo = m1;
  }
  const double r_min = 0.5 * (lo + hi);
  const double g_min = shifted_gap(a, r_min);
  const double g_half = shifted_gap(a, 0.5);
  if (g_half <= tol) return TypeDRadius{0.5, g_half};
  if (g_min <= tol && r_min > 0.0 && r_min < 1.0) return TypeDRadius{r_min, g_min};
  return std::nullopt;
}

std::optional<TypeDRadius> type_d_radius(const ProjectionOp& p, double tol) {
  if (p.is_zero()) throw InvalidArgument("type_d_radius: zero projection");
  return type_d_radius(p.matrix(), tol);
}

bool is_type_u(const ComplexMatrix& p, double tol) {
  if (p.rows() != p.cols()) throw DimensionError("is_type_u: matrix must be square");
  return spectral_norm(p - 0.5 * ComplexMatrix::Identity(p.rows(), p.cols())) <= 0.5 + tol;
}

bool is_type_u(const ProjectionOp& p, double tol) { return is_type_u(p.matrix(), tol); }

LpPartitionProjection lp_partition_projection(const LpSpace& space, std::vector<std::vector<Index>> blocks,
                                              std::vector<ComplexVector> unit_vectors) {
  const Index d = space.dim();
  if (blocks.size() != unit_vectors.size())
    throw InvalidArgument("lp_partition_projection: " + std::to_string(blocks.size()) + " blocks but " +
                          std::to_string(unit_vectors.size()) + " unit vectors");
  std::set<Index> seen;
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    const ComplexVector& u = unit_vectors[b];
    if (block.empty()) throw InvalidArgument("lp_partition_projection: block " + std::to_string(b) + " is empty");
    if (u.size() != d) throw DimensionError("lp_partition_projection: unit vector " + std::to_string(b) + " has wrong length");
    std::set<Index> members;
    for (Index i : block) {
      if (i < 0 || i >= d) throw InvalidArgument("lp_partition_projection: index " + std::to_string(i) + " out of range");
      if (!seen.insert(i).second)
        throw InvalidArgument("lp_partition_projection: blocks overlap at index " + std::to_string(i));
      members.insert(i);
    }
    for (Index i = 0; i < d; ++i)
      if (!members.count(i) && u(i) != Complex(0.0, 0.0))
        throw InvalidArgument("lp_partition_projection: unit vector " + std::to_string(b) + " leaks outside its block");
    const double nu = lp_norm(u, space.p());
    if (std::abs(nu - 1.0) > 1e-10)
      throw InvalidArgument("lp_partition_projection: vector " + std::to_string(b) + " has p-norm " + std::to_string(nu));
    const ComplexVector phi = duality_map(space, u);
    p += u * phi.transpose();
  }

  ProjectionOp op(p, ProjectionKind::lp_conditional_expectation);
  const Index search_dim = is_real(p) ? d : 2 * d;
  const NormMode mode = search_dim <= 4 ? NormMode::exact_small : NormMode::estimate;
  const double norm = operator_pnorm(p, space.p(), mode);
  if (norm > 1.0 + 1e-6)
    throw VerificationError("lp_partition_projection: certified p-norm " + std::to_string(norm) + " exceeds 1");
  return {space, std::move(blocks), std::move(unit_vectors), std::move(op), norm, mode};
}

}  // namespace pdlab
