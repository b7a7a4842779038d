#include "pdlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "pdlab/error.hpp"

namespace pdlab {

namespace {

void require_same_ambient(const Subspace& a, const Subspace& b, const char* op) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DimensionError(std::string(op) + ": ambient dimensions differ (" + std::to_string(a.ambient_dim()) +
                         " vs " + std::to_string(b.ambient_dim()) + ")");
}

// Orthogonal complement of `inner` inside `outer`, where `inner` is (up to
// rounding) contained in `outer`.
Subspace deflate(const Subspace& outer, const Subspace& inner) {
  if (inner.is_zero() || outer.is_zero()) return outer;
  const ComplexMatrix coords = outer.basis().adjoint() * inner.basis();
  const Index r = outer.dim();
  const Index m = std::min(inner.dim(), r);
  Eigen::JacobiSVD<ComplexMatrix> s(coords, Eigen::ComputeFullU);
  const ComplexMatrix rest = s.matrixU().rightCols(r - m);
  return Subspace::from_orthonormal(outer.basis() * rest);
}

}  // namespace

Subspace Subspace::zero(Index ambient_dim) {
  if (ambient_dim < 1) throw DimensionError("Subspace: ambient dimension must be positive");
  return Subspace(ComplexMatrix(ambient_dim, 0));
}

Subspace Subspace::full(Index ambient_dim) {
  if (ambient_dim < 1) throw DimensionError("Subspace: ambient dimension must be positive");
  return Subspace(ComplexMatrix::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::span(const ComplexMatrix& vectors, std::optional<double> tol) {
  if (vectors.rows() < 1) throw DimensionError("Subspace: ambient dimension must be positive");
  return Subspace(qr_orthonormalize(vectors, tol));
}

Subspace Subspace::from_orthonormal(ComplexMatrix basis) {
  if (basis.rows() < 1) throw DimensionError("Subspace: ambient dimension must be positive");
  if (basis.cols() > basis.rows()) throw DimensionError("Subspace: more basis vectors than the ambient dimension");
  require_finite(basis, "Subspace");
  if (basis.cols() > 0) {
    const double err =
        (basis.adjoint() * basis - ComplexMatrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw InvalidArgument("Subspace: basis is not orthonormal (Gram error " + std::to_string(err) + ")");
  }
  return Subspace(std::move(basis));
}

double Subspace::distance(const ComplexVector& x) const {
  if (x.size() != ambient_dim()) throw DimensionError("Subspace::distance: vector length mismatch");
  if (is_zero()) return x.norm();
  return (x - basis_ * (basis_.adjoint() * x)).norm();
}

LpSpace::LpSpace(Index dim, double p) : dim_(dim), p_(p) {
  if (dim < 1) throw DimensionError("LpSpace: dimension must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("LpSpace: p must lie in (1, inf), got " + std::to_string(p));
}

Subspace complement(const Subspace& s) {
  const Index d = s.ambient_dim();
  if (s.is_zero()) return Subspace::full(d);
  if (s.dim() == d) return Subspace::zero(d);
  Eigen::HouseholderQR<ComplexMatrix> qr(s.basis());
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  return Subspace::from_orthonormal(q.rightCols(d - s.dim()));
}

Subspace intersect(const Subspace& a, const Subspace& b, double tol) {
  require_same_ambient(a, b, "intersect");
  if (tol < 0.0) throw InvalidArgument("intersect: tolerance must be nonnegative");
  if (a.is_zero() || b.is_zero()) return Subspace::zero(a.ambient_dim());
  const ComplexMatrix cross = a.basis().adjoint() * b.basis();
  Eigen::JacobiSVD<ComplexMatrix> s(cross, Eigen::ComputeThinU);
  Index count = 0;
  while (count < s.singularValues().size() && s.singularValues()(count) >= 1.0 - tol) ++count;
  if (count == 0) return Subspace::zero(a.ambient_dim());
  // Principal vectors of `a`; the product is orthonormal, re-orthonormalize
  // only to shave rounding.
  return Subspace::span(a.basis() * s.matrixU().leftCols(count));
}

Subspace intersect_all(std::span<const Subspace> spaces, double tol) {
  if (spaces.empty()) throw InvalidArgument("intersect_all: no subspaces given");
  Subspace acc = spaces.front();
  for (std::size_t k = 1; k < spaces.size(); ++k) acc = intersect(acc, spaces[k], tol);
  return acc;
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b, "subspace_sum");
  ComplexMatrix stacked(a.ambient_dim(), a.dim() + b.dim());
  stacked << a.basis(), b.basis();
  return Subspace::span(stacked, 1e-10);
}

std::vector<double> principal_angles(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b, "principal_angles");
  if (a.is_zero() || b.is_zero()) throw InvalidArgument("principal_angles: zero subspace");
  const ComplexMatrix cross = a.basis().adjoint() * b.basis();
  Eigen::JacobiSVD<ComplexMatrix> s(cross);
  std::vector<double> out(static_cast<std::size_t>(s.singularValues().size()));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::clamp(s.singularValues()(static_cast<Index>(i)), 0.0, 1.0);
  return out;
}

double friedrichs_number(const Subspace& a, const Subspace& b, double tol) {
  require_same_ambient(a, b, "friedrichs_number");
  const Subspace common = intersect(a, b, tol);
  const Subspace a_rest = deflate(a, common);
  const Subspace b_rest = deflate(b, common);
  if (a_rest.is_zero() || b_rest.is_zero()) return 0.0;
  return principal_angles(a_rest, b_rest).front();
}

Subspace column_space(const ComplexMatrix& a, std::optional<double> tol) {
  if (a.rows() < 1) throw DimensionError("column_space: empty matrix");
  if (a.cols() == 0) return Subspace::zero(a.rows());
  const SvdResult s = svd(a);
  const double threshold = tol.value_or(default_rank_tolerance(a));
  Index rank = 0;
  while (rank < s.singular_values.size() && s.singular_values(rank) > threshold) ++rank;
  return Subspace::from_orthonormal(s.u.leftCols(rank));
}

Subspace null_space(const ComplexMatrix& a, std::optional<double> tol) {
  if (a.cols() < 1) throw DimensionError("null_space: matrix has no columns");
  require_finite(a, "null_space");
  const double threshold = tol.value_or(default_rank_tolerance(a));
  ComplexMatrix v;
  RealVector sigma;
  if (std::min(a.rows(), a.cols()) <= 48) {
    Eigen::JacobiSVD<ComplexMatrix> s(a, Eigen::ComputeFullV);
    v = s.matrixV();
    sigma = s.singularValues();
  } else {
    Eigen::BDCSVD<ComplexMatrix> s(a, Eigen::ComputeFullV);
    v = s.matrixV();
    sigma = s.singularValues();
  }
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > threshold) ++rank;
  return Subspace::from_orthonormal(v.rightCols(a.cols() - rank));
}

Complex pairing(const ComplexVector& x, const ComplexVector& phi) {
  if (x.size() != phi.size()) throw DimensionError("pairing: length mismatch");
  return (x.array() * phi.array()).sum();
}

ComplexVector duality_map(const LpSpace& space, const ComplexVector& x) {
  if (x.size() != space.dim())
    throw DimensionError("duality_map: vector length " + std::to_string(x.size()) + " but space dimension " +
                         std::to_string(space.dim()));
  const double p = space.p();
  const double norm = lp_norm(x, p);
  if (norm == 0.0) throw InvalidArgument("duality_map: zero vector");
  ComplexVector phi = ComplexVector::Zero(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x(i));
    if (mag == 0.0) continue;
    // ||x||^{2-p} |x_i|^{p-2} conj(x_i), written with ratios to avoid overflow.
    phi(i) = norm * std::pow(mag / norm, p - 1.0) * std::conj(x(i) / mag);
  }
  return phi;
}

}  // namespace pdlab
