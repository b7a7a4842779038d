#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pdlab/linalg.hpp"

namespace pdlab {

/// A subspace of C^n stored as an orthonormal basis. The zero subspace is a
/// regular value with an n x 0 basis.
class Subspace {
 public:
  static Subspace zero(Index ambient_dim);
  static Subspace full(Index ambient_dim);
  /// Span of the columns of `vectors`, orthonormalized.
  static Subspace span(const ComplexMatrix& vectors, std::optional<double> tol = std::nullopt);
  /// Takes ownership of an already orthonormal basis (checked to 1e-10).
  static Subspace from_orthonormal(ComplexMatrix basis);

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return basis_.cols() == 0; }
  const ComplexMatrix& basis() const { return basis_; }

  /// ||x - P_S x|| for the orthogonal projection onto this subspace.
  double distance(const ComplexVector& x) const;

 private:
  explicit Subspace(ComplexMatrix basis) : basis_(std::move(basis)) {}
  ComplexMatrix basis_;
};

/// Finite-dimensional l^p with its uniform convexity / smoothness exponents.
class LpSpace {
 public:
  LpSpace(Index dim, double p);

  Index dim() const { return dim_; }
  double p() const { return p_; }
  /// Hoelder conjugate p / (p - 1).
  double dual_exponent() const { return p_ / (p_ - 1.0); }
  /// q = max(2, p): l^p is q-uniformly convex.
  double convexity_exponent() const { return std::max(2.0, p_); }
  /// min(2, p): l^p is uniformly smooth of this power type.
  double smoothness_exponent() const { return std::min(2.0, p_); }
  bool is_hilbert() const { return p_ == 2.0; }

 private:
  Index dim_;
  double p_;
};

Subspace complement(const Subspace& s);

/// Span of the principal vectors whose cosine is at least 1 - tol.
Subspace intersect(const Subspace& a, const Subspace& b, double tol = 1e-8);
/// Left fold of pairwise intersection.
Subspace intersect_all(std::span<const Subspace> spaces, double tol = 1e-8);

/// Orthonormal basis of a + b; for the orthogonal pieces of a direct sum
/// this is simply their concatenation.
Subspace subspace_sum(const Subspace& a, const Subspace& b);

/// Cosines of the principal angles, non-increasing, clamped to [0, 1].
/// Throws InvalidArgument if either subspace is zero.
std::vector<double> principal_angles(const Subspace& a, const Subspace& b);

/// Cosine of the minimal angle between a and b after removing a ∩ b from
/// both (intersection computed at `tol`). Zero when either deflated space is.
double friedrichs_number(const Subspace& a, const Subspace& b, double tol = 1e-8);

/// Column space and null space of a matrix at singular-value threshold `tol`
/// (absolute). Default threshold is default_rank_tolerance.
Subspace column_space(const ComplexMatrix& a, std::optional<double> tol = std::nullopt);
Subspace null_space(const ComplexMatrix& a, std::optional<double> tol = std::nullopt);

/// Bilinear pairing <x, phi> = sum_i x_i phi_i between a vector and a
/// functional written in coordinates.
Complex pairing(const ComplexVector& x, const ComplexVector& phi);

/// The duality map of l^p: phi_i = ||x||^{2-p} |x_i|^{p-2} conj(x_i), so that
/// <x, phi> = ||x||_p^2 and ||phi||_{p'} = ||x||_p.
ComplexVector duality_map(const LpSpace& space, const ComplexVector& x);

}  // namespace pdlab
