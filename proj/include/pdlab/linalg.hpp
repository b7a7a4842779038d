#pragma once

// Dense complex linear algebra kernel. Everything else in pdlab is built on
// these primitives; they are pure functions of their inputs.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pdlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'0f'9a11'5ULL;

struct SvdResult {
  ComplexMatrix u;             // column-orthonormal, rows x r
  RealVector singular_values;  // non-increasing
  ComplexMatrix v;             // column-orthonormal, cols x r
};

struct Spectrum {
  std::vector<Complex> eigenvalues;  // with algebraic multiplicity

  double spectral_radius() const;
  /// Eigenvalues ordered by (real, imag); handy for multiset comparisons.
  std::vector<Complex> sorted() const;
};

struct ExtremeEigenpair {
  double value;
  ComplexVector vector;  // unit 2-norm
};

enum class NormMode { exact_small, estimate };

/// Throws NonFiniteError naming `what` if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& a, std::string_view what);

/// Orthonormal basis (Gram-Schmidt order) for the span of the columns of
/// `vectors`. Columns whose residual falls below tol * (largest column norm)
/// are dropped; default tol is 1e-12 * rows. A rows x 0 input gives rows x 0.
ComplexMatrix qr_orthonormalize(const ComplexMatrix& vectors,
                                std::optional<double> tol = std::nullopt);
ComplexMatrix qr_orthonormalize(Index dim, std::span<const ComplexVector> vectors,
                                std::optional<double> tol = std::nullopt);

/// Thin SVD, singular values non-increasing.
SvdResult svd(const ComplexMatrix& a);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

/// Default numerical-rank threshold: eps * max(rows, cols) * sigma_max.
double default_rank_tolerance(const ComplexMatrix& a);

/// Eigenvalues of a general square matrix (Hessenberg reduction followed by
/// shifted QR). Throws ConvergenceError if the iteration does not converge.
Spectrum eigenvalues(const ComplexMatrix& a);

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
ExtremeEigenpair hermitian_extreme_eig(const ComplexMatrix& h);

/// Solves A X = B. Throws SingularMatrixError (carrying the smallest pivot)
/// when A is singular to working precision, and VerificationError if the
/// relative residual ||AX - B|| / (||A|| ||X||) cannot be brought below 1e-10.
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b);

double lp_norm(const ComplexVector& x, double p);

/// ||A||_{p->p}. `estimate` runs dual-vector norm ascent from the coordinate
/// vectors plus 16 seeded random starts and returns the best value, which is
/// a lower bound. `exact_small` runs a dense sphere search with local
/// refinement and is only available when the real dimension of the search
/// sphere (cols for real A, 2*cols for complex A) is at most 4.
/// For p == 2 both modes return sigma_max.
double operator_pnorm(const ComplexMatrix& a, double p, NormMode mode = NormMode::estimate,
                      std::uint64_t seed = kDefaultSeed);

/// Whether every imaginary part is exactly zero.
bool is_real(const ComplexMatrix& a);

}  // namespace pdlab
