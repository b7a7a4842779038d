#pragma once

// Runnable experiments for the asymptotics of projection methods: the
// Fix/Range splitting of an operator, the exponential-rate report, the
// Douglas-Rachford fixed space and sharp rate, the Halperin-type inequality,
// certified slow instances and superpolynomially fast vectors.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdlab/linalg.hpp"
#include "pdlab/operators.hpp"
#include "pdlab/projections.hpp"
#include "pdlab/spaces.hpp"

namespace pdlab {

/// X = Fix T (+) Z with Z = Ran(I - T) and P_T the projection onto Fix T
/// along Z.
struct SplitDecomposition {
  Subspace fix;
  Subspace range;  // Z
  ProjectionOp limit;  // P_T
  double restriction_spectral_radius;  // r(T|_Z)
};

/// Null space and column space of I - T at singular-value threshold `tol`.
/// Throws InvalidArgument if the spectrum meets the circle away from 1 and
/// NonComplementaryError when Fix T and Z overlap (defective eigenvalue 1).
SplitDecomposition fix_split(const ComplexMatrix& t, double tol = 1e-9);

struct DichotomyReport {
  std::string regime = "exponential";  // finite dimension: Ran(I - T) is closed
  double rate = 0.0;                   // r in ||T^n - P_T|| <= C r^n
  double constant = 0.0;               // C
  double restriction_spectral_radius = 0.0;
  OrbitTrace gap;                      // ||T^n - P_T||, n = 0..N
  int fit_begin = 0;
  int fit_end = 0;
  bool envelope_ok = false;  // gap_n <= C r^n + 1e-12 for every n
  bool rate_matches = false;  // |r - r(T|_Z)| <= 0.05
};

/// Fits (C, r): r from the log-slope over the second half of the range where
/// the gap is above 1e-12, C = max gap_n / r^n over that range. An l^p
/// `norm` measures the gap with the p-norm estimator.
DichotomyReport dichotomy_report(const ComplexMatrix& t, int iterations = 1000, double tol = 1e-9,
                                 TraceNorm norm = {});

struct DrFixedSpace {
  Subspace space;       // (M1 ∩ M2) (+) (M1^perp ∩ M2^perp)
  Index kernel_dim;     // dim ker(I - T)
  double worst_cosine;  // smallest principal cosine between the two
};

/// Builds the Douglas-Rachford fixed space from the subspaces and checks it
/// against ker(I - T). Throws VerificationError with a diff on mismatch.
DrFixedSpace dr_fixed_space(const Subspace& m1, const Subspace& m2, double tol = 1e-8);

struct DrRateReport {
  double friedrichs = 0.0;
  std::vector<double> gaps;    // ||T^n - P||_2, n = 0..N
  std::vector<double> bounds;  // c^n (0^0 = 1)
  double max_violation = 0.0;  // max of gap_n - c^n
  std::optional<int> first_failure;
  bool passed = true;
};

/// ||T^n - P|| <= c(M1, M2)^n + slack for n = 0..N, P the orthogonal
/// projection onto the Douglas-Rachford fixed space.
DrRateReport dr_rate_check(const Subspace& m1, const Subspace& m2, int iterations, double slack = 1e-10);

struct HalperinReport {
  double exponent = 0.0;   // 1 / q^N
  double c_hat = 0.0;      // max ratio over all 2 * samples vectors
  double c_hat_half = 0.0; // max ratio over the first `samples`
  bool stable = true;      // relative change below 20%
  int evaluated = 0;
  int skipped = 0;         // 1 - ||Tx|| <= 1e-14
  ComplexVector witness;
};

/// max ||x - Tx|| / (1 - ||Tx||)^{1/q^N} over seeded unit vectors, with
/// T = P_N ... P_1 (projections listed P_1 first), q = 2 in Hilbert mode
/// (`p` empty) or max(2, p) on l^p. Throws InvalidArgument if a factor is
/// not a contraction.
HalperinReport halperin_inequality_check(std::span<const ComplexMatrix> projections, std::optional<double> p,
                                         int samples, std::uint64_t seed);

struct SlowInstance {
  std::vector<double> rates;   // r_0..r_N
  std::vector<double> angles;  // block angles theta_0..theta_N
  Subspace m1;
  Subspace m2;
  ComplexMatrix t;             // P2 P1
  ComplexVector x;
  std::vector<double> orbit_norms;  // ||T^n x||, n = 0..N
  ComplexVector functional;         // unit dual vector phi
  std::vector<double> weak_values;  // Re <T^n x, phi>
  double kappa = 0.0;  // largest kappa in (0, 1] with Re <T^n x, phi> >= kappa r_n; 0 if none
  Index dimension() const { return t.rows(); }
};

/// Planar-block construction: block n holds two lines at angle theta_n with
/// cos theta_n = r_n^{1/(2n+1)}; x sums the M1-line unit vectors. The
/// certificate ||T^n x|| >= r_n is verified by iteration before returning.
SlowInstance slow_instance(std::span<const double> rates);

struct SuperpolyCurve {
  int k = 0;
  std::vector<double> residuals;  // ||T^n x_k - P_T x_k||, n = 0..N
  std::optional<double> slope;    // log-log slope over the window
};

struct SuperpolyReport {
  std::vector<SuperpolyCurve> curves;  // k = 1..k_max
  int window_begin = 10;
  int window_end = 0;
  int attempts = 1;
  bool slopes_ordered = true;  // slope_{k+1} <= slope_k + 0.1
};

/// Decay curves for x_k = (I - T)^k y, y seeded random, k = 1..k_max.
SuperpolyReport superpoly_vectors(const ComplexMatrix& t, const SplitDecomposition& split, int k_max, int iterations,
                                  std::uint64_t seed, int window_begin = 10, std::optional<int> window_end = std::nullopt);
SuperpolyReport superpoly_vectors(const ComplexMatrix& t, int k_max, int iterations, std::uint64_t seed,
                                  int window_begin = 10, std::optional<int> window_end = std::nullopt);

}  // namespace pdlab
