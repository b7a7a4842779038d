#pragma once

// Spectral geometry of an operator: spectrum location, resolvent growth near
// the unit circle, numerical ranges and the Stolz / Ritt / K-spectral checks
// built on them.

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdlab/linalg.hpp"
#include "pdlab/spaces.hpp"

namespace pdlab {

/// Least-squares line y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

struct SpectrumCheck {
  Spectrum spectrum;
  bool peripheral_ok;  // every eigenvalue has |z| <= 1 - tol or |z - 1| <= tol
};
SpectrumCheck spectrum_check(const ComplexMatrix& t, double tol = 1e-8);

/// Geometric grid of `count` positive angles from lo to hi.
std::vector<double> geometric_theta_grid(int count = 200, double lo = 1e-4, double hi = std::numbers::pi);

struct ResolventPoint {
  double theta;
  double norm;  // ||R(e^{i theta}, T)||_2
};

struct ResolventProfile {
  std::vector<ResolventPoint> points;  // sorted by theta, both signs
  std::vector<double> skipped;         // angles where e^{i theta} sat on the spectrum
  double window = 0.1;
  /// Fit of log ||R|| = log c + alpha * (-log |theta|) over |theta| <= window.
  double alpha = 0.0;
  double constant = 0.0;
  double r_squared = 0.0;
};

/// Samples ||R(e^{i theta}, T)|| at +-theta for every theta in `thetas`
/// (positive angles in (0, pi]). Requires spectrum_check(T).peripheral_ok.
ResolventProfile resolvent_profile(const ComplexMatrix& t, std::span<const double> thetas, double window = 0.1);

enum class RangeMethod { rotation_boundary, duality_sampling };
const char* to_string(RangeMethod method);

struct NumericalRangeSample {
  std::vector<Complex> points;
  RangeMethod method;
  std::vector<Complex> hull;  // convex hull of points, counter-clockwise
  /// Rotation method only: the supporting angle and maximizing unit vector
  /// behind each point.
  std::vector<double> angles;
  std::vector<ComplexVector> vectors;
};

/// Rotation algorithm: for psi_j = 2 pi j / m take the top eigenvector x_j
/// of the Hermitian part of e^{i psi_j} T and record <T x_j, x_j>. The hull
/// is an inner approximation of the closed numerical range.
NumericalRangeSample numerical_range_hilbert(const ComplexMatrix& t, int angles = 720);

/// Points <T x, phi_x> for seeded random p-unit vectors x, phi_x from the
/// l^p duality map. Sampling only gives an inner set of W(T).
NumericalRangeSample numerical_range_lp(const ComplexMatrix& t, const LpSpace& space, int count, std::uint64_t seed);

struct StolzAlphaValue {
  double alpha;
  double c;  // min over the window of (1 - |z|) / |z - 1|^alpha
};

struct StolzFit {
  enum class Status { pass, fail, vacuous };
  Status status = Status::vacuous;
  double window = 0.5;
  double alpha = 1.0;  // smallest passing alpha, or the best one on failure
  double c = 0.0;
  Complex witness{};  // point attaining c at alpha
  int window_points = 0;
  std::vector<StolzAlphaValue> by_alpha;
};
const char* to_string(StolzFit::Status status);

/// 1, 1.25, ..., 8.
std::vector<double> default_alpha_grid();

/// Smallest alpha on the grid with 1 - |z| >= c |z - 1|^alpha, c >= c_min,
/// for every sample z with 0 < |z - 1| <= window. Points within 1e-10 of 1
/// are the point 1 itself and impose nothing.
StolzFit stolz_fit(std::span<const Complex> points, double window = 0.5,
                   std::span<const double> alpha_grid = {}, double c_min = 1e-3);

struct HullBoundRow {
  double theta;
  double resolvent;
  double distance;
  bool ok;
};

struct HullBoundReport {
  std::vector<HullBoundRow> rows;
  std::vector<double> skipped;  // angles with hull distance below 1e-12
  double slack = 0.0;
  double worst_ratio = 0.0;     // max of ||R|| * dist
  bool passed = true;
};

/// Checks ||R(e^{i theta}, T)|| <= (1 + slack) / dist(e^{i theta}, hull) at
/// every signed angle. Default slack is 1e-6 + m^{-2} for an m-angle sample.
HullBoundReport hull_distance_bound_check(const ComplexMatrix& t, const NumericalRangeSample& sample,
                                          std::span<const double> thetas,
                                          std::optional<double> slack = std::nullopt);

struct RittDiagnostic {
  std::vector<double> values;  // n * ||T^n (I - T)||, n = 1..N
  double sup = 0.0;
  double head_max = 0.0;  // first quartile of n
  double tail_max = 0.0;  // last quartile of n
  bool consistent = false;  // tail_max <= 1.05 * head_max
};
RittDiagnostic ritt_diagnostic(const ComplexMatrix& t, int iterations);

struct ZnBeta {
  std::vector<double> s;  // s_n = max over the sample of |z^n (1 - z)|, n = 1..N
  std::optional<double> beta;  // from log-log fit over n in [N/2, N]
  double r_squared = 0.0;
  std::optional<double> implied_alpha;  // 1 / beta
};
ZnBeta zn_beta(std::span<const Complex> omega, int iterations);

struct KSpectralReport {
  static constexpr double kConstant = 1.0 + std::numbers::sqrt2;
  std::vector<double> lhs;  // ||T^n (I - T)||_2
  std::vector<double> s;    // s_n over the hull boundary
  double worst_margin = 0.0;  // max of lhs - K s_n
  bool passed = true;
};
/// ||T^n (I - T)|| <= (1 + sqrt 2) s_n + 1e-8 for n = 1..N, s_n evaluated
/// on the boundary of the sample hull.
KSpectralReport k_spectral_check(const ComplexMatrix& t, const NumericalRangeSample& sample, int iterations);

}  // namespace pdlab
