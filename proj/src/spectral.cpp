#include "pdlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdlab/error.hpp"
#include "pdlab/hull.hpp"
#include "pdlab/random.hpp"

namespace pdlab {

namespace {

void require_square(const ComplexMatrix& t, const char* op) {
  if (t.rows() != t.cols() || t.rows() == 0) throw DimensionError(std::string(op) + ": operator must be square");
}

NumericalRangeSample finish_sample(std::vector<Complex> points, RangeMethod method) {
  NumericalRangeSample out;
  out.hull = convex_hull(points);
  out.points = std::move(points);
  out.method = method;
  return out;
}

double resolvent_norm(const ComplexMatrix& t, Complex z) {
  const Index d = t.rows();
  const ComplexMatrix shifted = z * ComplexMatrix::Identity(d, d) - t;
  return spectral_norm(solve_linear(shifted, ComplexMatrix::Identity(d, d)));
}

double distance_to_spectrum(const Spectrum& spectrum, Complex z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ev : spectrum.eigenvalues) best = std::min(best, std::abs(z - ev));
  return best;
}

// s_n = max_k |z_k|^n |1 - z_k| for n = 1..N, evaluated in log space.
std::vector<double> power_sup(std::span<const Complex> omega, int iterations) {
  std::vector<std::pair<double, double>> lines;  // (log|z|, log|1-z|)
  lines.reserve(omega.size());
  for (const Complex& z : omega) {
    const double mag = std::abs(z);
    const double gap = std::abs(1.0 - z);
    if (mag == 0.0 || gap == 0.0) continue;
    lines.emplace_back(std::log(mag), std::log(gap));
  }
  std::vector<double> s(static_cast<std::size_t>(iterations), 0.0);
  if (lines.empty()) return s;
  for (int n = 1; n <= iterations; ++n) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : lines) best = std::max(best, n * a + b);
    s[static_cast<std::size_t>(n - 1)] = std::exp(best);
  }
  return s;
}

}  // namespace

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DimensionError("fit_line: length mismatch");
  LineFit fit;
  fit.points = static_cast<int>(xs.size());
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

SpectrumCheck spectrum_check(const ComplexMatrix& t, double tol) {
  require_square(t, "spectrum_check");
  SpectrumCheck out{eigenvalues(t), true};
  for (const auto& z : out.spectrum.eigenvalues)
    if (!(std::abs(z) <= 1.0 - tol || std::abs(z - 1.0) <= tol)) out.peripheral_ok = false;
  return out;
}

std::vector<double> geometric_theta_grid(int count, double lo, double hi) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidArgument("geometric_theta_grid: need count >= 2 and 0 < lo < hi");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
  grid.back() = hi;
  return grid;
}

ResolventProfile resolvent_profile(const ComplexMatrix& t, std::span<const double> thetas, double window) {
  require_square(t, "resolvent_profile");
  const SpectrumCheck check = spectrum_check(t);
  if (!check.peripheral_ok)
    throw InvalidArgument("resolvent_profile: spectrum meets the unit circle away from 1");
  ResolventProfile out;
  out.window = window;
  std::vector<double> signed_thetas;
  for (double th : thetas) {
    if (!(th > 0.0) || th > std::numbers::pi + 1e-12)
      throw InvalidArgument("resolvent_profile: angles must lie in (0, pi]");
    signed_thetas.push_back(th);
    signed_thetas.push_back(-th);
  }
  std::sort(signed_thetas.begin(), signed_thetas.end());
  for (double th : signed_thetas) {
    const Complex z = std::polar(1.0, th);
    if (distance_to_spectrum(check.spectrum, z) <= 1e-12) {
      out.skipped.push_back(th);
      continue;
    }
    try {
      out.points.push_back({th, resolvent_norm(t, z)});
    } catch (const SingularMatrixError&) {
      out.skipped.push_back(th);
    }
  }
  std::vector<double> xs, ys;
  for (const auto& pt : out.points) {
    if (std::abs(pt.theta) > window) continue;
    xs.push_back(-std::log(std::abs(pt.theta)));
    ys.push_back(std::log(pt.norm));
  }
  const LineFit fit = fit_line(xs, ys);
  out.alpha = fit.slope;
  out.constant = std::exp(fit.intercept);
  out.r_squared = fit.r_squared;
  return out;
}

const char* to_string(RangeMethod method) {
  return method == RangeMethod::rotation_boundary ? "rotation-boundary" : "duality-sampling";
}

NumericalRangeSample numerical_range_hilbert(const ComplexMatrix& t, int angles) {
  require_square(t, "numerical_range_hilbert");
  if (angles < 8) throw InvalidArgument("numerical_range_hilbert: need at least 8 angles");
  std::vector<Complex> points;
  std::vector<double> psis;
  std::vector<ComplexVector> vectors;
  const ComplexMatrix th = t.adjoint();
  for (int j = 0; j < angles; ++j) {
    const double psi = 2.0 * std::numbers::pi * j / angles;
    const Complex rot = std::polar(1.0, psi);
    const ComplexMatrix herm = 0.5 * (rot * t + std::conj(rot) * th);
    const ExtremeEigenpair top = hermitian_extreme_eig(herm);
    points.push_back(top.vector.dot(t * top.vector));
    psis.push_back(psi);
    vectors.push_back(top.vector);
  }
  NumericalRangeSample out = finish_sample(std::move(points), RangeMethod::rotation_boundary);
  out.angles = std::move(psis);
  out.vectors = std::move(vectors);
  return out;
}

NumericalRangeSample numerical_range_lp(const ComplexMatrix& t, const LpSpace& space, int count, std::uint64_t seed) {
  require_square(t, "numerical_range_lp");
  if (t.rows() != space.dim()) throw DimensionError("numerical_range_lp: operator and space dimensions differ");
  if (count < 100) throw InvalidArgument("numerical_range_lp: need at least 100 samples");
  Rng rng(seed);
  std::vector<Complex> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    ComplexVector x = rng.complex_gaussian(space.dim());
    x /= lp_norm(x, space.p());
    points.push_back(pairing(t * x, duality_map(space, x)));
  }
  return finish_sample(std::move(points), RangeMethod::duality_sampling);
}

const char* to_string(StolzFit::Status status) {
  switch (status) {
    case StolzFit::Status::pass: return "pass";
    case StolzFit::Status::fail: return "fail";
    case StolzFit::Status::vacuous: return "vacuous";
  }
  return "unknown";
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 28; ++k) grid.push_back(1.0 + 0.25 * k);
  return grid;
}

StolzFit stolz_fit(std::span<const Complex> points, double window, std::span<const double> alpha_grid, double c_min) {
  if (!(window > 0.0)) throw InvalidArgument("stolz_fit: window must be positive");
  const std::vector<double> default_grid = default_alpha_grid();
  if (alpha_grid.empty()) alpha_grid = default_grid;
  for (const Complex& z : points)
    if (std::abs(z) > 1.0 + 1e-8) throw InvalidArgument("stolz_fit: sample point outside the closed unit disk");

  std::vector<Complex> near;
  for (const Complex& z : points) {
    const double gap = std::abs(z - 1.0);
    if (gap > 1e-10 && gap <= window) near.push_back(z);
  }
  StolzFit fit;
  fit.window = window;
  fit.window_points = static_cast<int>(near.size());
  if (near.empty()) {
    fit.status = StolzFit::Status::vacuous;
    fit.alpha = alpha_grid.front();
    return fit;
  }

  std::optional<std::size_t> first_pass;
  std::size_t best = 0;
  std::vector<Complex> witnesses;
  for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
    double c = std::numeric_limits<double>::infinity();
    Complex witness = near.front();
    for (const Complex& z : near) {
      const double ratio = (1.0 - std::abs(z)) / std::pow(std::abs(z - 1.0), alpha_grid[a]);
      if (ratio < c) {
        c = ratio;
        witness = z;
      }
    }
    fit.by_alpha.push_back({alpha_grid[a], c});
    witnesses.push_back(witness);
    if (!first_pass && c >= c_min) first_pass = a;
    if (c > fit.by_alpha[best].c) best = a;
  }
  const std::size_t chosen = first_pass.value_or(best);
  fit.status = first_pass ? StolzFit::Status::pass : StolzFit::Status::fail;
  fit.alpha = fit.by_alpha[chosen].alpha;
  fit.c = fit.by_alpha[chosen].c;
  fit.witness = witnesses[chosen];
  return fit;
}

HullBoundReport hull_distance_bound_check(const ComplexMatrix& t, const NumericalRangeSample& sample,
                                          std::span<const double> thetas, std::optional<double> slack) {
  require_square(t, "hull_distance_bound_check");
  if (sample.hull.empty()) throw InvalidArgument("hull_distance_bound_check: empty numerical range sample");
  HullBoundReport out;
  const double m = static_cast<double>(std::max<std::size_t>(sample.angles.size(), 1));
  out.slack = slack.value_or(1e-6 + 1.0 / (m * m));
  for (double magnitude : thetas) {
    for (double th : {-magnitude, magnitude}) {
      const Complex z = std::polar(1.0, th);
      const double dist = distance_to_hull(z, sample.hull);
      if (dist < 1e-12) {
        out.skipped.push_back(th);
        continue;
      }
      const double norm = resolvent_norm(t, z);
      const bool ok = norm <= (1.0 + out.slack) / dist;
      out.rows.push_back({th, norm, dist, ok});
      out.worst_ratio = std::max(out.worst_ratio, norm * dist);
      out.passed = out.passed && ok;
    }
  }
  return out;
}

RittDiagnostic ritt_diagnostic(const ComplexMatrix& t, int iterations) {
  require_square(t, "ritt_diagnostic");
  if (iterations < 10) throw InvalidArgument("ritt_diagnostic: need N >= 10");
  RittDiagnostic out;
  const Index d = t.rows();
  ComplexMatrix term = t * (ComplexMatrix::Identity(d, d) - t);
  for (int n = 1; n <= iterations; ++n) {
    out.values.push_back(n * spectral_norm(term));
    term = t * term;
  }
  const int quarter = iterations / 4;
  for (int n = 1; n <= iterations; ++n) {
    const double v = out.values[static_cast<std::size_t>(n - 1)];
    out.sup = std::max(out.sup, v);
    if (n <= quarter) out.head_max = std::max(out.head_max, v);
    if (n > iterations - quarter) out.tail_max = std::max(out.tail_max, v);
  }
  out.consistent = out.tail_max <= 1.05 * out.head_max;
  return out;
}

ZnBeta zn_beta(std::span<const Complex> omega, int iterations) {
  if (omega.empty()) throw InvalidArgument("zn_beta: empty sample");
  if (iterations < 10) throw InvalidArgument("zn_beta: need N >= 10");
  ZnBeta out;
  out.s = power_sup(omega, iterations);
  std::vector<double> xs, ys;
  for (int n = iterations / 2; n <= iterations; ++n) {
    const double v = out.s[static_cast<std::size_t>(n - 1)];
    if (!(v > 0.0)) return out;
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(v));
  }
  const LineFit fit = fit_line(xs, ys);
  out.beta = -fit.slope;
  out.r_squared = fit.r_squared;
  if (*out.beta > 0.0) out.implied_alpha = 1.0 / *out.beta;
  return out;
}

KSpectralReport k_spectral_check(const ComplexMatrix& t, const NumericalRangeSample& sample, int iterations) {
  require_square(t, "k_spectral_check");
  if (sample.hull.empty()) throw InvalidArgument("k_spectral_check: empty numerical range sample");
  if (iterations < 1) throw InvalidArgument("k_spectral_check: need N >= 1");
  const std::vector<Complex> boundary = hull_boundary(sample.hull, 1e-3);
  KSpectralReport out;
  out.s = power_sup(boundary, iterations);
  const Index d = t.rows();
  ComplexMatrix term = t * (ComplexMatrix::Identity(d, d) - t);
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= iterations; ++n) {
    const double lhs = spectral_norm(term);
    const double bound = KSpectralReport::kConstant * out.s[static_cast<std::size_t>(n - 1)];
    out.lhs.push_back(lhs);
    out.worst_margin = std::max(out.worst_margin, lhs - bound);
    if (lhs > bound + 1e-8) out.passed = false;
    term = t * term;
  }
  return out;
}

}  // namespace pdlab
