#include "pdlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdlab/error.hpp"
#include "pdlab/random.hpp"
#include "pdlab/spectral.hpp"

namespace pdlab {

namespace {

constexpr double kGapFloor = 1e-12;

ComplexMatrix identity_like(const ComplexMatrix& t) { return ComplexMatrix::Identity(t.rows(), t.cols()); }

}  // namespace

SplitDecomposition fix_split(const ComplexMatrix& t, double tol) {
  if (t.rows() != t.cols() || t.rows() == 0) throw DimensionError("fix_split: operator must be square");
  if (!spectrum_check(t).peripheral_ok)
    throw InvalidArgument("fix_split: spectrum meets the unit circle away from 1");
  const ComplexMatrix gap = identity_like(t) - t;
  Subspace fix = null_space(gap, tol);
  Subspace range = column_space(gap, tol);
  if (fix.dim() + range.dim() != t.rows())
    throw NonComplementaryError("fix_split: rank bookkeeping of I - T is inconsistent", 0.0);

  ProjectionOp limit = [&] {
    try {
      return oblique_projection(fix, range);
    } catch (const NonComplementaryError& e) {
      throw NonComplementaryError(
          "fix_split: Fix T and Ran(I - T) overlap (defective eigenvalue 1, T is not power-bounded)",
          e.smallest_singular_value());
    }
  }();

  const double budget = 1e-8 * std::max(1.0, limit.condition_number());
  const ComplexMatrix& p = limit.matrix();
  if (spectral_norm(t * p - p) > budget || spectral_norm(p * t - p) > budget)
    throw VerificationError("fix_split: P_T does not satisfy T P_T = P_T T = P_T");

  double radius = 0.0;
  if (!range.is_zero()) {
    const ComplexMatrix compressed = range.basis().adjoint() * t * range.basis();
    radius = eigenvalues(compressed).spectral_radius();
  }
  return {std::move(fix), std::move(range), std::move(limit), radius};
}

DichotomyReport dichotomy_report(const ComplexMatrix& t, int iterations, double tol, TraceNorm norm) {
  const SplitDecomposition split = fix_split(t, tol);
  DichotomyReport out;
  out.restriction_spectral_radius = split.restriction_spectral_radius;
  out.gap = power_norm_gap(t, split.limit.matrix(), iterations, norm);
  const auto& g = out.gap.values;

  int last = 0;
  while (last + 1 <= iterations && g[static_cast<std::size_t>(last + 1)] > kGapFloor) ++last;

  if (last == 0) {
    out.rate = 0.0;
  } else if (last == 1) {
    out.rate = g[0] > 0.0 ? g[1] / g[0] : 0.0;
  } else {
    out.fit_begin = std::max(1, last / 2);
    out.fit_end = last;
    std::vector<double> xs, ys;
    for (int n = out.fit_begin; n <= out.fit_end; ++n) {
      xs.push_back(n);
      ys.push_back(std::log(g[static_cast<std::size_t>(n)]));
    }
    out.rate = std::exp(fit_line(xs, ys).slope);
  }

  out.constant = g[0];
  if (out.rate > 0.0)
    for (int n = 1; n <= last; ++n)
      out.constant = std::max(out.constant, g[static_cast<std::size_t>(n)] / std::pow(out.rate, n));

  out.envelope_ok = true;
  for (int n = 0; n <= iterations; ++n) {
    const double bound = out.constant * std::pow(out.rate, n) + kGapFloor;
    if (g[static_cast<std::size_t>(n)] > bound) out.envelope_ok = false;
  }
  out.rate_matches = std::abs(out.rate - out.restriction_spectral_radius) <= 0.05;
  return out;
}

DrFixedSpace dr_fixed_space(const Subspace& m1, const Subspace& m2, double tol) {
  if (m1.ambient_dim() != m2.ambient_dim()) throw DimensionError("dr_fixed_space: ambient dimensions differ");
  const Subspace both = intersect(m1, m2, tol);
  const Subspace neither = intersect(complement(m1), complement(m2), tol);
  Subspace formula = subspace_sum(both, neither);

  const OperatorSpec t = dr_operator(orth_projection(m1), orth_projection(m2));
  const SplitDecomposition split = fix_split(t.matrix());

  double worst = 1.0;
  bool ok = formula.dim() == split.fix.dim();
  if (ok && !formula.is_zero()) {
    const auto cosines = principal_angles(formula, split.fix);
    worst = cosines.back();
    ok = worst >= 1.0 - tol;
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "dr_fixed_space: formula gives dim " << formula.dim() << " (intersection " << both.dim()
        << ", complement intersection " << neither.dim() << ") but ker(I - T) has dim " << split.fix.dim();
    if (formula.dim() == split.fix.dim()) msg << "; worst principal cosine " << worst;
    throw VerificationError(msg.str());
  }
  return {std::move(formula), split.fix.dim(), worst};
}

DrRateReport dr_rate_check(const Subspace& m1, const Subspace& m2, int iterations, double slack) {
  if (iterations < 0) throw InvalidArgument("dr_rate_check: negative iteration count");
  DrRateReport out;
  out.friedrichs = friedrichs_number(m1, m2);
  const DrFixedSpace fixed = dr_fixed_space(m1, m2);
  const ComplexMatrix p = orth_projection(fixed.space).matrix();
  const ComplexMatrix t = dr_operator(orth_projection(m1), orth_projection(m2)).matrix();

  ComplexMatrix power = identity_like(t);
  out.max_violation = -1.0;
  for (int n = 0; n <= iterations; ++n) {
    const double gap = spectral_norm(power - p);
    const double bound = std::pow(out.friedrichs, n);
    out.gaps.push_back(gap);
    out.bounds.push_back(bound);
    out.max_violation = std::max(out.max_violation, gap - bound);
    if (gap > bound + slack && !out.first_failure) out.first_failure = n;
    power = t * power;
  }
  out.passed = !out.first_failure.has_value();
  return out;
}

HalperinReport halperin_inequality_check(std::span<const ComplexMatrix> projections, std::optional<double> p,
                                         int samples, std::uint64_t seed) {
  if (projections.empty()) throw InvalidArgument("halperin_inequality_check: no projections");
  if (samples < 1) throw InvalidArgument("halperin_inequality_check: need at least one sample");
  const Index d = projections.front().rows();
  auto norm = [&](const ComplexVector& v) { return p ? lp_norm(v, *p) : v.norm(); };

  ComplexMatrix t = ComplexMatrix::Identity(d, d);
  for (std::size_t k = 0; k < projections.size(); ++k) {
    const ComplexMatrix& pk = projections[k];
    if (pk.rows() != d || pk.cols() != d) throw DimensionError("halperin_inequality_check: projection sizes differ");
    const double nk = p ? operator_pnorm(pk, *p) : spectral_norm(pk);
    if (nk > 1.0 + 1e-6)
      throw InvalidArgument("halperin_inequality_check: factor " + std::to_string(k + 1) + " has norm " +
                            std::to_string(nk) + " > 1");
    t = pk * t;
  }

  const double q = p ? std::max(2.0, *p) : 2.0;
  HalperinReport out;
  out.exponent = 1.0 / std::pow(q, static_cast<double>(projections.size()));
  out.witness = ComplexVector::Zero(d);
  Rng rng(seed);
  for (int i = 0; i < 2 * samples; ++i) {
    if (i == samples) out.c_hat_half = out.c_hat;
    ComplexVector x = rng.complex_gaussian(d);
    x /= norm(x);
    const ComplexVector tx = t * x;
    const double deficit = 1.0 - norm(tx);
    if (deficit <= 1e-14) {
      ++out.skipped;
      continue;
    }
    ++out.evaluated;
    const double ratio = norm(ComplexVector(x - tx)) / std::pow(deficit, out.exponent);
    if (ratio > out.c_hat) {
      out.c_hat = ratio;
      out.witness = x;
    }
  }
  out.stable = out.c_hat_half == 0.0 ? out.c_hat == 0.0 : (out.c_hat - out.c_hat_half) / out.c_hat_half < 0.2;
  return out;
}

SlowInstance slow_instance(std::span<const double> rates) {
  if (rates.empty()) throw InvalidArgument("slow_instance: empty rate sequence");
  for (std::size_t n = 0; n < rates.size(); ++n) {
    if (!(rates[n] > 0.0) || rates[n] > 1.0)
      throw InvalidArgument("slow_instance: rate r_" + std::to_string(n) + " = " + std::to_string(rates[n]) +
                            " is outside (0, 1]");
    if (n > 0 && rates[n] > rates[n - 1])
      throw InvalidArgument("slow_instance: rates increase at n = " + std::to_string(n));
  }
  const Index blocks = static_cast<Index>(rates.size());
  const Index d = 2 * blocks;
  SlowInstance out{{rates.begin(), rates.end()}, {}, Subspace::zero(d), Subspace::zero(d), {}, {}, {}, {}, {}, 0.0};

  ComplexMatrix b1 = ComplexMatrix::Zero(d, blocks);
  ComplexMatrix b2 = ComplexMatrix::Zero(d, blocks);
  for (Index n = 0; n < blocks; ++n) {
    const double cosine = std::pow(rates[static_cast<std::size_t>(n)], 1.0 / (2.0 * n + 1.0));
    const double theta = std::acos(std::min(1.0, cosine));
    out.angles.push_back(theta);
    b1(2 * n, n) = 1.0;
    b2(2 * n, n) = std::cos(theta);
    b2(2 * n + 1, n) = std::sin(theta);
  }
  out.m1 = Subspace::from_orthonormal(b1);
  out.m2 = Subspace::from_orthonormal(b2);
  const ProjectionOp projections[] = {orth_projection(out.m1), orth_projection(out.m2)};
  out.t = map_operator(projections).matrix();
  out.x = b1.rowwise().sum();

  std::vector<ComplexVector> iterates;
  ComplexVector v = out.x;
  for (std::size_t n = 0; n < rates.size(); ++n) {
    iterates.push_back(v);
    out.orbit_norms.push_back(v.norm());
    if (out.orbit_norms.back() < rates[n] * (1.0 - 1e-12))
      throw VerificationError("slow_instance: certificate fails at n = " + std::to_string(n) +
                              " (construction bug): ||T^n x|| = " + std::to_string(out.orbit_norms.back()) +
                              " < r_n = " + std::to_string(rates[n]));
    v = out.t * v;
  }

  // phi is the Hilbert duality vector of the final iterate, scaled to unit norm.
  const ComplexVector& last = iterates.back();
  out.functional = last.conjugate() / last.norm();
  double kappa = 1.0;
  for (std::size_t n = 0; n < rates.size(); ++n) {
    const double value = pairing(iterates[n], out.functional).real();
    out.weak_values.push_back(value);
    kappa = std::min(kappa, value / rates[n]);
  }
  out.kappa = std::max(0.0, kappa);
  return out;
}

SuperpolyReport superpoly_vectors(const ComplexMatrix& t, const SplitDecomposition& split, int k_max, int iterations,
                                  std::uint64_t seed, int window_begin, std::optional<int> window_end) {
  if (k_max < 2) throw InvalidArgument("superpoly_vectors: k_max must be at least 2");
  if (iterations < 1) throw InvalidArgument("superpoly_vectors: need at least one iteration");
  if (split.limit.dim() != t.rows()) throw DimensionError("superpoly_vectors: split does not match T");
  SuperpolyReport out;
  out.window_begin = window_begin;
  out.window_end = window_end.value_or(iterations);
  if (out.window_begin < 1 || out.window_end > iterations || out.window_end <= out.window_begin)
    throw InvalidArgument("superpoly_vectors: bad fit window");

  const ComplexMatrix gap = identity_like(t) - t;
  Rng rng(seed);
  std::vector<ComplexVector> starts;
  for (out.attempts = 1;; ++out.attempts) {
    const ComplexVector y = rng.complex_gaussian(t.rows());
    starts.clear();
    ComplexVector x = y;
    bool degenerate = false;
    for (int k = 1; k <= k_max; ++k) {
      x = gap * x;
      if (x.norm() <= 1e-14 * y.norm()) degenerate = true;
      starts.push_back(x);
    }
    if (!degenerate) break;
    if (out.attempts == 8)
      throw InvalidArgument("superpoly_vectors: (I - T)^k y vanished for 8 seeds; Ran(I - T) is numerically trivial");
  }

  const ComplexMatrix& limit = split.limit.matrix();
  for (int k = 1; k <= k_max; ++k) {
    SuperpolyCurve curve;
    curve.k = k;
    curve.residuals = orbit(t, limit, starts[static_cast<std::size_t>(k - 1)], iterations).values;
    std::vector<double> xs, ys;
    for (int n = out.window_begin; n <= out.window_end; ++n) {
      const double r = curve.residuals[static_cast<std::size_t>(n)];
      if (r <= 0.0) continue;
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(r));
    }
    if (xs.size() >= 2) curve.slope = fit_line(xs, ys).slope;
    out.curves.push_back(std::move(curve));
  }
  for (std::size_t k = 1; k < out.curves.size(); ++k) {
    const auto& prev = out.curves[k - 1].slope;
    const auto& cur = out.curves[k].slope;
    if (prev && cur && *cur > *prev + 0.1) out.slopes_ordered = false;
  }
  return out;
}

SuperpolyReport superpoly_vectors(const ComplexMatrix& t, int k_max, int iterations, std::uint64_t seed,
                                  int window_begin, std::optional<int> window_end) {
  return superpoly_vectors(t, fix_split(t), k_max, iterations, seed, window_begin, window_end);
}

}  // namespace pdlab
