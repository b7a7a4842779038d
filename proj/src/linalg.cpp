#include "pdlab/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "pdlab/error.hpp"
#include "pdlab/random.hpp"

namespace pdlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr Index kJacobiSvdLimit = 48;

void require_pnorm_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw InvalidArgument("operator_pnorm: p must lie in (1, inf), got " + std::to_string(p));
}

// Unit vector in the dual norm that norms v: sum_i v_i w_i = ||v||_s and
// ||w||_{s'} = 1.
ComplexVector norming_functional(const ComplexVector& v, double s) {
  const double nv = lp_norm(v, s);
  ComplexVector w = ComplexVector::Zero(v.size());
  if (nv == 0.0) return w;
  const double scale = std::pow(nv, s - 1.0);
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag == 0.0) continue;
    w(i) = std::pow(mag, s - 1.0) * std::conj(v(i) / mag) / scale;
  }
  return w;
}

double ascent_from(const ComplexMatrix& a, double p, ComplexVector x) {
  const double q = p / (p - 1.0);
  const double nx = lp_norm(x, p);
  if (nx == 0.0) return 0.0;
  x /= nx;
  double best = 0.0;
  const ComplexMatrix at = a.transpose();
  for (int it = 0; it < 500; ++it) {
    const ComplexVector y = a * x;
    const double ny = lp_norm(y, p);
    best = std::max(best, ny);
    if (ny == 0.0) break;
    const ComplexVector g = at * norming_functional(y, p);
    const double ng = lp_norm(g, q);
    // Re(g . x) = ||y||_p; no ascent direction left once ||g||_q reaches it.
    if (ng <= ny * (1.0 + 1e-14)) break;
    // The new iterate maximizes Re(g . x) over the p-sphere.
    x = norming_functional(g, q);
  }
  return best;
}

double pnorm_estimate(const ComplexMatrix& a, double p, std::uint64_t seed) {
  const Index n = a.cols();
  double best = 0.0;
  for (Index j = 0; j < n; ++j) best = std::max(best, ascent_from(a, p, ComplexVector::Unit(n, j)));
  best = std::max(best, ascent_from(a, p, ComplexVector::Ones(n)));
  Rng rng(seed);
  const bool real = is_real(a);
  for (int start = 0; start < 16; ++start) {
    ComplexVector x = real ? ComplexVector(rng.real_gaussian(n).cast<Complex>())
                           : rng.complex_gaussian(n);
    best = std::max(best, ascent_from(a, p, std::move(x)));
  }
  return best;
}

// Exact-small oracle: maximize ||A x||_p / ||x||_p over a hyperspherical
// angle grid, then polish the best grid points with a compass search.
class SphereSearch {
 public:
  SphereSearch(const ComplexMatrix& a, double p, bool real)
      : a_(a), p_(p), real_(real), dim_(real ? a.cols() : 2 * a.cols()) {}

  double run() {
    if (dim_ == 1) return value({});
    const int angles = static_cast<int>(dim_) - 1;
    std::array<int, 3> counts{};
    switch (dim_) {
      case 2: counts = {2048, 0, 0}; break;
      case 3: counts = {160, 320, 0}; break;
      default: counts = {48, 48, 96}; break;
    }
    std::vector<double> steps(angles);
    for (int k = 0; k < angles; ++k) {
      const bool last = (k == angles - 1);
      steps[k] = (last ? 2.0 * std::numbers::pi : std::numbers::pi) / counts[k];
    }

    struct Candidate {
      double value;
      std::vector<double> angles;
    };
    std::vector<Candidate> top;
    constexpr std::size_t kKeep = 6;
    std::vector<int> idx(angles, 0);
    std::vector<double> theta(angles);
    while (true) {
      for (int k = 0; k < angles; ++k) theta[k] = (idx[k] + 0.5) * steps[k];
      const double v = value(theta);
      if (top.size() < kKeep || v > top.back().value) {
        top.push_back({v, theta});
        std::sort(top.begin(), top.end(), [](const auto& l, const auto& r) { return l.value > r.value; });
        if (top.size() > kKeep) top.pop_back();
      }
      int k = 0;
      while (k < angles && ++idx[k] == counts[k]) idx[k++] = 0;
      if (k == angles) break;
    }

    double best = 0.0;
    for (auto& c : top) best = std::max(best, polish(c.angles, c.value, steps));
    return best;
  }

 private:
  double polish(std::vector<double> theta, double v, const std::vector<double>& steps) {
    double h = *std::max_element(steps.begin(), steps.end());
    while (h > 1e-12) {
      bool improved = false;
      for (std::size_t k = 0; k < theta.size(); ++k) {
        for (double sgn : {1.0, -1.0}) {
          theta[k] += sgn * h;
          const double trial = value(theta);
          if (trial > v) {
            v = trial;
            improved = true;
          } else {
            theta[k] -= sgn * h;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    return v;
  }

  double value(const std::vector<double>& theta) const {
    std::vector<double> u(dim_);
    double sin_prod = 1.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      u[k] = sin_prod * std::cos(theta[k]);
      sin_prod *= std::sin(theta[k]);
    }
    u[dim_ - 1] = sin_prod;
    ComplexVector x(a_.cols());
    for (Index i = 0; i < a_.cols(); ++i)
      x(i) = real_ ? Complex(u[i], 0.0) : Complex(u[2 * i], u[2 * i + 1]);
    const double nx = lp_norm(x, p_);
    return nx == 0.0 ? 0.0 : lp_norm(a_ * x, p_) / nx;
  }

  const ComplexMatrix& a_;
  double p_;
  bool real_;
  Index dim_;
};

}  // namespace

void require_finite(const ComplexMatrix& a, std::string_view what) {
  if (!a.allFinite()) throw NonFiniteError(std::string(what) + ": matrix has non-finite entries");
}

bool is_real(const ComplexMatrix& a) { return (a.imag().array() == 0.0).all(); }

ComplexMatrix qr_orthonormalize(const ComplexMatrix& vectors, std::optional<double> tol) {
  const Index d = vectors.rows();
  require_finite(vectors, "qr_orthonormalize");
  const double threshold_rel = tol.value_or(1e-12 * static_cast<double>(std::max<Index>(d, 1)));
  if (threshold_rel < 0.0) throw InvalidArgument("qr_orthonormalize: tolerance must be nonnegative");
  double largest = 0.0;
  for (Index j = 0; j < vectors.cols(); ++j) largest = std::max(largest, vectors.col(j).norm());
  const double threshold = threshold_rel * largest;

  ComplexMatrix q(d, vectors.cols());
  Index rank = 0;
  for (Index j = 0; j < vectors.cols(); ++j) {
    ComplexVector v = vectors.col(j);
    if (largest == 0.0) continue;
    // Two passes of modified Gram-Schmidt keep the basis orthonormal to
    // working precision even for nearly dependent input.
    for (int pass = 0; pass < 2; ++pass)
      for (Index k = 0; k < rank; ++k) v -= q.col(k) * q.col(k).dot(v);
    const double nv = v.norm();
    if (nv <= threshold || nv == 0.0) continue;
    q.col(rank++) = v / nv;
  }
  return q.leftCols(rank);
}

ComplexMatrix qr_orthonormalize(Index dim, std::span<const ComplexVector> vectors,
                                std::optional<double> tol) {
  ComplexMatrix stacked(dim, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != dim)
      throw DimensionError("qr_orthonormalize: vector " + std::to_string(j) + " has length " +
                           std::to_string(vectors[j].size()) + ", expected " + std::to_string(dim));
    stacked.col(static_cast<Index>(j)) = vectors[j];
  }
  return qr_orthonormalize(stacked, tol);
}

SvdResult svd(const ComplexMatrix& a) {
  if (a.size() == 0) throw DimensionError("svd: empty matrix");
  require_finite(a, "svd");
  constexpr int options = Eigen::ComputeThinU | Eigen::ComputeThinV;
  if (std::min(a.rows(), a.cols()) <= kJacobiSvdLimit) {
    Eigen::JacobiSVD<ComplexMatrix> s(a, options);
    return {s.matrixU(), s.singularValues(), s.matrixV()};
  }
  Eigen::BDCSVD<ComplexMatrix> s(a, options);
  return {s.matrixU(), s.singularValues(), s.matrixV()};
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  require_finite(a, "spectral_norm");
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (std::min(a.rows(), a.cols()) <= kJacobiSvdLimit) {
    Eigen::JacobiSVD<ComplexMatrix> s(a / scale);
    return s.singularValues()(0) * scale;
  }
  const ComplexMatrix b = a / scale;
  const ComplexMatrix gram = a.cols() <= a.rows() ? ComplexMatrix(b.adjoint() * b)
                                                  : ComplexMatrix(b * b.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())) * scale;
}

double default_rank_tolerance(const ComplexMatrix& a) {
  return kEps * static_cast<double>(std::max(a.rows(), a.cols())) * spectral_norm(a);
}

double Spectrum::spectral_radius() const {
  double r = 0.0;
  for (const auto& z : eigenvalues) r = std::max(r, std::abs(z));
  return r;
}

std::vector<Complex> Spectrum::sorted() const {
  std::vector<Complex> out = eigenvalues;
  std::sort(out.begin(), out.end(), [](Complex l, Complex r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  return out;
}

Spectrum eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("eigenvalues: matrix is not square");
  require_finite(a, "eigenvalues");
  Spectrum out;
  if (a.rows() == 0) return out;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("eigenvalues: shifted QR iteration did not converge (n = " +
                           std::to_string(a.rows()) + ")");
  const auto& ev = solver.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  return out;
}

ExtremeEigenpair hermitian_extreme_eig(const ComplexMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw DimensionError("hermitian_extreme_eig: matrix must be square and nonempty");
  require_finite(h, "hermitian_extreme_eig");
  const double asym = (h - h.adjoint()).norm();
  if (asym > 1e-10 * h.norm())
    throw InvalidArgument("hermitian_extreme_eig: matrix is not Hermitian (||H - H^H||_F = " +
                          std::to_string(asym) + ")");
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw ConvergenceError("hermitian_extreme_eig: solver failed");
  const Index last = h.rows() - 1;
  return {solver.eigenvalues()(last), solver.eigenvectors().col(last)};
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError("solve_linear: A must be square and nonempty");
  if (b.rows() != a.rows())
    throw DimensionError("solve_linear: B has " + std::to_string(b.rows()) + " rows, A has " +
                         std::to_string(a.rows()));
  require_finite(a, "solve_linear (A)");
  require_finite(b, "solve_linear (B)");

  Eigen::FullPivLU<ComplexMatrix> lu(a);
  const double max_pivot = lu.maxPivot();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (max_pivot == 0.0 || min_pivot <= kEps * static_cast<double>(a.rows()) * max_pivot)
    throw SingularMatrixError("solve_linear: matrix is singular to working precision", min_pivot);

  ComplexMatrix x = lu.solve(b);
  const double scale = a.norm();
  auto relative_residual = [&](const ComplexMatrix& sol) {
    const double denom = scale * sol.norm();
    const double res = (a * sol - b).norm();
    return denom == 0.0 ? res : res / denom;
  };
  double rel = relative_residual(x);
  if (rel > 1e-10) {
    x += lu.solve(ComplexMatrix(b - a * x));
    rel = relative_residual(x);
  }
  if (rel > 1e-10)
    throw VerificationError("solve_linear: relative residual " + std::to_string(rel) + " exceeds 1e-10");
  return x;
}

double lp_norm(const ComplexVector& x, double p) {
  const double scale = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x(i)) / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

double operator_pnorm(const ComplexMatrix& a, double p, NormMode mode, std::uint64_t seed) {
  require_pnorm_exponent(p);
  if (a.size() == 0) return 0.0;
  require_finite(a, "operator_pnorm");
  if (p == 2.0) return spectral_norm(a);
  if (mode == NormMode::estimate) return pnorm_estimate(a, p, seed);

  const bool real = is_real(a);
  const Index search_dim = real ? a.cols() : 2 * a.cols();
  if (search_dim > 4)
    throw InvalidArgument("operator_pnorm: exact-small mode needs a search sphere of real dimension <= 4, got " +
                          std::to_string(search_dim));
  return SphereSearch(a, p, real).run();
}

}  // namespace pdlab
