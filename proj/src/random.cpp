#include "pdlab/random.hpp"

namespace pdlab {

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

std::uint64_t Rng::integer(std::uint64_t lo, std::uint64_t hi) {
  std::uniform_int_distribution<std::uint64_t> dist(lo, hi);
  return dist(engine_);
}

double Rng::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

RealVector Rng::real_gaussian(Index n) {
  RealVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

ComplexVector Rng::complex_gaussian(Index n) {
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = normal();
    const double im = normal();
    v(i) = Complex(re, im);
  }
  return v;
}

ComplexMatrix Rng::complex_gaussian(Index rows, Index cols) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) m.col(j) = complex_gaussian(rows);
  return m;
}

ComplexMatrix Rng::real_gaussian_matrix(Index rows, Index cols) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

ComplexMatrix Rng::unitary(Index n) {
  const ComplexMatrix g = complex_gaussian(n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ComplexMatrix Rng::orthonormal_columns(Index n, Index k) {
  if (k == 0) return ComplexMatrix(n, 0);
  return unitary(n).leftCols(k);
}

}  // namespace pdlab
