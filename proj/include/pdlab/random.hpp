#pragma once

#include <cstdint>
#include <random>

#include "pdlab/linalg.hpp"

namespace pdlab {

/// Explicitly seeded source of test vectors and matrices. There is no global
/// RNG state anywhere in pdlab; every consumer owns one of these.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi);  // inclusive
  double normal();

  RealVector real_gaussian(Index n);
  /// Independent standard complex Gaussian entries.
  ComplexVector complex_gaussian(Index n);
  ComplexMatrix complex_gaussian(Index rows, Index cols);
  ComplexMatrix real_gaussian_matrix(Index rows, Index cols);

  /// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
  ComplexMatrix unitary(Index n);
  /// Orthonormal basis of a uniformly random k-dimensional complex subspace.
  ComplexMatrix orthonormal_columns(Index n, Index k);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Seed for the index-th independent instance derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

}  // namespace pdlab
