#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "pdlab/error.hpp"
#include "pdlab/operators.hpp"

using namespace pdlab;

namespace {

ProjectionOp line_projection(double theta) { return orth_projection(Subspace::span(oracle::line(theta))); }

ProjectionOp random_projection(Index dim, Index k, std::uint64_t seed) {
  return orth_projection(Subspace::from_orthonormal(oracle::random_basis(dim, k, seed)));
}

}  // namespace

TEST_CASE("map_operator") {
  const ProjectionOp p = random_projection(4, 2, 1);
  const ProjectionOp single[] = {p};
  CHECK((map_operator(single).matrix() - p.matrix()).norm() < 1e-15);

  const ProjectionOp pair[] = {line_projection(0.0), line_projection(std::numbers::pi / 3)};
  ComplexMatrix expected(2, 2);
  expected << 0.25, 0, std::sqrt(3.0) / 4.0, 0;
  const OperatorSpec t = map_operator(pair);
  CHECK((t.matrix() - expected).norm() < 1e-15);
  CHECK(t.expression() == "P2*P1");
  CHECK(t.uses_every_factor());

  const ProjectionOp orthogonal[] = {line_projection(0.0), line_projection(std::numbers::pi / 2)};
  CHECK(map_operator(orthogonal).matrix().norm() < 1e-15);

  const ProjectionOp mismatch[] = {line_projection(0.0), random_projection(3, 1, 2)};
  CHECK_THROWS_AS(map_operator(mismatch), DimensionError);
}

TEST_CASE("dr_operator") {
  const ProjectionOp p = random_projection(5, 2, 3);
  CHECK((dr_operator(p, p).matrix() - ComplexMatrix::Identity(5, 5)).norm() < 1e-12);

  const double theta = 0.7;
  const ComplexMatrix t = dr_operator(line_projection(0.0), line_projection(theta)).matrix();
  ComplexMatrix rotation(2, 2);
  rotation << std::cos(2 * theta), -std::sin(2 * theta), std::sin(2 * theta), std::cos(2 * theta);
  CHECK((t - 0.5 * (ComplexMatrix::Identity(2, 2) + rotation)).norm() < 1e-12);
  for (Complex z : eigenvalues(t).eigenvalues) CHECK(std::abs(std::abs(z) - std::cos(theta)) < 1e-12);

  const ProjectionOp id = orth_projection(Subspace::full(3));
  const ProjectionOp zero = orth_projection(Subspace::zero(3));
  CHECK(dr_operator(id, zero).matrix().norm() < 1e-15);
}

TEST_CASE("dr_generalized") {
  const ProjectionOp p = random_projection(4, 2, 4);
  CHECK((dr_generalized(p, p).matrix() - ComplexMatrix::Identity(4, 4)).norm() < 1e-12);

  const ProjectionOp a = random_projection(6, 2, 5);
  const ProjectionOp b = random_projection(6, 3, 6);
  const ComplexMatrix half = 0.5 * ComplexMatrix::Identity(6, 6);
  CHECK(oracle::norm2(dr_generalized(a, b).matrix() - half) <= 0.5 + 1e-8);
  CHECK(dr_generalized(a, b, 1, 2).expression() == "T12");

  // Orthogonal lines in dim 3 intersecting nowhere: eigenvalue 1 appears
  // only from the common orthogonal complement.
  const ProjectionOp l1 = orth_projection(Subspace::span(oracle::line(0.0, 3)));
  const ProjectionOp l2 = orth_projection(Subspace::span(oracle::line(0.4, 3)));
  int ones = 0, rotating = 0;
  for (Complex z : eigenvalues(dr_generalized(l1, l2).matrix()).eigenvalues) {
    if (std::abs(z - 1.0) < 1e-10) ++ones;
    if (std::abs(std::abs(z) - std::cos(0.4)) < 1e-10) ++rotating;
  }
  CHECK(ones == 1);
  CHECK(rotating == 2);
}

TEST_CASE("convex_combination") {
  const ProjectionOp a = random_projection(5, 2, 7);
  const ProjectionOp b = random_projection(5, 3, 8);
  const std::map<std::string, OperatorSpec> table{{"A", map_operator(std::span(&a, 1))},
                                                  {"T12", dr_generalized(a, b, 1, 2)},
                                                  {"T21", dr_generalized(b, a, 2, 1)}};
  CHECK((convex_combination(table, {{1.0, {"A"}}}).matrix() - a.matrix()).norm() < 1e-15);

  const ComplexMatrix avg = convex_combination(table, {{0.5, {"T12"}}, {0.5, {"T21"}}}).matrix();
  CHECK(oracle::norm2(avg - 0.5 * ComplexMatrix::Identity(5, 5)) <= 0.5 + 1e-8);

  ComplexVector d1(3), d2(3);
  d1 << 1, 0, 1;
  d2 << 0, 1, 1;
  const std::map<std::string, OperatorSpec> diag{
      {"D1", map_operator(std::vector{ProjectionOp(d1.asDiagonal(), ProjectionKind::hilbert_orthogonal)})},
      {"D2", map_operator(std::vector{ProjectionOp(d2.asDiagonal(), ProjectionKind::hilbert_orthogonal)})}};
  const ComplexMatrix mix = convex_combination(diag, {{0.3, {"D1"}}, {0.7, {"D2", "D1"}}}).matrix();
  ComplexVector expected(3);
  expected << 0.3, 0.0, 1.0;
  CHECK((mix - ComplexMatrix(expected.asDiagonal())).norm() < 1e-12);

  CHECK_THROWS_AS(convex_combination(table, {{0.5, {"A"}}, {0.4, {"T12"}}}), InvalidArgument);
  CHECK_THROWS_AS(convex_combination(table, {{1.2, {"A"}}, {-0.2, {"T12"}}}), InvalidArgument);
  CHECK_THROWS_AS(convex_combination(table, {{1.0, {"B"}}}), InvalidArgument);
}

TEST_CASE("orbit") {
  const ComplexVector x = oracle::random_complex(3, 1, 9).col(0);
  const ComplexMatrix zero = ComplexMatrix::Zero(3, 3);
  const auto z = orbit(zero, zero, x, 4).values;
  REQUIRE(z.size() == 5);
  CHECK(z[0] == doctest::Approx(x.norm()));
  for (std::size_t n = 1; n < z.size(); ++n) CHECK(z[n] == 0.0);

  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  for (double v : orbit(id, id, x, 4).values) CHECK(v == 0.0);

  const ComplexMatrix t = dr_operator(line_projection(0.0), line_projection(std::numbers::pi / 3)).matrix();
  ComplexVector e1 = ComplexVector::Zero(2);
  e1[0] = 1.0;
  const auto dr = orbit(t, ComplexMatrix::Zero(2, 2), e1, 30).values;
  for (int n = 0; n <= 30; ++n) CHECK(std::abs(dr[static_cast<std::size_t>(n)] - std::pow(0.5, n)) < 1e-12);
  CHECK_THROWS_AS(orbit(t, zero, e1, 3), DimensionError);
  CHECK_THROWS_AS(orbit(t, ComplexMatrix::Zero(2, 2), e1, 0), InvalidArgument);
}

TEST_CASE("power_norm_gap") {
  const ProjectionOp p = random_projection(4, 2, 10);
  const auto fixed = power_norm_gap(p.matrix(), p.matrix(), 5).values;
  CHECK(fixed[0] == doctest::Approx(1.0));
  for (std::size_t n = 1; n < fixed.size(); ++n) CHECK(fixed[n] < 1e-14);

  const ComplexMatrix t = dr_operator(line_projection(0.0), line_projection(std::numbers::pi / 3)).matrix();
  const auto g = power_norm_gap(t, ComplexMatrix::Zero(2, 2), 40).values;
  for (int n = 0; n <= 40; ++n) CHECK(std::abs(g[static_cast<std::size_t>(n)] - std::pow(0.5, n)) < 1e-12);

  const ProjectionOp pair[] = {line_projection(0.0), line_projection(std::numbers::pi / 4)};
  const auto m = power_norm_gap(map_operator(pair).matrix(), ComplexMatrix::Zero(2, 2), 40).values;
  for (std::size_t n = 1; n < m.size(); ++n) CHECK(m[n] < m[n - 1]);
  CHECK(std::abs(m[40] / m[39] - 0.5) < 1e-6);
}

TEST_CASE("power_bound of a Hilbert contraction") {
  const ProjectionOp pair[] = {random_projection(6, 3, 11), random_projection(6, 4, 12)};
  CHECK(power_bound(map_operator(pair).matrix(), 50) <= 1.0 + 1e-10);
}
