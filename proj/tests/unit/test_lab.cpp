#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "pdlab/error.hpp"
#include "pdlab/lab.hpp"
#include "pdlab/random.hpp"

using namespace pdlab;

namespace {

constexpr double kPi = std::numbers::pi;

Subspace line(double theta, Index dim = 2) { return Subspace::span(oracle::line(theta, dim)); }

Subspace coords(Index dim, std::initializer_list<Index> idx) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, static_cast<Index>(idx.size()));
  Index j = 0;
  for (Index i : idx) m(i, j++) = 1.0;
  return Subspace::span(m);
}

ComplexMatrix dr_lines(double theta) {
  return dr_operator(orth_projection(line(0.0)), orth_projection(line(theta))).matrix();
}

ComplexMatrix map_of(const Subspace& a, const Subspace& b) {
  const ProjectionOp ps[] = {orth_projection(a), orth_projection(b)};
  return map_operator(ps).matrix();
}

}  // namespace

TEST_CASE("fix_split") {
  SUBCASE("orthogonal projection") {
    const ProjectionOp p = orth_projection(Subspace::from_orthonormal(oracle::random_basis(5, 2, 1)));
    const auto s = fix_split(p.matrix());
    CHECK(s.fix.dim() == 2);
    CHECK(s.range.dim() == 3);
    CHECK((s.limit.matrix() - p.matrix()).norm() < 1e-10);
    CHECK(s.restriction_spectral_radius < 1e-12);
  }
  SUBCASE("DR lines") {
    const auto s = fix_split(dr_lines(kPi / 3));
    CHECK(s.fix.is_zero());
    CHECK(s.limit.matrix().norm() < 1e-14);
    CHECK(s.restriction_spectral_radius == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("MAP with a common line") {
    ComplexMatrix a(4, 2), b(4, 2);
    const ComplexMatrix rest = oracle::random_basis(3, 2, 2);
    a << 1, 0, 0, rest(0, 0), 0, rest(1, 0), 0, rest(2, 0);
    b << 1, 0, 0, rest(0, 1), 0, rest(1, 1), 0, rest(2, 1);
    const Subspace m1 = Subspace::span(a), m2 = Subspace::span(b);
    const auto s = fix_split(map_of(m1, m2));
    REQUIRE(s.fix.dim() == 1);
    CHECK(std::abs(std::abs(s.fix.basis()(0, 0)) - 1.0) < 1e-10);
    CHECK(principal_angles(s.fix, intersect(m1, m2))[0] >= 1 - 1e-10);
  }
  SUBCASE("defective eigenvalue 1") {
    ComplexMatrix jordan(2, 2);
    jordan << 1, 1, 0, 1;
    CHECK_THROWS_AS(fix_split(jordan), NonComplementaryError);
  }
  SUBCASE("peripheral spectrum") {
    CHECK_THROWS_AS(fix_split(-ComplexMatrix::Identity(2, 2)), InvalidArgument);
  }
}

TEST_CASE("dichotomy_report") {
  const ProjectionOp p = orth_projection(Subspace::from_orthonormal(oracle::random_basis(4, 2, 3)));
  const auto proj = dichotomy_report(p.matrix(), 50);
  CHECK(proj.rate == 0.0);
  CHECK(proj.envelope_ok);
  for (std::size_t n = 1; n < proj.gap.values.size(); ++n) CHECK(proj.gap.values[n] < 1e-12);

  const auto dr = dichotomy_report(dr_lines(kPi / 3), 200);
  CHECK(dr.regime == "exponential");
  CHECK(std::abs(dr.rate - 0.5) <= 1e-6);
  CHECK(std::abs(dr.constant - 1.0) <= 1e-6);
  CHECK(dr.envelope_ok);
  CHECK(dr.rate_matches);

  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Subspace a = Subspace::from_orthonormal(rng.orthonormal_columns(8, 4));
    const Subspace b = Subspace::from_orthonormal(rng.orthonormal_columns(8, 5));
    const auto r = dichotomy_report(map_of(a, b), 400);
    CHECK(r.envelope_ok);
    CHECK(std::abs(r.rate - r.restriction_spectral_radius) <= 0.05);
  }
}

TEST_CASE("dr_fixed_space") {
  const Subspace m = Subspace::from_orthonormal(oracle::random_basis(4, 2, 5));
  CHECK(dr_fixed_space(m, m).space.dim() == 4);
  CHECK(dr_fixed_space(line(0.0), line(0.8)).space.is_zero());

  const auto f = dr_fixed_space(coords(4, {0, 1}), coords(4, {1, 2}));
  REQUIRE(f.space.dim() == 2);
  CHECK(principal_angles(f.space, coords(4, {1, 3}))[1] >= 1 - 1e-10);
  CHECK(f.kernel_dim == 2);
  CHECK(f.worst_cosine >= 1 - 1e-8);
}

TEST_CASE("dr_rate_check") {
  const auto lines = dr_rate_check(line(0.0), line(kPi / 3), 10);
  CHECK(lines.friedrichs == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(lines.gaps[10] - 9.765625e-4) < 1e-12);
  CHECK(lines.passed);

  const Subspace m = Subspace::from_orthonormal(oracle::random_basis(3, 1, 6));
  const auto same = dr_rate_check(m, m, 5);
  CHECK(same.friedrichs == 0.0);
  CHECK(same.bounds[0] == 1.0);
  CHECK(same.gaps[0] < 1e-12);
  CHECK(same.passed);

  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = dr_rate_check(Subspace::from_orthonormal(rng.orthonormal_columns(8, 3)),
                                 Subspace::from_orthonormal(rng.orthonormal_columns(8, 4)), 50);
    CHECK(r.passed);
    CHECK(r.max_violation <= 1e-10);
  }
}

TEST_CASE("halperin_inequality_check") {
  const ComplexMatrix p = orth_projection(Subspace::from_orthonormal(oracle::random_basis(5, 2, 8))).matrix();
  const ComplexMatrix one[] = {p};
  const auto h1 = halperin_inequality_check(one, std::nullopt, 2000, 1);
  CHECK(h1.exponent == 0.5);
  CHECK(h1.c_hat <= std::sqrt(2.0) + 1e-6);
  CHECK(h1.c_hat > 0.0);
  CHECK(h1.stable);

  const ComplexMatrix ids[] = {ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(3, 3)};
  const auto hi = halperin_inequality_check(ids, std::nullopt, 100, 2);
  CHECK(hi.c_hat == 0.0);
  CHECK(hi.skipped == 200);
  CHECK(hi.stable);

  ComplexVector d1(4), d2(4);
  d1 << 1, 1, 0, 0;
  d2 << 0, 1, 1, 0;
  const ComplexMatrix blocks[] = {d1.asDiagonal(), d2.asDiagonal()};
  const auto h3 = halperin_inequality_check(blocks, 3.0, 5000, 3);
  CHECK(h3.exponent == doctest::Approx(1.0 / 9.0));
  CHECK(std::isfinite(h3.c_hat));
  CHECK(h3.stable);

  ComplexMatrix oblique(2, 2);
  oblique << 1, -1, 0, 0;
  const ComplexMatrix bad[] = {oblique};
  CHECK_THROWS_AS(halperin_inequality_check(bad, std::nullopt, 10, 1), InvalidArgument);
}

TEST_CASE("slow_instance") {
  std::vector<double> halving;
  for (int n = 0; n <= 8; ++n) halving.push_back(std::pow(2.0, -n));
  const auto s = slow_instance(halving);
  CHECK(s.dimension() == 18);
  // Independent brute-force iteration with explicit projections.
  const ComplexMatrix p1 = s.m1.basis() * s.m1.basis().adjoint();
  const ComplexMatrix p2 = s.m2.basis() * s.m2.basis().adjoint();
  ComplexVector v = s.x;
  for (int n = 0; n <= 8; ++n) {
    CHECK(v.norm() >= halving[static_cast<std::size_t>(n)]);
    CHECK(v.norm() == doctest::Approx(s.orbit_norms[static_cast<std::size_t>(n)]).epsilon(1e-12));
    v = p2 * (p1 * v);
  }
  CHECK(s.kappa > 0.0);
  CHECK(s.kappa <= 1.0);

  const std::vector<double> constant(5, 1.0);
  const auto c = slow_instance(constant);
  for (double a : c.angles) CHECK(a == 0.0);

  CHECK_THROWS_AS(slow_instance(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(slow_instance(std::vector<double>{0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(slow_instance(std::vector<double>{1.0, 0.0}), InvalidArgument);
}

TEST_CASE("superpoly_vectors") {
  const auto zero = superpoly_vectors(ComplexMatrix::Zero(3, 3), 3, 20, 1);
  REQUIRE(zero.curves.size() == 3);
  for (const auto& c : zero.curves) CHECK(c.residuals == zero.curves[0].residuals);

  ComplexVector d(6);
  for (int j = 1; j <= 6; ++j) d[j - 1] = 1.0 - std::pow(10.0, -j);
  const ComplexMatrix t = d.asDiagonal();
  const auto r = superpoly_vectors(t, 3, 10000, 2, 10, 10000);
  CHECK(r.slopes_ordered);
  const auto& c1 = r.curves[0].residuals;
  const auto& c3 = r.curves[2].residuals;
  double previous = INFINITY;
  for (int n = 10; n <= 10000; ++n) {
    const double ratio = c3[static_cast<std::size_t>(n)] / c1[static_cast<std::size_t>(n)];
    CHECK(ratio <= 1.0);
    CHECK(ratio <= previous * (1 + 1e-12));
    previous = ratio;
  }

  CHECK_THROWS_AS(superpoly_vectors(t, 1, 20, 1), InvalidArgument);
  CHECK_THROWS_AS(superpoly_vectors(ComplexMatrix::Identity(3, 3), 2, 20, 1), InvalidArgument);
}
