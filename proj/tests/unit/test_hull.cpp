#include <cmath>
#include <random>

#include "doctest.h"
#include "pdlab/error.hpp"
#include "pdlab/hull.hpp"

using namespace pdlab;

TEST_CASE("convex_hull drops interior and collinear points") {
  const std::vector<Complex> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}, {0, 0}};
  const auto hull = convex_hull(pts);
  REQUIRE(hull.size() == 4);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i], b = hull[(i + 1) % hull.size()];
    area += a.real() * b.imag() - b.real() * a.imag();
  }
  CHECK(area / 2.0 == doctest::Approx(1.0));
}

TEST_CASE("convex_hull degenerate inputs") {
  CHECK(convex_hull(std::vector<Complex>{{1, 0}, {1, 0}}).size() == 1);
  CHECK(convex_hull(std::vector<Complex>{{0, 0}, {0.5, 0}, {1, 0}}).size() == 2);
}

TEST_CASE("distance_to_hull") {
  const auto square = convex_hull(std::vector<Complex>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(distance_to_hull({0.5, 0.5}, square) == 0.0);
  CHECK(distance_to_hull({2, 0.5}, square) == doctest::Approx(1.0));
  CHECK(distance_to_hull({2, 2}, square) == doctest::Approx(std::sqrt(2.0)));

  const std::vector<Complex> segment{{0, 0}, {1, 0}};
  CHECK(distance_to_hull({0.5, -3}, segment) == doctest::Approx(3.0));
  CHECK(distance_to_hull({-1, 0}, segment) == doctest::Approx(1.0));
  CHECK(distance_to_hull({3, 4}, std::vector<Complex>{{0, 0}}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(distance_to_hull({0, 0}, std::vector<Complex>{}), InvalidArgument);
}

TEST_CASE("hull contains its points") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Complex> pts;
  for (int i = 0; i < 500; ++i) pts.emplace_back(g(rng), g(rng));
  const auto hull = convex_hull(pts);
  for (Complex z : pts) CHECK(distance_to_hull(z, hull) <= 1e-10);
}

TEST_CASE("hull_boundary spacing") {
  const auto square = convex_hull(std::vector<Complex>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto pts = hull_boundary(square, 0.1);
  CHECK(pts.size() == 40);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(pts[(i + 1) % pts.size()] - pts[i]) <= 0.1 + 1e-12);
  CHECK_THROWS_AS(hull_boundary(square, 0.0), InvalidArgument);
}
