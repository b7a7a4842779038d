#include "pdlab/hull.hpp"

#include <algorithm>
#include <cmath>

#include "pdlab/error.hpp"

namespace pdlab {

namespace {

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

double segment_distance(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace

std::vector<Complex> convex_hull(std::span<const Complex> points) {
  std::vector<Complex> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Complex l, Complex r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;

  std::vector<Complex> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Complex& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

double distance_to_hull(Complex z, std::span<const Complex> hull) {
  if (hull.empty()) throw InvalidArgument("distance_to_hull: empty hull");
  if (hull.size() == 1) return std::abs(z - hull[0]);
  if (hull.size() == 2) return segment_distance(z, hull[0], hull[1]);
  bool inside = true;
  double best = std::abs(z - hull[0]);
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    if (cross(a, b, z) < 0.0) inside = false;
    best = std::min(best, segment_distance(z, a, b));
  }
  return inside ? 0.0 : best;
}

std::vector<Complex> hull_boundary(std::span<const Complex> hull, double spacing) {
  if (!(spacing > 0.0)) throw InvalidArgument("hull_boundary: spacing must be positive");
  std::vector<Complex> out;
  if (hull.size() <= 1) return {hull.begin(), hull.end()};
  const std::size_t edges = hull.size() == 2 ? 1 : hull.size();
  for (std::size_t i = 0; i < edges; ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
    for (int j = 0; j < pieces; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / pieces));
  }
  if (hull.size() == 2) out.push_back(hull[1]);
  return out;
}

}  // namespace pdlab
