#pragma once

#include <span>
#include <vector>

#include "pdlab/linalg.hpp"

namespace pdlab {

/// Extreme points of the planar convex hull, counter-clockwise, collinear
/// points dropped. Degenerate inputs give one point or two segment ends.
std::vector<Complex> convex_hull(std::span<const Complex> points);

/// Euclidean distance from z to the convex polygon spanned by `hull`
/// (0 inside). `hull` must come from convex_hull.
double distance_to_hull(Complex z, std::span<const Complex> hull);

/// Vertices plus points along every edge, spaced at most `spacing` apart.
std::vector<Complex> hull_boundary(std::span<const Complex> hull, double spacing);

}  // namespace pdlab
