#pragma once

#include <array>
#include <vector>

#include "anistat/grid.hpp"

namespace anistat {

/// Delaunay triangulation of a point set (Bowyer-Watson). Triangles index the
/// input points and are counter-clockwise.
std::vector<std::array<int, 3>> delaunay(const std::vector<std::array<double, 2>>& points);

/// Piecewise-linear interpolation on the Delaunay triangulation of the sample.
/// Nodes outside the convex hull are masked. Throws InvalidInput for fewer than
/// three points or collinear sets.
GridField interpolate_to_grid(const ScatteredSample& sample, const GridSpec& spec);

}  // namespace anistat
