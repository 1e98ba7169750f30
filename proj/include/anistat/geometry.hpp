#pragma once

#include <array>
#include <vector>

namespace anistat {

using Point2 = std::array<double, 2>;
using Polygon = std::vector<Point2>;  // closed implicitly (last vertex joins the first)

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d);
bool point_in_polygon(const Point2& p, const Polygon& poly);
bool polygon_is_simple(const Polygon& poly);
bool polygons_intersect(const Polygon& a, const Polygon& b);
double polygon_area(const Polygon& poly);

}  // namespace anistat
