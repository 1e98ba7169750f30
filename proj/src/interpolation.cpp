#include "anistat/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "anistat/error.hpp"

namespace anistat {

namespace {

using Pt = std::array<double, 2>;

struct Tri {
  std::array<int, 3> v;
  double cx, cy, r2;
};

double orient(const Pt& a, const Pt& b, const Pt& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

Tri make_tri(const std::vector<Pt>& p, int a, int b, int c) {
  if (orient(p[a], p[b], p[c]) < 0.0) std::swap(b, c);
  const double ax = p[a][0], ay = p[a][1];
  const double bx = p[b][0] - ax, by = p[b][1] - ay;
  const double cx = p[c][0] - ax, cy = p[c][1] - ay;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  return {{a, b, c}, ax + ux, ay + uy, ux * ux + uy * uy};
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Pt>& input) {
  const int n = static_cast<int>(input.size());
  if (n < 3) throw InvalidInput("triangulation needs at least 3 points");

  double minx = input[0][0], maxx = minx, miny = input[0][1], maxy = miny;
  for (const auto& q : input) {
    minx = std::min(minx, q[0]);
    maxx = std::max(maxx, q[0]);
    miny = std::min(miny, q[1]);
    maxy = std::max(maxy, q[1]);
  }
  const double span = std::max({maxx - minx, maxy - miny, 1e-300});
  const double mx = 0.5 * (minx + maxx);
  const double my = 0.5 * (miny + maxy);

  std::vector<Pt> p = input;
  p.push_back({mx - 40.0 * span, my - 30.0 * span});
  p.push_back({mx + 40.0 * span, my - 30.0 * span});
  p.push_back({mx, my + 40.0 * span});

  std::vector<Tri> tris{make_tri(p, n, n + 1, n + 2)};
  std::vector<std::pair<int, int>> edges;
  std::vector<Tri> kept;
  for (int i = 0; i < n; ++i) {
    const double x = p[i][0];
    const double y = p[i][1];
    edges.clear();
    kept.clear();
    kept.reserve(tris.size() + 2);
    for (const auto& t : tris) {
      const double dx = x - t.cx;
      const double dy = y - t.cy;
      if (dx * dx + dy * dy < t.r2 * (1.0 - 1e-12)) {
        for (int e = 0; e < 3; ++e) edges.emplace_back(t.v[e], t.v[(e + 1) % 3]);
      } else {
        kept.push_back(t);
      }
    }
    // Cavity boundary: edges not shared by two removed triangles.
    for (std::size_t a = 0; a < edges.size(); ++a) {
      bool shared = false;
      for (std::size_t b = 0; b < edges.size(); ++b)
        if (a != b && edges[a].first == edges[b].second && edges[a].second == edges[b].first) {
          shared = true;
          break;
        }
      if (!shared && std::fabs(orient(p[edges[a].first], p[edges[a].second], p[i])) > 0.0)
        kept.push_back(make_tri(p, edges[a].first, edges[a].second, i));
    }
    tris.swap(kept);
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris)
    if (t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back(t.v);
  return out;
}

GridField interpolate_to_grid(const ScatteredSample& sample, const GridSpec& spec) {
  spec.validate(3);
  if (sample.size() < 3) throw InvalidInput("interpolation needs at least 3 scattered points");
  validate_sample(sample);

  std::vector<Pt> pts;
  pts.reserve(sample.size());
  for (const auto& s : sample) pts.push_back({s.x, s.y});
  const auto tris = delaunay(pts);
  if (tris.empty()) throw InvalidInput("scattered points are collinear; no triangulation exists");

  GridField out{spec, std::vector<double>(spec.size(), 0.0), std::vector<std::uint8_t>(spec.size(), 0)};
  const double a = spec.spacing;
  const auto clamp_index = [&](double v) {
    return static_cast<long>(std::clamp(v, 0.0, static_cast<double>(spec.side - 1)));
  };
  for (const auto& t : tris) {
    const Pt& p0 = pts[t[0]];
    const Pt& p1 = pts[t[1]];
    const Pt& p2 = pts[t[2]];
    const double area = orient(p0, p1, p2);
    if (!(area > 0.0)) continue;
    const double eps = 1e-10;
    const long j0 = clamp_index(std::ceil(std::min({p0[0], p1[0], p2[0]}) / a - eps));
    const long j1 = clamp_index(std::floor(std::max({p0[0], p1[0], p2[0]}) / a + eps));
    const long i0 = clamp_index(std::ceil(std::min({p0[1], p1[1], p2[1]}) / a - eps));
    const long i1 = clamp_index(std::floor(std::max({p0[1], p1[1], p2[1]}) / a + eps));
    for (long i = i0; i <= i1; ++i)
      for (long j = j0; j <= j1; ++j) {
        const Pt q{static_cast<double>(j) * a, static_cast<double>(i) * a};
        const double w0 = orient(p1, p2, q) / area;
        const double w1 = orient(p2, p0, q) / area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < -eps || w1 < -eps || w2 < -eps) continue;
        const std::size_t k = static_cast<std::size_t>(i) * spec.side + static_cast<std::size_t>(j);
        out.values[k] = w0 * sample[t[0]].value + w1 * sample[t[1]].value + w2 * sample[t[2]].value;
        out.mask[k] = 1;
      }
  }
  return out;
}

}  // namespace anistat
