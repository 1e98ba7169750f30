#include "anistat/grid.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "anistat/error.hpp"

namespace anistat {

void GridSpec::validate(std::size_t min_side) const {
  if (side < min_side)
    throw InvalidInput("grid side must be at least " + std::to_string(min_side) + ", got " +
                       std::to_string(side));
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidInput("grid spacing must be positive");
}

std::size_t GridField::valid_count() const {
  if (mask.empty()) return values.size();
  std::size_t n = 0;
  for (auto m : mask) n += m != 0;
  return n;
}

void GridField::validate() const {
  spec.validate();
  if (values.size() != spec.size())
    throw InvalidInput("grid field holds " + std::to_string(values.size()) + " values, expected " +
                       std::to_string(spec.size()));
  if (!mask.empty() && mask.size() != values.size()) throw InvalidInput("grid mask size mismatch");
  for (std::size_t k = 0; k < values.size(); ++k)
    if ((mask.empty() || mask[k]) && !std::isfinite(values[k]))
      throw InvalidInput("grid field contains a non-finite value at index " + std::to_string(k));
}

void validate_sample(const ScatteredSample& sample) {
  std::set<std::pair<double, double>> seen;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const auto& p = sample[k];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.value))
      throw InvalidInput("scattered point " + std::to_string(k) + " is not finite");
    if (!seen.emplace(p.x, p.y).second)
      throw InvalidInput("scattered point " + std::to_string(k) + " duplicates an earlier location");
  }
}

GridField rotate90(const GridField& field) {
  // A node at (x, y) moves to (-y, x); re-index onto the same lattice.
  const std::size_t n = field.spec.side;
  GridField out{field.spec, std::vector<double>(field.values.size()), {}};
  if (!field.mask.empty()) out.mask.assign(field.mask.size(), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t ni = j;
      const std::size_t nj = n - 1 - i;
      out.values[ni * n + nj] = field.values[i * n + j];
      if (!field.mask.empty()) out.mask[ni * n + nj] = field.mask[i * n + j];
    }
  return out;
}

Moments moments(const std::vector<double>& values) {
  Moments m;
  const double n = static_cast<double>(values.size());
  if (values.size() < 2) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

Moments field_moments(const GridField& field) {
  if (field.mask.empty()) return moments(field.values);
  std::vector<double> v;
  v.reserve(field.values.size());
  for (std::size_t k = 0; k < field.values.size(); ++k)
    if (field.mask[k]) v.push_back(field.values[k]);
  return moments(v);
}

}  // namespace anistat
