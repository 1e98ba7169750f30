#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "anistat/covariance.hpp"
#include "anistat/grid.hpp"
#include "anistat/inference.hpp"
#include "anistat/io.hpp"

namespace anistat {

/// Flat run configuration shared by every subcommand. Angles are degrees.
struct RunConfig {
  std::string command;
  // Covariance model and grid.
  std::string family = "gaussian";
  double sigma2 = 1.0;
  double R = 1.0;
  double theta_deg = 0.0;
  double xi = 4.0;
  double nu = 2.0;
  std::size_t side = 100;
  double spacing = 1.0;
  // Statistics.
  std::size_t n = 100;
  std::vector<double> p{0.95};
  std::uint64_t seed = 1;
  std::size_t realizations = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool exact = false;
  double window_factor = 3.0;
  std::size_t rays = 720;
  // Density grid.
  double r_min = 0.1;
  double r_max = 10.0;
  std::size_t r_points = 300;
  std::size_t theta_points = 360;
  // Scattered workflow.
  std::size_t scattered_points = 1000;
  std::size_t subset_size = 500;
  std::size_t subsets = 200;
  // Isotropy test / change detection.
  double R_hat = 1.0;
  double R_b = 1.0;
  double theta_b_deg = 0.0;
  std::string format = "csv";  // simulate output: csv | grf2
  std::vector<std::string> inputs;
  std::string out = "out";

  void validate() const;
  CovarianceModel model() const;
  GridSpec grid() const;
};

/// Throws InvalidInput on unknown keys or wrong types.
RunConfig config_from_json(const json& j, RunConfig base = {});
json config_to_json(const RunConfig& c);

/// Runs fn(0..count-1) on a pool of worker threads; the first exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Metadata embedded in every output: config, version, plus extra fields.
json output_metadata(const RunConfig& c, const json& extra = json::object());

// Density grids -------------------------------------------------------------

struct DensityGrid {
  std::vector<double> R_hat;      // log-spaced
  std::vector<double> theta_hat;  // radians, uniform cell centres on [-pi/4, pi/4)
  std::vector<double> density;    // per radian, row-major [r][theta]
  double at(std::size_t r, std::size_t t) const { return density[r * theta_hat.size() + t]; }
  /// Trapezoidal mass in R_hat, midpoint in theta_hat.
  double mass() const;
};

using JointDensity = std::function<double(double R_hat, double theta_hat)>;

DensityGrid evaluate_density(const JointDensity& f, double r_min, double r_max, std::size_t r_points,
                             std::size_t theta_points, std::size_t threads = 0);

struct Mode {
  double R_hat;
  double theta_hat;
  double height;
};

/// Grid points not lower than any of their 8 neighbours (neighbours across the
/// theta boundary are evaluated at folded coordinates) with height at least
/// rel_threshold times the global maximum. Sorted by decreasing height.
std::vector<Mode> find_modes(const DensityGrid& g, const JointDensity& f, double rel_threshold = 0.1);

/// Coordinate hill-climb of f in the unfolded chart theta_hat in [-pi/2, pi/2),
/// starting from `start` (whose angle may be shifted by +-pi/2 with R -> 1/R).
Mode refine_mode_unfolded(const JointDensity& f, Mode start);

// Workflows -----------------------------------------------------------------

struct EstimateRecord {
  std::string source;
  std::uint64_t seed = 0;
  bool ok = false;
  AnisotropyEstimate estimate;
  SlopeTensor tensor;
  double skewness = 0.0;
  std::string error;
};

struct CoverageResult {
  double p;
  RegionKind kind;
  double fraction;
  ConfidenceRegion region;
};

struct ExperimentReport {
  std::vector<EstimateRecord> records;
  AnisotropyEstimate mean_estimate;
  std::vector<CoverageResult> coverage;
  double seconds = 0.0;
  json summary;
};

std::vector<std::string> run_simulate(const RunConfig& c);
ExperimentReport run_estimate(const RunConfig& c);
ExperimentReport run_montecarlo(const RunConfig& c);
json run_density(const RunConfig& c);
json run_region(const RunConfig& c);
json run_isotest(const RunConfig& c);
ExperimentReport run_scattered(const RunConfig& c);
json run_changedetect(const RunConfig& c);

/// Warnings collected while running (e.g. non-Gaussian inputs).
std::vector<std::string> take_warnings();

}  // namespace anistat
