#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "anistat/error.hpp"
#include "anistat/experiment.hpp"

using namespace anistat;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

void add_options(CLI::App* sub, RunConfig& c, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON run configuration; its keys override flags");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("inputs,--input", c.inputs, "Input files (grid CSV/GRF2 or scattered CSV)");
  sub->add_option("--family", c.family, "Covariance family: gaussian | matern");
  sub->add_option("--sigma2", c.sigma2, "Field variance");
  sub->add_option("--R", c.R, "Anisotropy ratio xi2/xi1");
  sub->add_option("--theta", c.theta_deg, "Orientation in degrees");
  sub->add_option("--xi", c.xi, "Correlation length xi1");
  sub->add_option("--nu", c.nu, "Matern smoothness (integer or half-integer > 1)");
  sub->add_option("--side", c.side, "Grid nodes per axis");
  sub->add_option("--spacing", c.spacing, "Lattice spacing");
  sub->add_option("--n", c.n, "Sample size N");
  sub->add_option("--p", c.p, "Confidence level(s)");
  sub->add_option("--seed", c.seed, "Base seed; realization i uses seed + i");
  sub->add_option("--realizations,-M", c.realizations, "Number of realizations");
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)");
  sub->add_flag("--exact", c.exact, "Also use the windowed exact CQQ");
  sub->add_option("--window-factor", c.window_factor, "CQQ window half-width in units of xi_max");
  sub->add_option("--rays", c.rays, "Rays used to trace region contours (>= 360)");
  sub->add_option("--r-min", c.r_min, "Density grid: smallest R_hat");
  sub->add_option("--r-max", c.r_max, "Density grid: largest R_hat");
  sub->add_option("--r-points", c.r_points, "Density grid: R_hat points (log-spaced)");
  sub->add_option("--theta-points", c.theta_points, "Density grid: theta_hat points");
  sub->add_option("--scattered-points", c.scattered_points, "Scattered sample size");
  sub->add_option("--subset-size", c.subset_size, "Points per resampled subset");
  sub->add_option("--subsets", c.subsets, "Number of resampled subsets");
  sub->add_option("--R-hat", c.R_hat, "Estimate to test for isotropy");
  sub->add_option("--R-b", c.R_b, "Synthetic change detection: second scenario ratio");
  sub->add_option("--theta-b", c.theta_b_deg, "Synthetic change detection: second scenario angle (degrees)");
  sub->add_option("--format", c.format, "Field output format: csv | grf2");
}

void print_coverage(const ExperimentReport& rep) {
  for (const auto& cov : rep.coverage)
    std::printf("coverage p=%g %s: %.4f\n", cov.p, region_kind_name(cov.kind).c_str(), cov.fraction);
  std::printf("mean-tensor estimate: R_hat=%.6g theta_hat=%.4g deg (%.2f s)\n", rep.mean_estimate.R_hat,
              rep.mean_estimate.theta_hat * 180.0 / 3.141592653589793, rep.seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropy statistics of 2D Gaussian random fields"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;
  const char* names[] = {"simulate", "estimate", "montecarlo", "density", "region", "isotest", "scattered", "changedetect"};
  const char* help[] = {"Generate Gaussian random field realizations",
                        "Estimate (R_hat, theta_hat) from grid or scattered files",
                        "Monte Carlo coverage experiment",
                        "Joint density grid of (R_hat, theta_hat)",
                        "Confidence region contours",
                        "Isotropy interval and test",
                        "Scattered-data subsampling experiment",
                        "Two-dataset change detection"};
  for (int k = 0; k < 8; ++k) add_options(app.add_subcommand(names[k], help[k]), cfg, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  int rc = 0;
  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) cfg = config_from_json(read_json(config_path), cfg);
    const std::string& cmd = cfg.command;
    if (cmd == "simulate") {
      const auto files = run_simulate(cfg);
      std::printf("wrote %zu field(s) to %s\n", files.size(), cfg.out.c_str());
    } else if (cmd == "estimate") {
      std::printf("%s\n", run_estimate(cfg).summary.dump(2).c_str());
    } else if (cmd == "montecarlo") {
      print_coverage(run_montecarlo(cfg));
    } else if (cmd == "density") {
      std::printf("%s\n", run_density(cfg).dump(2).c_str());
    } else if (cmd == "region") {
      std::printf("%s\n", run_region(cfg).dump(2).c_str());
    } else if (cmd == "isotest") {
      std::printf("%s\n", run_isotest(cfg).dump(2).c_str());
    } else if (cmd == "scattered") {
      print_coverage(run_scattered(cfg));
    } else if (cmd == "changedetect") {
      std::printf("%s\n", run_changedetect(cfg).dump(2).c_str());
    }
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: invalid configuration: %s\n", e.what());
    rc = kExitInvalid;
  } catch (const InfeasibleSampleSize& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    rc = kExitInfeasible;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    rc = kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    rc = 1;
  }
  for (const auto& w : take_warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return rc;
}
