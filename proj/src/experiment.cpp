#include "anistat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "anistat/error.hpp"
#include "anistat/estimation.hpp"
#include "anistat/interpolation.hpp"
#include "anistat/sampling_distribution.hpp"
#include "anistat/synthesis.hpp"

namespace anistat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / kPi;
constexpr double kRad = kPi / 180.0;

std::mutex g_warn_mutex;
std::vector<std::string> g_warnings;

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  g_warnings.push_back(msg);
}

std::string p_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("config key '" + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw InvalidInput("config key '" + key + "' must be a non-negative integer");
  if (v.is_number_integer() && v.get<long long>() < 0)
    throw InvalidInput("config key '" + key + "' must be non-negative");
  return v.get<std::size_t>();
}

constexpr double kNonGaussianSkew = 1.0;

// Grid plus the sample size used for the statistics (node count for grids,
// point count for scattered inputs).
struct LoadedInput {
  GridField grid;
  std::size_t n_stat = 0;
  double skewness = 0.0;
};

LoadedInput load_input(const std::string& path, const RunConfig& c) {
  LoadedInput in;
  if (std::filesystem::path(path).extension() == ".csv" && is_scattered_csv(path)) {
    const ScatteredSample s = read_scattered_csv(path);
    double max_coord = 0.0;
    std::vector<double> vals;
    for (const auto& p : s) {
      max_coord = std::max({max_coord, p.x, p.y});
      vals.push_back(p.value);
    }
    GridSpec spec{static_cast<std::size_t>(std::floor(max_coord / c.spacing)) + 1, c.spacing};
    in.grid = interpolate_to_grid(s, spec);
    in.n_stat = s.size();
    in.skewness = moments(vals).skewness;
  } else {
    in.grid = read_grid(path);
    in.skewness = field_moments(in.grid).skewness;
  }
  return in;
}

void check_gaussianity(const std::string& source, double skew) {
  if (std::fabs(skew) > kNonGaussianSkew) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", skew);
    warn("input '" + source + "' looks non-Gaussian (sample skewness " + buf +
         "); the sampling distributions assume a Gaussian field");
  }
}

json record_json(const EstimateRecord& r) {
  json j = {{"source", r.source}, {"seed", r.seed}, {"skewness", r.skewness}};
  if (r.ok) {
    j.update(to_json(r.estimate));
    j["Q"] = {r.tensor.q11, r.tensor.q22, r.tensor.q12};
  } else {
    j["flags"] = {"degenerate-sample"};
    j["error"] = r.error;
  }
  return j;
}

AnisotropyEstimate mean_of_records(const std::vector<EstimateRecord>& recs) {
  std::vector<SlopeTensor> qs;
  for (const auto& r : recs)
    if (r.ok) qs.push_back(r.tensor);
  if (qs.empty()) throw DegenerateSample("no valid estimates to average");
  return estimate_from_tensor(mean_tensor(qs));
}

void write_regions(const RunConfig& c, const ConfidenceRegion& r, const std::string& stem) {
  const json meta = output_metadata(c);
  write_region_csv(join(c.out, stem + ".csv"), r, meta);
  write_json(join(c.out, stem + ".geojson"), region_geojson(r, meta));
}

std::string region_stem(const ConfidenceRegion& r) {
  return std::string("region_") + (r.kind == RegionKind::NonParametric ? "np" : "exact") + "_p" + p_label(r.p);
}

std::vector<CoverageResult> coverage_for(const RunConfig& c, const std::vector<EstimateRecord>& recs,
                                         std::size_t n_stat, bool with_exact) {
  std::vector<CoverageResult> out;
  const CovarianceModel model = c.model();
  for (double p : c.p) {
    std::vector<RegionRequest> reqs;
    RegionRequest np;
    np.R = model.aniso.R;
    np.theta = model.aniso.theta;
    np.n = n_stat;
    np.p = p;
    np.rays = c.rays;
    reqs.push_back(np);
    if (with_exact) {
      RegionRequest ex = np;
      ex.kind = RegionKind::ExactWindowed;
      ex.model = model;
      ex.grid = c.grid();
      ex.window_factor = c.window_factor;
      reqs.push_back(ex);
    }
    for (const auto& req : reqs) {
      CoverageResult cr{p, req.kind, 0.0, confidence_region(req)};
      std::size_t inside = 0, total = 0;
      for (const auto& r : recs) {
        if (!r.ok) continue;
        ++total;
        inside += cr.region.contains(r.estimate.R_hat, r.estimate.theta_hat);
      }
      cr.fraction = total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
      if (cr.region.cqq.provenance == CqqProvenance::ExactWindowed && !cr.region.cqq.stable)
        warn(cr.region.cqq.warning);
      out.push_back(std::move(cr));
    }
  }
  return out;
}

json coverage_json(const std::vector<CoverageResult>& cov) {
  json a = json::array();
  for (const auto& c : cov)
    a.push_back({{"p", c.p}, {"kind", region_kind_name(c.kind)}, {"fraction", c.fraction},
                 {"region", region_summary(c.region)}});
  return a;
}

void write_scatter(const RunConfig& c, const std::vector<EstimateRecord>& recs, const std::string& name) {
  std::ostringstream os;
  os << "# " << output_metadata(c).dump() << "\n";
  os << "index,seed,R_hat,theta_hat_deg,q11,q22,q12,ok\n";
  char buf[256];
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", i,
                  static_cast<unsigned long long>(r.seed), r.ok ? r.estimate.R_hat : NAN,
                  r.ok ? r.estimate.theta_hat * kDeg : NAN, r.tensor.q11, r.tensor.q22, r.tensor.q12, r.ok ? 1 : 0);
    os << buf;
  }
  write_text(join(c.out, name), os.str());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// RunConfig ------------------------------------------------------------------

void RunConfig::validate() const {
  parse_family(family);
  if (!(sigma2 > 0.0)) throw InvalidInput("sigma2 must be positive");
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("R must be positive");
  if (!(R_b > 0.0) || !std::isfinite(R_b)) throw InvalidInput("R_b must be positive");
  if (!(R_hat > 0.0) || !std::isfinite(R_hat)) throw InvalidInput("R_hat must be positive");
  if (!std::isfinite(theta_deg) || !std::isfinite(theta_b_deg)) throw InvalidInput("angles must be finite");
  if (!(xi > 0.0)) throw InvalidInput("xi must be positive");
  if (side < 3) throw InvalidInput("side must be at least 3");
  if (!(spacing > 0.0)) throw InvalidInput("spacing must be positive");
  if (p.empty()) throw InvalidInput("at least one confidence level p is required");
  for (double v : p)
    if (!(v > 0.0 && v < 1.0)) throw InvalidInput("confidence levels must lie in (0, 1)");
  if (realizations == 0) throw InvalidInput("realizations must be at least 1");
  if (rays < 360) throw InvalidInput("rays must be at least 360");
  if (!(window_factor > 0.0)) throw InvalidInput("window_factor must be positive");
  if (!(r_min > 0.0 && r_max > r_min)) throw InvalidInput("need 0 < r_min < r_max");
  if (r_points < 3 || theta_points < 4) throw InvalidInput("density grid too coarse");
  if (format != "csv" && format != "grf2") throw InvalidInput("format must be csv or grf2");
  if (subset_size == 0 || subsets == 0 || scattered_points == 0) throw InvalidInput("scattered sizes must be positive");
  if (out.empty()) throw InvalidInput("output directory must not be empty");
  model().validate();
}

CovarianceModel RunConfig::model() const {
  CovarianceModel m;
  m.family = parse_family(family);
  m.sigma2 = sigma2;
  m.nu = nu;
  double r = R;
  double th = theta_deg * kRad;
  canonicalize(r, th);
  m.aniso = {r, th, xi};
  return m;
}

GridSpec RunConfig::grid() const { return {side, spacing}; }

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "command") c.command = get_as<std::string>(v, key);
    else if (key == "family") c.family = get_as<std::string>(v, key);
    else if (key == "sigma2") c.sigma2 = get_as<double>(v, key);
    else if (key == "R") c.R = get_as<double>(v, key);
    else if (key == "theta_deg") c.theta_deg = get_as<double>(v, key);
    else if (key == "xi") c.xi = get_as<double>(v, key);
    else if (key == "nu") c.nu = get_as<double>(v, key);
    else if (key == "side") c.side = get_count(v, key);
    else if (key == "spacing") c.spacing = get_as<double>(v, key);
    else if (key == "n") c.n = get_count(v, key);
    else if (key == "p") c.p = v.is_array() ? get_as<std::vector<double>>(v, key) : std::vector<double>{get_as<double>(v, key)};
    else if (key == "seed") c.seed = get_count(v, key);
    else if (key == "realizations") c.realizations = get_count(v, key);
    else if (key == "threads") c.threads = get_count(v, key);
    else if (key == "exact") c.exact = get_as<bool>(v, key);
    else if (key == "window_factor") c.window_factor = get_as<double>(v, key);
    else if (key == "rays") c.rays = get_count(v, key);
    else if (key == "r_min") c.r_min = get_as<double>(v, key);
    else if (key == "r_max") c.r_max = get_as<double>(v, key);
    else if (key == "r_points") c.r_points = get_count(v, key);
    else if (key == "theta_points") c.theta_points = get_count(v, key);
    else if (key == "scattered_points") c.scattered_points = get_count(v, key);
    else if (key == "subset_size") c.subset_size = get_count(v, key);
    else if (key == "subsets") c.subsets = get_count(v, key);
    else if (key == "R_hat") c.R_hat = get_as<double>(v, key);
    else if (key == "R_b") c.R_b = get_as<double>(v, key);
    else if (key == "theta_b_deg") c.theta_b_deg = get_as<double>(v, key);
    else if (key == "format") c.format = get_as<std::string>(v, key);
    else if (key == "inputs") c.inputs = get_as<std::vector<std::string>>(v, key);
    else if (key == "out") c.out = get_as<std::string>(v, key);
    else if (key == "version") continue;  // written by output_metadata; ignored on re-run
    else throw InvalidInput("unknown config key '" + key + "'");
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"family", c.family},
          {"sigma2", c.sigma2},
          {"R", c.R},
          {"theta_deg", c.theta_deg},
          {"xi", c.xi},
          {"nu", c.nu},
          {"side", c.side},
          {"spacing", c.spacing},
          {"n", c.n},
          {"p", c.p},
          {"seed", c.seed},
          {"realizations", c.realizations},
          {"threads", c.threads},
          {"exact", c.exact},
          {"window_factor", c.window_factor},
          {"rays", c.rays},
          {"r_min", c.r_min},
          {"r_max", c.r_max},
          {"r_points", c.r_points},
          {"theta_points", c.theta_points},
          {"scattered_points", c.scattered_points},
          {"subset_size", c.subset_size},
          {"subsets", c.subsets},
          {"R_hat", c.R_hat},
          {"R_b", c.R_b},
          {"theta_b_deg", c.theta_b_deg},
          {"format", c.format},
          {"inputs", c.inputs},
          {"out", c.out}};
}

json output_metadata(const RunConfig& c, const json& extra) {
  json j = {{"config", config_to_json(c)}, {"version", version()}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

std::vector<std::string> take_warnings() {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  std::vector<std::string> out;
  out.swap(g_warnings);
  return out;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first) first = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first) std::rethrow_exception(first);
}

// Density grids --------------------------------------------------------------

double DensityGrid::mass() const {
  const std::size_t nt = theta_hat.size();
  const double dtheta = (kPi / 2.0) / static_cast<double>(nt);
  double total = 0.0;
  for (std::size_t r = 0; r + 1 < R_hat.size(); ++r) {
    const double dr = R_hat[r + 1] - R_hat[r];
    for (std::size_t t = 0; t < nt; ++t) total += 0.5 * (at(r, t) + at(r + 1, t)) * dr * dtheta;
  }
  return total;
}

DensityGrid evaluate_density(const JointDensity& f, double r_min, double r_max, std::size_t r_points,
                             std::size_t theta_points, std::size_t threads) {
  DensityGrid g;
  g.R_hat.resize(r_points);
  g.theta_hat.resize(theta_points);
  const double lmin = std::log(r_min), lmax = std::log(r_max);
  for (std::size_t r = 0; r < r_points; ++r)
    g.R_hat[r] = std::exp(lmin + (lmax - lmin) * static_cast<double>(r) / static_cast<double>(r_points - 1));
  const double dtheta = (kPi / 2.0) / static_cast<double>(theta_points);
  for (std::size_t t = 0; t < theta_points; ++t) g.theta_hat[t] = -kPi / 4 + (static_cast<double>(t) + 0.5) * dtheta;
  g.density.resize(r_points * theta_points);
  parallel_for(r_points, threads, [&](std::size_t r) {
    for (std::size_t t = 0; t < theta_points; ++t) g.density[r * theta_points + t] = f(g.R_hat[r], g.theta_hat[t]);
  });
  return g;
}

std::vector<Mode> find_modes(const DensityGrid& g, const JointDensity& f, double rel_threshold) {
  const std::size_t nr = g.R_hat.size(), nt = g.theta_hat.size();
  const double dtheta = (kPi / 2.0) / static_cast<double>(nt);
  double gmax = 0.0;
  for (double v : g.density) gmax = std::max(gmax, v);
  std::vector<Mode> modes;
  for (std::size_t r = 1; r + 1 < nr; ++r)
    for (std::size_t t = 0; t < nt; ++t) {
      const double v = g.at(r, t);
      if (v < rel_threshold * gmax || v <= 0.0) continue;
      bool peak = true;
      for (int dr = -1; dr <= 1 && peak; ++dr)
        for (int dt = -1; dt <= 1 && peak; ++dt) {
          if (!dr && !dt) continue;
          const std::size_t rr = r + dr;
          const long tt = static_cast<long>(t) + dt;
          double w;
          if (tt >= 0 && tt < static_cast<long>(nt)) {
            w = g.at(rr, static_cast<std::size_t>(tt));
          } else {
            double R = g.R_hat[rr];
            double th = g.theta_hat[t] + dt * dtheta;
            canonicalize(R, th);
            w = f(R, th);
          }
          if (w > v) peak = false;
        }
      if (peak) modes.push_back({g.R_hat[r], g.theta_hat[t], v});
    }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.height > b.height; });
  return modes;
}

Mode refine_mode_unfolded(const JointDensity& f, Mode start) {
  const auto wrap = [](double th) {
    th = std::remainder(th, kPi);
    return th >= kPi / 2 ? th - kPi : th;
  };
  double l = std::log(start.R_hat);
  double th = wrap(start.theta_hat);
  double best = f(std::exp(l), th);
  double sl = 0.02, st = 0.5 * kRad;
  while (sl > 1e-7) {
    bool moved = false;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        if (!a && !b) continue;
        const double nl = l + a * sl;
        const double nth = wrap(th + b * st);
        const double v = f(std::exp(nl), nth);
        if (v > best) {
          best = v;
          l = nl;
          th = nth;
          moved = true;
        }
      }
    if (!moved) {
      sl *= 0.5;
      st *= 0.5;
    }
  }
  return {std::exp(l), th, best};
}

// Workflows -------------------------------------------------------------------

std::vector<std::string> run_simulate(const RunConfig& c) {
  c.validate();
  const CovarianceModel model = c.model();
  const GridSpec spec = c.grid();
  ensure_directory(c.out);
  std::vector<std::string> files(c.realizations);
  parallel_for(c.realizations, c.threads, [&](std::size_t i) {
    const std::uint64_t seed = c.seed + i;
    const GridField f = generate(model, spec, seed);
    char name[64];
    std::snprintf(name, sizeof name, "field_%05zu.%s", i, c.format == "csv" ? "csv" : "grf2");
    const json meta = output_metadata(c, {{"seed", seed}, {"index", i}});
    files[i] = join(c.out, name);
    if (c.format == "csv") write_grid_csv(files[i], f, meta);
    else write_grid_binary(files[i], f, meta);
  });
  json manifest = output_metadata(c);
  json entries = json::array();
  for (std::size_t i = 0; i < files.size(); ++i)
    entries.push_back({{"index", i}, {"seed", c.seed + i}, {"file", std::filesystem::path(files[i]).filename().string()}});
  manifest["fields"] = entries;
  write_json(join(c.out, "manifest.json"), manifest);
  return files;
}

ExperimentReport run_estimate(const RunConfig& c) {
  c.validate();
  if (c.inputs.empty()) throw InvalidInput("estimate needs at least one input file");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.records.resize(c.inputs.size());
  parallel_for(c.inputs.size(), c.threads, [&](std::size_t i) {
    EstimateRecord& r = rep.records[i];
    r.source = c.inputs[i];
    const LoadedInput in = load_input(c.inputs[i], c);
    r.skewness = in.skewness;
    check_gaussianity(r.source, r.skewness);
    try {
      r.tensor = slope_tensor_estimate(in.grid);
      r.estimate = estimate_from_tensor(r.tensor);
      if (in.n_stat) r.estimate.n_effective = in.n_stat;
      r.ok = true;
    } catch (const DegenerateSample& e) {
      r.error = e.what();
    }
  });
  json ests = json::array();
  for (const auto& r : rep.records) ests.push_back(record_json(r));
  rep.summary = output_metadata(c);
  rep.summary["estimates"] = ests;
  try {
    rep.mean_estimate = mean_of_records(rep.records);
    rep.summary["mean_tensor_estimate"] = to_json(rep.mean_estimate);
  } catch (const DegenerateSample&) {
    rep.summary["mean_tensor_estimate"] = nullptr;
  }
  rep.seconds = seconds_since(t0);
  rep.summary["seconds"] = rep.seconds;
  write_json(join(c.out, "estimates.json"), rep.summary);
  return rep;
}

ExperimentReport run_montecarlo(const RunConfig& c) {
  c.validate();
  if (c.realizations < 100) warn("fewer than 100 realizations; coverage fractions are not meaningful");
  const auto t0 = std::chrono::steady_clock::now();
  const CovarianceModel model = c.model();
  const GridSpec spec = c.grid();
  ExperimentReport rep;
  rep.records.resize(c.realizations);
  parallel_for(c.realizations, c.threads, [&](std::size_t i) {
    EstimateRecord& r = rep.records[i];
    r.seed = c.seed + i;
    r.source = "realization";
    const GridField f = generate(model, spec, r.seed);
    try {
      r.tensor = slope_tensor_estimate(f);
      r.estimate = estimate_from_tensor(r.tensor);
      r.ok = true;
    } catch (const DegenerateSample& e) {
      r.error = e.what();
    }
  });
  rep.mean_estimate = mean_of_records(rep.records);
  const std::size_t n_stat = (spec.side - 2) * (spec.side - 2);
  rep.coverage = coverage_for(c, rep.records, n_stat, c.exact);
  rep.seconds = seconds_since(t0);

  ensure_directory(c.out);
  write_scatter(c, rep.records, "scatter.csv");
  for (const auto& cov : rep.coverage) write_regions(c, cov.region, region_stem(cov.region));
  rep.summary = output_metadata(c);
  rep.summary["n_effective"] = n_stat;
  rep.summary["estimates_ok"] =
      std::count_if(rep.records.begin(), rep.records.end(), [](const EstimateRecord& r) { return r.ok; });
  rep.summary["mean_tensor_estimate"] = to_json(rep.mean_estimate);
  rep.summary["coverage"] = coverage_json(rep.coverage);
  rep.summary["seconds"] = rep.seconds;
  write_json(join(c.out, "report.json"), rep.summary);
  return rep;
}

json run_density(const RunConfig& c) {
  c.validate();
  const CovarianceModel model = c.model();
  const double R = model.aniso.R, th = model.aniso.theta;
  JointDensity f;
  std::string kind;
  if (c.exact) {
    const SlopeTensor q = theoretical_slope_tensor(model);
    const QqqCovariance cqq = cqq_exact(model, c.grid(), c.window_factor);
    if (!cqq.stable) warn(cqq.warning);
    auto rd = std::make_shared<RatioDensity>(q, cqq);
    f = [rd](double Rh, double t) {
      return std::fabs(jacobian_det(Rh, t)) * rd->density(ratios_from_anisotropy(Rh, t));
    };
    kind = "exact-windowed";
  } else {
    if (c.n == 0) throw InvalidInput("density needs n >= 1");
    const std::size_t n = c.n;
    f = [R, th, n](double Rh, double t) { return jpdf_nonparametric(Rh, t, R, th, n); };
    kind = "non-parametric";
  }
  const auto t0 = std::chrono::steady_clock::now();
  const DensityGrid g = evaluate_density(f, c.r_min, c.r_max, c.r_points, c.theta_points, c.threads);
  const auto modes = find_modes(g, f);

  ensure_directory(c.out);
  std::ostringstream os;
  os << "# " << output_metadata(c, {{"kind", kind}, {"density_units", "per unit R_hat per degree"}}).dump() << "\n";
  os << "R_hat,theta_hat_deg,density\n";
  char buf[128];
  for (std::size_t r = 0; r < g.R_hat.size(); ++r)
    for (std::size_t t = 0; t < g.theta_hat.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", g.R_hat[r], g.theta_hat[t] * kDeg, g.at(r, t) * kRad);
      os << buf;
    }
  write_text(join(c.out, "density.csv"), os.str());

  json jm = json::array();
  for (const auto& m : modes) {
    const Mode u = refine_mode_unfolded(f, m);
    jm.push_back({{"R_hat", m.R_hat},
                  {"theta_hat_deg", m.theta_hat * kDeg},
                  {"density_per_deg", m.height * kRad},
                  {"unfolded", {{"R_hat", u.R_hat}, {"theta_hat_deg", u.theta_hat * kDeg}}}});
  }
  json out = output_metadata(c, {{"kind", kind}});
  out["mass"] = g.mass();
  out["mode_count"] = modes.size();
  out["modes"] = jm;
  out["seconds"] = seconds_since(t0);
  write_json(join(c.out, "density.json"), out);
  return out;
}

json run_region(const RunConfig& c) {
  c.validate();
  const CovarianceModel model = c.model();
  ensure_directory(c.out);
  json regions = json::array();
  for (double p : c.p) {
    RegionRequest req;
    req.R = model.aniso.R;
    req.theta = model.aniso.theta;
    req.n = c.n;
    req.p = p;
    req.rays = c.rays;
    const ConfidenceRegion np = confidence_region(req);
    write_regions(c, np, region_stem(np));
    json entry = region_summary(np);
    if (std::fabs(model.aniso.R - 1.0) < 1e-15) entry["isotropy_interval"] = to_json(isotropy_interval(c.n, p));
    regions.push_back(entry);
    if (c.exact) {
      req.kind = RegionKind::ExactWindowed;
      req.model = model;
      req.grid = c.grid();
      req.window_factor = c.window_factor;
      const ConfidenceRegion ex = confidence_region(req);
      if (!ex.cqq.stable) warn(ex.cqq.warning);
      write_regions(c, ex, region_stem(ex));
      regions.push_back(region_summary(ex));
    }
  }
  json out = output_metadata(c);
  out["regions"] = regions;
  write_json(join(c.out, "regions.json"), out);
  return out;
}

json run_isotest(const RunConfig& c) {
  c.validate();
  ensure_directory(c.out);
  json decisions = json::array();
  for (double p : c.p) {
    if (c.inputs.empty()) {
      AnisotropyEstimate e;
      e.R_hat = c.R_hat;
      e.n_effective = c.n;
      decisions.push_back(to_json(isotropy_test(e, p)));
      continue;
    }
    for (const auto& path : c.inputs) {
      const LoadedInput in = load_input(path, c);
      check_gaussianity(path, in.skewness);
      AnisotropyEstimate e = estimate_from_grid(in.grid);
      if (in.n_stat) e.n_effective = in.n_stat;
      json d = to_json(isotropy_test(e, p));
      d["source"] = path;
      d["estimate"] = to_json(e);
      decisions.push_back(d);
    }
  }
  json out = output_metadata(c);
  out["decisions"] = decisions;
  write_json(join(c.out, "isotest.json"), out);
  return out;
}

ExperimentReport run_scattered(const RunConfig& c) {
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const CovarianceModel model = c.model();
  const GridSpec spec = c.grid();
  ScatteredSample sample;
  ensure_directory(c.out);
  if (!c.inputs.empty()) {
    sample = read_scattered_csv(c.inputs.front());
    validate_sample(sample);
  } else {
    const GridField source = generate(model, spec, c.seed);
    sample = subsample_scattered(source, c.scattered_points, c.seed + 1);
    write_scattered_csv(join(c.out, "scattered.csv"), sample, output_metadata(c));
  }
  std::vector<double> vals;
  for (const auto& s : sample) vals.push_back(s.value);
  check_gaussianity(c.inputs.empty() ? "scattered sample" : c.inputs.front(), moments(vals).skewness);

  const auto subsets = resample_subsets(sample, c.subset_size, c.subsets, c.seed + 2);
  ExperimentReport rep;
  rep.records.resize(subsets.size());
  parallel_for(subsets.size(), c.threads, [&](std::size_t i) {
    EstimateRecord& r = rep.records[i];
    r.seed = c.seed + 2;
    r.source = "subset";
    try {
      const GridField g = interpolate_to_grid(subsets[i], spec);
      r.tensor = slope_tensor_estimate(g);
      r.estimate = estimate_from_tensor(r.tensor);
      r.estimate.n_effective = c.subset_size;
      r.ok = true;
    } catch (const DegenerateSample& e) {
      r.error = e.what();
    }
  });
  rep.mean_estimate = mean_of_records(rep.records);
  rep.coverage = coverage_for(c, rep.records, c.subset_size, false);
  rep.seconds = seconds_since(t0);
  write_scatter(c, rep.records, "subset_estimates.csv");
  for (const auto& cov : rep.coverage) write_regions(c, cov.region, region_stem(cov.region));
  rep.summary = output_metadata(c);
  rep.summary["sample_points"] = sample.size();
  rep.summary["mean_tensor_estimate"] = to_json(rep.mean_estimate);
  rep.summary["coverage"] = coverage_json(rep.coverage);
  rep.summary["seconds"] = rep.seconds;
  write_json(join(c.out, "report.json"), rep.summary);
  return rep;
}

json run_changedetect(const RunConfig& c) {
  c.validate();
  ensure_directory(c.out);
  AnisotropyEstimate est[2];
  std::string source[2];
  double skew[2];
  if (c.inputs.size() == 2) {
    for (int k = 0; k < 2; ++k) {
      source[k] = c.inputs[k];
      const LoadedInput in = load_input(source[k], c);
      skew[k] = in.skewness;
      est[k] = estimate_from_grid(in.grid);
      if (in.n_stat) est[k].n_effective = in.n_stat;
    }
  } else if (c.inputs.empty()) {
    // Synthetic pair: scenario A uses (R, theta_deg), scenario B (R_b, theta_b_deg).
    CovarianceModel ma = c.model();
    CovarianceModel mb = ma;
    double rb = c.R_b, tb = c.theta_b_deg * kRad;
    canonicalize(rb, tb);
    mb.aniso.R = rb;
    mb.aniso.theta = tb;
    const GridField fa = generate(ma, c.grid(), c.seed);
    const GridField fb = generate(mb, c.grid(), c.seed + 1);
    const json meta = output_metadata(c);
    write_grid_csv(join(c.out, "scenario_a.csv"), fa, meta);
    write_grid_csv(join(c.out, "scenario_b.csv"), fb, meta);
    source[0] = "scenario_a.csv";
    source[1] = "scenario_b.csv";
    skew[0] = field_moments(fa).skewness;
    skew[1] = field_moments(fb).skewness;
    est[0] = estimate_from_grid(fa);
    est[1] = estimate_from_grid(fb);
  } else {
    throw InvalidInput("changedetect needs exactly two inputs (or none for the synthetic pair)");
  }
  for (int k = 0; k < 2; ++k) check_gaussianity(source[k], skew[k]);

  const ChangeDecision d = change_detect(est[0], est[0].n_effective, est[1], est[1].n_effective, c.p.front(), c.rays);
  write_regions(c, d.region_a, "region_a");
  write_regions(c, d.region_b, "region_b");
  json out = output_metadata(c);
  out["p"] = c.p.front();
  out["a"] = to_json(est[0]);
  out["a"]["source"] = source[0];
  out["a"]["skewness"] = skew[0];
  out["b"] = to_json(est[1]);
  out["b"]["source"] = source[1];
  out["b"]["skewness"] = skew[1];
  out["regions_intersect"] = d.regions_intersect;
  out["significant_change"] = d.significant_change;
  write_json(join(c.out, "decision.json"), out);
  return out;
}

}  // namespace anistat
