#pragma once

#include <string>

#include <json.hpp>

#include "anistat/estimation.hpp"
#include "anistat/grid.hpp"
#include "anistat/inference.hpp"

namespace anistat {

using json = nlohmann::json;

/// Library version string.
std::string version();

/// Grid CSV: optional first line "# {json metadata}", then one comma-separated
/// row per grid row (row 0 = y = 0). Masked nodes are written as "nan". The
/// spacing is taken from metadata key "spacing" (default 1).
void write_grid_csv(const std::string& path, const GridField& field, const json& metadata = json::object());
GridField read_grid_csv(const std::string& path, json* metadata = nullptr);

/// GRF2 binary: "GRF2", u32 side, f64 spacing, side^2 f64 values, all
/// little-endian. Metadata goes to a sidecar "<path>.json".
void write_grid_binary(const std::string& path, const GridField& field, const json& metadata = json::object());
GridField read_grid_binary(const std::string& path, json* metadata = nullptr);

/// Dispatches on extension: .grf2 / .bin binary, anything else CSV.
GridField read_grid(const std::string& path, json* metadata = nullptr);

/// Scattered CSV with header "x,y,value" (optionally preceded by a "# {json}" line).
void write_scattered_csv(const std::string& path, const ScatteredSample& sample, const json& metadata = json::object());
ScatteredSample read_scattered_csv(const std::string& path, json* metadata = nullptr);

/// True when the first non-comment line of a CSV is the scattered header.
bool is_scattered_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);
void ensure_directory(const std::string& dir);

json to_json(const AnisotropyEstimate& e);
json to_json(const IsotropyInterval& i);
json to_json(const IsotropyDecision& d);
json region_summary(const ConfidenceRegion& r);

/// Vertex CSV: R_hat,theta_hat_deg,qd,qo.
void write_region_csv(const std::string& path, const ConfidenceRegion& r, const json& metadata);
/// GeoJSON Feature whose polygon lives in the (ln R cos 2theta, ln R sin 2theta) chart.
json region_geojson(const ConfidenceRegion& r, const json& metadata);

}  // namespace anistat
