#include "anistat/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "anistat/error.hpp"

namespace anistat {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_directory(parent.string());
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, const std::string& path, std::size_t line) {
  const std::string t = trim(token);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw IoError(path + ":" + std::to_string(line) + ": cannot parse number '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_metadata_line(std::ostream& out, const json& metadata) {
  if (!metadata.empty()) out << "# " << metadata.dump() << "\n";
}

json parse_metadata_line(const std::string& line, const std::string& path) {
  const std::string body = trim(line.substr(1));
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw IoError(path + ":1: malformed metadata line: " + e.what());
  }
}

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& path) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw IoError(path + ": truncated GRF2 file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

std::string version() { return ANISTAT_VERSION; }

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_grid_csv(const std::string& path, const GridField& field, const json& metadata) {
  field.validate();
  json meta = metadata;
  meta["side"] = field.spec.side;
  meta["spacing"] = field.spec.spacing;
  auto out = open_out(path);
  write_metadata_line(out, meta);
  const std::size_t n = field.spec.side;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << (field.valid(i, j) ? fmt(field.at(i, j)) : "nan");
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

GridField read_grid_csv(const std::string& path, json* metadata) {
  auto in = open_in(path);
  json meta = json::object();
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (lineno == 1) meta = parse_metadata_line(t, path);
      continue;
    }
    std::vector<double> row;
    for (const auto& tok : split(t)) row.push_back(parse_number(tok, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                    " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no grid rows");
  if (rows.size() != rows.front().size())
    throw IoError(path + ": grid is " + std::to_string(rows.size()) + " x " + std::to_string(rows.front().size()) +
                  ", expected square");
  GridField f;
  f.spec.side = rows.size();
  f.spec.spacing = meta.value("spacing", 1.0);
  f.values.reserve(f.spec.size());
  bool any_nan = false;
  for (const auto& r : rows)
    for (double v : r) {
      any_nan |= std::isnan(v);
      f.values.push_back(v);
    }
  if (any_nan) {
    f.mask.resize(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      f.mask[k] = !std::isnan(f.values[k]);
      if (!f.mask[k]) f.values[k] = 0.0;
    }
  }
  f.validate();
  if (metadata) *metadata = meta;
  return f;
}

void write_grid_binary(const std::string& path, const GridField& field, const json& metadata) {
  field.validate();
  {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write("GRF2", 4);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.spec.side));
    put_le<double>(out, field.spec.spacing);
    for (std::size_t k = 0; k < field.values.size(); ++k)
      put_le<double>(out, field.mask.empty() || field.mask[k] ? field.values[k] : NAN);
    if (!out) throw IoError("write failed for '" + path + "'");
  }
  json meta = metadata;
  meta["side"] = field.spec.side;
  meta["spacing"] = field.spec.spacing;
  write_json(path + ".json", meta);
}

GridField read_grid_binary(const std::string& path, json* metadata) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GRF2", 4) != 0) throw IoError(path + ": missing GRF2 magic");
  GridField f;
  f.spec.side = get_le<std::uint32_t>(in, path);
  f.spec.spacing = get_le<double>(in, path);
  f.values.resize(f.spec.size());
  bool any_nan = false;
  for (auto& v : f.values) {
    v = get_le<double>(in, path);
    any_nan |= std::isnan(v);
  }
  if (any_nan) {
    f.mask.resize(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      f.mask[k] = !std::isnan(f.values[k]);
      if (!f.mask[k]) f.values[k] = 0.0;
    }
  }
  f.validate();
  if (metadata) *metadata = std::filesystem::exists(path + ".json") ? read_json(path + ".json") : json::object();
  return f;
}

GridField read_grid(const std::string& path, json* metadata) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".grf2" || ext == ".bin") return read_grid_binary(path, metadata);
  return read_grid_csv(path, metadata);
}

void write_scattered_csv(const std::string& path, const ScatteredSample& sample, const json& metadata) {
  auto out = open_out(path);
  write_metadata_line(out, metadata);
  out << "x,y,value\n";
  for (const auto& p : sample) out << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.value) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

ScatteredSample read_scattered_csv(const std::string& path, json* metadata) {
  auto in = open_in(path);
  json meta = json::object();
  ScatteredSample s;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (lineno == 1) meta = parse_metadata_line(t, path);
      continue;
    }
    if (!header) {
      std::string h;
      for (char c : t)
        if (c != ' ') h.push_back(c);
      if (h != "x,y,value") throw IoError(path + ":" + std::to_string(lineno) + ": expected header 'x,y,value'");
      header = true;
      continue;
    }
    const auto toks = split(t);
    if (toks.size() != 3)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected 3 columns, found " + std::to_string(toks.size()));
    ScatteredPoint p{parse_number(toks[0], path, lineno), parse_number(toks[1], path, lineno),
                     parse_number(toks[2], path, lineno)};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.value))
      throw IoError(path + ":" + std::to_string(lineno) + ": non-finite value");
    s.push_back(p);
  }
  if (!header) throw IoError(path + ": missing 'x,y,value' header");
  if (metadata) *metadata = meta;
  return s;
}

bool is_scattered_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    return t.rfind("x,", 0) == 0;
  }
  return false;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path + ": malformed JSON: " + e.what());
  }
}

json to_json(const AnisotropyEstimate& e) {
  return {{"R_hat", e.R_hat}, {"theta_hat_deg", e.theta_hat * kDeg}, {"n_effective", e.n_effective}, {"flags", e.flags}};
}

json to_json(const IsotropyInterval& i) {
  return {{"p", i.p}, {"n", i.n}, {"lower", i.lower}, {"upper", i.upper}};
}

json to_json(const IsotropyDecision& d) {
  return {{"reject_isotropy", d.reject_isotropy}, {"R_hat", d.R_hat}, {"interval", to_json(d.interval)}};
}

json region_summary(const ConfidenceRegion& r) {
  return {{"kind", region_kind_name(r.kind)},
          {"p", r.p},
          {"R", r.R},
          {"theta_deg", r.theta * kDeg},
          {"n", r.n},
          {"vertices", r.contour.size()},
          {"truncated", r.truncated},
          {"skipped_rays", r.skipped_rays},
          {"R_hat_min", r.min_R_hat()},
          {"R_hat_max", r.max_R_hat()},
          {"cqq_stable", r.cqq.stable}};
}

void write_region_csv(const std::string& path, const ConfidenceRegion& r, const json& metadata) {
  auto out = open_out(path);
  json meta = metadata;
  meta["region"] = region_summary(r);
  write_metadata_line(out, meta);
  out << "R_hat,theta_hat_deg,qd,qo\n";
  for (std::size_t k = 0; k < r.contour.size(); ++k)
    out << fmt(r.contour[k].R_hat) << ',' << fmt(r.contour[k].theta_hat * kDeg) << ',' << fmt(r.ratio_polygon[k][0])
        << ',' << fmt(r.ratio_polygon[k][1]) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

json region_geojson(const ConfidenceRegion& r, const json& metadata) {
  json ring = json::array();
  const Polygon poly = r.embedded_polygon();
  for (const auto& p : poly) ring.push_back({p[0], p[1]});
  if (!poly.empty()) ring.push_back({poly.front()[0], poly.front()[1]});
  json props = metadata;
  props["region"] = region_summary(r);
  props["chart"] = "x = ln(R_hat) cos(2 theta_hat), y = ln(R_hat) sin(2 theta_hat)";
  return {{"type", "Feature"}, {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}}, {"properties", props}};
}

}  // namespace anistat
