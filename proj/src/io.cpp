#include "curveflow/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace fs = std::filesystem;

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  if (std::isnan(v)) {
    out += "nan";
  } else if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  }
}

std::string header(double t, double h, double L) {
  std::string s = "# t=";
  append_number(s, t);
  s += " h=";
  append_number(s, h);
  s += " L=";
  append_number(s, L);
  s += '\n';
  return s;
}

Json series_json(const std::vector<std::pair<double, double>>& s) {
  Json arr = Json::array();
  for (const auto& [t, v] : s) arr.push_back(Json::array({json_number(t), json_number(v)}));
  return arr;
}

}  // namespace

Json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string snapshot_csv(const Grid& grid, std::span<const double> u, double t, double L) {
  if (u.size() != grid.size()) throw ConfigError("snapshot size does not match the grid");
  std::string s = header(t, grid.h(), L);
  s.reserve(s.size() + grid.size() * 24 * (grid.dim() + 1));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.coords(i);
    for (int a = 0; a < grid.dim(); ++a) {
      append_number(s, x[a]);
      s += ',';
    }
    append_number(s, u[i]);
    s += '\n';
  }
  return s;
}

std::string radial_csv(double dr, std::span<const double> u, double t, double L) {
  std::string s = header(t, dr, L);
  for (std::size_t i = 0; i < u.size(); ++i) {
    append_number(s, static_cast<double>(i) * dr);
    s += ',';
    append_number(s, u[i]);
    s += '\n';
  }
  return s;
}

std::string domain_csv(const Grid& grid, const DomainSlice& slice) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.coords(i);
    for (int a = 0; a < grid.dim(); ++a) {
      append_number(s, x[a]);
      s += ',';
    }
    s += slice.inside[i] ? "1," : "0,";
    s += slice.boundary[i] ? "1\n" : "0\n";
  }
  return s;
}

SnapshotFile read_snapshot_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot " + path.string());
  SnapshotFile out;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (std::sscanf(line.c_str(), "# t=%lf h=%lf L=%lf", &out.t, &out.h, &out.L) == 3) {
        have_header = true;
      }
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed value");
      }
    }
    if (row.size() < 2) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": too few columns");
    }
    out.u.push_back(row.back());
    row.pop_back();
    out.coords.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError(path.string() + ": missing '# t= h= L=' header");
  return out;
}

Json to_json(const MonitorReport& r) {
  Json j;
  j["monitor"] = r.name;
  j["tolerance"] = json_number(r.tolerance);
  j["baseline"] = json_number(r.baseline);
  j["series"] = series_json(r.series);
  j["worst_violation"] = json_number(r.worst_violation);
  j["passed"] = r.passed;
  if (r.vacuous) j["vacuous"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.name == "holder") {
    j["qualifying_pairs"] = r.qualifying_pairs;
    j["qualifying_time_pairs"] = r.qualifying_time_pairs;
    j["gradient_bound"] = json_number(r.gradient_bound);
    j["time_window"] = json_number(r.time_window);
  }
  return j;
}

Json ladder_report(const LadderResult& result) {
  Json arr = Json::array();
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const RunResult& run = result.runs[k];
    Json e;
    e["L"] = run.L;
    e["escape_time"] = run.escape_time ? Json(*run.escape_time) : Json(nullptr);
    e["stop_reason"] = to_string(run.stop_reason);
    // Row k compares this ceiling with the next one up.
    if (k < result.table.size()) {
      const StabilizationRow& row = result.table[k];
      e["compared_with_L"] = row.L_high;
      e["stabilization_max_diff"] = series_json(row.series);
      e["threshold"] = row.threshold;
      e["stabilized"] = row.stabilized;
    } else {
      e["stabilization_max_diff"] = Json::array();
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

Json u_min_series(const RadialRunResult& r) {
  Json j;
  j["dim"] = r.dim;
  j["dr"] = r.dr;
  j["L"] = r.L;
  j["stop_reason"] = to_string(r.stop_reason);
  j["escape_time"] = r.escape_time ? Json(*r.escape_time) : Json(nullptr);
  j["u_min"] = series_json(r.u_min);
  return j;
}

Json grid_json(const Grid& g) {
  Json j;
  j["dim"] = g.dim();
  Json hw = Json::array(), n = Json::array();
  for (int a = 0; a < g.dim(); ++a) {
    hw.push_back(g.half_width(a));
    n.push_back(g.n(a));
  }
  j["half_widths"] = hw;
  j["nodes"] = n;
  j["h"] = g.h();
  return j;
}

Grid grid_from_json(const Json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const auto hw = j.at("half_widths").get<std::vector<double>>();
    const auto n = j.at("nodes").get<std::vector<int>>();
    return Grid::box(dim, hw, n);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed grid description: ") + e.what());
  }
}

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw ConfigError("cannot create output directory " + root_.string() + ": " + ec.message());
}

void OutputDir::write_text(const std::string& name, const std::string& text) {
  const fs::path p = root_ / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + p.string());
  files_.push_back(name);
}

void OutputDir::write_json(const std::string& name, const Json& j) {
  write_text(name, j.dump(2) + "\n");
}

void OutputDir::write_manifest(Json manifest) {
  Json files = Json::array();
  for (const auto& name : files_) {
    const fs::path p = root_ / name;
    files.push_back({{"path", name},
                     {"sha256", sha256_file(p)},
                     {"bytes", static_cast<std::uint64_t>(fs::file_size(p))}});
  }
  manifest["files"] = files;
  const fs::path p = root_ / "manifest.json";
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << manifest.dump(2) << "\n";
}

std::string snapshot_name(const std::string& stem, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04zu.csv", k);
  return stem + buf;
}

}  // namespace curveflow
