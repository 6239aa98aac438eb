#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "curveflow/flow_solver.hpp"
#include "curveflow/ladder.hpp"
#include "curveflow/monitors.hpp"
#include "curveflow/radial_oracle.hpp"

namespace curveflow {

using Json = nlohmann::ordered_json;

/// Finite values as numbers; inf and nan as the strings "inf", "-inf", "nan".
Json json_number(double v);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// `# t=<t> h=<h> L=<L>` followed by rows `x_1,...,x_d,u`.
std::string snapshot_csv(const Grid& grid, std::span<const double> u, double t, double L);
/// Radial profile in the same layout with the single coordinate r.
std::string radial_csv(double dr, std::span<const double> u, double t, double L);
/// Rows `x_1,...,x_d,inside,boundary`.
std::string domain_csv(const Grid& grid, const DomainSlice& slice);

/// Snapshot file contents back into (t, h, L, values). Rows must follow the grid order.
struct SnapshotFile {
  double t = 0.0;
  double h = 0.0;
  double L = 0.0;
  std::vector<std::vector<double>> coords;
  std::vector<double> u;
};
SnapshotFile read_snapshot_csv(const std::filesystem::path& path);

Json to_json(const MonitorReport& r);
Json ladder_report(const LadderResult& result);
Json u_min_series(const RadialRunResult& r);
Json grid_json(const Grid& g);
Grid grid_from_json(const Json& j);

/// Output directory that remembers what it wrote, for the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write_text(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const Json& j);
  /// Adds {"files": [{path, sha256, bytes}]} and writes manifest.json.
  void write_manifest(Json manifest);

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

/// Fixed-width file names for snapshot k.
std::string snapshot_name(const std::string& stem, std::size_t k);

}  // namespace curveflow
