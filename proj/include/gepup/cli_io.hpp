#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gepup/bench.hpp"

namespace gepup {

/// Bad or missing configuration; the message names the offending key.
class ConfigParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string case_id;
  double re = 100.0;
  int degree = 3;
  std::array<int, 2> base_cells{1, 1};
  int level = 3;
  TableauId tableau = TableauId::ARK4;
  double courant = 0.8;
  double t0 = 0.0;
  double t_end = 1.0;
  double dt_max = 0.1;
  std::string output_dir = "out";
  int snapshot_interval = 0;  // steps between VTK snapshots; 0 writes only the final one
  int rebuild_interval = 50;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;

  bool operator==(const RunConfig&) const = default;
};

/// Parses `gepup run` flags (without the program and subcommand names).
/// Required: --case, --degree, --level, --t-end.
RunConfig parse_config(const std::vector<std::string>& args);
/// Flags that parse back to the same configuration.
std::vector<std::string> serialize(const RunConfig& config);

struct ConvergeConfig {
  std::string case_id;
  double re = 100.0;
  int degree = 3;
  std::vector<int> levels;
  TableauId tableau = TableauId::ARK4;
  double courant = 0.8;
  double t_end = 1.0;
  int rebuild_interval = 50;
  std::string output = "convergence.csv";

  bool operator==(const ConvergeConfig&) const = default;
};

/// Parses `gepup converge` flags. Required: --case, --degree, --levels.
ConvergeConfig parse_converge_config(const std::vector<std::string>& args);

struct VtkFields {
  const VelocityField* velocity = nullptr;
  const Vector* pressure = nullptr;
};

/// Legacy ASCII VTK unstructured grid: every Q_k cell becomes k x k bilinear
/// sub-quads through the support points. Point data: velocity, pressure,
/// vorticity and divergence (element gradients averaged at shared points).
void write_vtk(const FeSpace& space, const VtkFields& fields, const std::filesystem::path& path,
               double time = 0.0);

/// Nodal average of the scalar curl and of the divergence.
void nodal_curl_div(const FeSpace& space, const VelocityField& U, Vector& curl, Vector& div);

void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path);

/// Streams one monitor row per step.
class MonitorCsvWriter {
 public:
  explicit MonitorCsvWriter(const std::filesystem::path& path);
  void write(const MonitorSample& m);

 private:
  std::ofstream out_;
};

}  // namespace gepup
