#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pspec/bounds.hpp"
#include "pspec/shapes.hpp"

namespace pspec {

struct NodalStudy {
  ShapeSpec shape;
  double p = 2.0;
  std::vector<double> scales{0.5, 1.0, 2.0};
  double h = 1.0 / 64.0;
};

struct CapacityStudy {
  ShapeSpec shape;
  double gamma = 0.5;
  double p = 1.5;
  double h = 1.0 / 32.0;
};

struct RunConfig {
  std::vector<ShapeSpec> catalog;
  std::vector<double> ps{1.5, 2.0, 3.0};
  double h = 1.0 / 64.0;
  double capacity_h = 1.0 / 32.0;
  std::vector<BoundId> bounds;  // empty selects all
  double gamma = 0.5;
  double alpha = 0.5;
  std::string output_dir = ".";
  bool write_json = true;
  bool write_csv = true;
  int threads = 0;
  std::vector<NodalStudy> nodal;
  std::vector<CapacityStudy> capacity;
};

// JSON keys: catalog ("standard" or a list of names / shape objects), ps, h,
// capacity_h, bounds ("all" or a list of ids), gamma, alpha, output_dir, formats,
// threads, studies {nodal: [...], capacity: [...]}. Missing keys keep the defaults;
// a missing catalog selects the standard one. Throws ConfigParse.
RunConfig parse_config(const std::string& text);
// Throws IoError when the file cannot be read.
RunConfig load_config(const std::string& path);

struct RunSummary {
  int exit_status = 0;  // 0 iff nothing failed and no solver error occurred
  bool partial = false;
  std::size_t reports = 0;
  std::size_t satisfied = 0;
  std::size_t violations = 0;
  std::size_t errors = 0;
  std::size_t skipped = 0;
};

// Runs the suite and studies and writes report.json, report.csv and one
// eigen_<shape>_<p>.json per solved pair into output_dir. Throws IoError.
RunSummary run(const RunConfig& config);

// One line per built-in shape: label, connectivity, convexity, parameters.
std::string describe_catalog();

}  // namespace pspec
