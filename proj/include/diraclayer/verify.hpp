#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "diraclayer/geometry.hpp"

namespace diraclayer {

// One identity check: verdict is PASS iff residual <= tolerance. Controls that
// must fail encode their expectation as residual = max(0, floor - measured).
struct Check {
  std::string id;
  std::string ref;  // anchor of the statement the residual certifies
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return residual <= tolerance; }
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string suite;
  std::string geometry;
  std::vector<std::pair<std::string, double>> params;  // insertion ordered
  std::vector<Check> checks;
  std::vector<Table> tables;

  bool all_pass() const;
  const Check* find(const std::string& id) const;
  // Deterministic given config and seed; the trailing timestamp field is the
  // only run-to-run difference and can be omitted for byte comparisons.
  std::string to_json(bool with_timestamp = true) const;
  void write_json(const std::string& path, bool with_timestamp = true) const;
  void write_csv(const std::string& prefix) const;  // one file per table
  void write_svg(const std::string& path) const;    // residual vs resolution
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int dim = 2;
  std::string geometry;                // circle | ellipse | bean | sphere
  std::map<std::string, double> geo;   // preset parameters (a, b, r)
  double z = 0.3;
  double m = 1.0;
  double c_lambda = 1.0;
  int n = 128;                         // 2D mode count
  int level = 2;                       // 3D grid level
  std::vector<int> resolutions;        // order sweeps / convergence abscissae
  std::string suite = "full";          // full | lean (skip dense eigensolves)
  unsigned long long seed = 7;
  std::string out, csv_prefix, svg;
  int threads = 0;

  void validate() const;               // throws ConfigError
  std::string geometry_or_default() const;
  Curve2D make_curve() const;
  std::vector<int> sweep_points() const;  // resolutions with dim defaults
};

Report run_suite_2d(const RunConfig& cfg);
Report run_suite_3d(const RunConfig& cfg);
// Residual vs resolution for the cross-resolution check subset, with fitted
// decay rates; resolutions are N values (dim 2) or grid levels (dim 3).
Report convergence_sweep(const RunConfig& cfg, const std::vector<int>& resolutions);

}  // namespace diraclayer
