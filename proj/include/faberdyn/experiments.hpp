#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "faberdyn/config.hpp"

namespace faberdyn {

/// Numeric table written as CSV (comma separated, '.' decimal, header row, LF).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  std::string to_csv() const;
};

struct ExperimentResult {
  std::vector<Table> tables;
  /// Number of polynomials per step for each propagator used.
  std::map<std::string, int> polynomial_orders;
  /// Scalar findings (fits, errors, tau*).
  std::map<std::string, double> summary;
  /// Extra text outputs keyed by file name (e.g. records.jsonl).
  std::map<std::string, std::string> text_files;
};

struct ExperimentInfo {
  std::string name;
  /// What the emitted data plots.
  std::string figure;
  /// Defaults applied to keys the user did not set.
  std::map<std::string, std::string> defaults;
  std::function<ExperimentResult(const Config&, unsigned threads)> run;
};

/// All experiments in a fixed order.
const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(const std::string& name);

/// Config with the experiment defaults filled in for keys not set explicitly.
Config with_experiment_defaults(const Config& config);

struct RunReport {
  std::string output_dir;
  std::vector<std::string> files;
  ExperimentResult result;
  double wall_seconds = 0.0;
};

/// Run the configured experiment and write its CSV tables plus manifest.json
/// into the output directory. Throws ConfigError for invalid configuration
/// and NumericalError (or InvalidArgument) for failures inside a module.
RunReport run_experiment(const Config& config, unsigned threads);

}  // namespace faberdyn
