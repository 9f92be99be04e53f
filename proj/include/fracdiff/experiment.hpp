#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fracdiff/grids.hpp"
#include "fracdiff/random_field.hpp"

namespace fracdiff {

enum class ExperimentKind {
  identities,
  kernel,
  solve,
  estimate_ratio,
  sharp_check,
  ap_weights,
};

std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

struct GridSpec {
  int dim = 1;
  double box_length = 40.0;
  int n_points = 512;
  int n_steps = 512;
  double t_end = 8.0;
};

/// Declarative description of one verification run. Weight exponents are
/// stored as fractions of the class boundary: gamma1 = scale * d (p - 1),
/// gamma2 = scale * (q - 1), so every tuple stays inside its class for
/// scale in [0, 1). The ap-weights kind probes absolute exponents instead.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::estimate_ratio;
  std::vector<double> alphas = {0.5, 1.0, 1.5};
  std::vector<double> betas = {0.3, 0.7};  // identities only
  std::vector<std::pair<double, double>> pq = {{2.0, 2.0}, {3.0, 2.0}, {2.0, 3.0}};
  std::vector<double> gamma1_scales = {0.0, 0.4};
  std::vector<double> gamma2_scales = {0.0, 0.4};
  std::vector<double> horizons = {1.0, 2.0, 4.0, 8.0};
  GridSpec grid;
  EnsembleSpec ensemble;
  double p0 = 2.0;                     // sharp-check exponent
  std::vector<double> ap_gammas = {-1.2, -0.5, 0.0, 0.5, 0.9, 1.0, 1.5};
  double ap_p = 2.0;
  int refine = 0;                      // grid-doubling levels
  int threads = 0;
  std::string out_dir = "out";
};

/// Kind-specific defaults (grid sizes, horizons, ensembles).
ExperimentConfig default_config(ExperimentKind kind);

ExperimentConfig config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// One measurement row: ordered (name, value) pairs, one row per
/// (tuple, member) in the emitted CSV.
struct Record {
  std::vector<std::pair<std::string, double>> fields;
  void add(const std::string& name, double value) { fields.emplace_back(name, value); }
  double get(const std::string& name) const;
};

struct EstimateReport {
  std::string kind;
  nlohmann::ordered_json config_echo;
  std::vector<Record> records;
  nlohmann::ordered_json summary;
  double runtime_seconds = 0.0;  // excluded from reproducibility comparisons
  std::string version;
};

EstimateReport run_experiment(const ExperimentConfig& config);

/// Writes report.json, records.csv and summary.txt under out_dir; re-running
/// with the same config reproduces the records bit-exactly (timing fields
/// live in a separate JSON block).
void emit_report(const EstimateReport& report, const std::string& out_dir);

/// Parses report.json back; runtime is not restored.
EstimateReport parse_report(const std::string& out_dir);

}  // namespace fracdiff
