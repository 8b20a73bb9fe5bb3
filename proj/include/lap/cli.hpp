#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace lap::cli {

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_criteria = 3, exit_holes = 4 };

inline constexpr const char* kVersion = "0.4.0";
inline constexpr const char* kTableSchema = "lap-table-v1";

// Invalid configuration; the message names the offending field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GridConfig {
  int dimension = 2;
  double half_width = 16.0;
  int points_per_axis = 128;
};

struct PotentialConfig {
  std::string kind = "none";  // none | square_well | example | bump
  double depth = 5.0;
  double radius = 1.0;
  double q = 2.0;
  int terms = 16;
};

struct FamilyConfig {
  std::vector<std::string> kinds{"gaussian", "modulated", "translated"};
  int count = 2;
};

struct KernelConfig {
  double lambda = 1.0;
  std::vector<double> radii{5, 10, 20, 30, 40, 50};
  std::vector<std::vector<double>> directions;
  double tolerance = 1e-8;
  double band_limit = 3.0;
};

struct SpectrumConfig {
  double lower = -4.5;
  double upper = -0.1;
  int steps = 24;
  double eps_probe = 1e-3;
  double threshold = 0.1;
  bool oracle = true;
  int oracle_count = 2;
  double oracle_tolerance = 0.01;
};

struct SweepSettings {
  double drift_limit = 2.0;
  double eigen_margin = 0.05;
  std::vector<double> candidates;  // known eigenvalues to keep the interval away from
  bool scan = false;               // scan the interval for positive-axis dips before sweeping
  int scan_steps = 8;
  bool track_neumann = false;
};

struct Tolerances {
  double solver = 1e-10;
  double pairing = 1e-4;
  double embedding = 1e-6;
  double tail_factor = 2.0;
};

struct ExperimentConfig {
  std::string command = "norms";
  GridConfig grid;
  int m = 1;
  double delta = 0.5;
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::vector<double> epsilons{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::string sign = "+";
  std::string backend = "plemelj";
  PotentialConfig potential;
  FamilyConfig family;
  KernelConfig kernel;
  SpectrumConfig spectrum;
  SweepSettings sweep;
  Tolerances tolerances;
  std::vector<int> tail_orders{1, 2, 4, 8, 16, 32, 64};
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "lap-out";

  nlohmann::ordered_json to_json() const;
  void validate() const;
};

// Defaults for a subcommand: norms | resolvent | kernel | sweep | spectrum | potential.
ExperimentConfig default_config(const std::string& command);
// Overlays a JSON document on the defaults of its command; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& document, const std::string& command);
// Applies "path.to.field=value" (value parsed as JSON, or taken as a string).
void apply_override(nlohmann::json& document, const std::string& assignment);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Round-trip exact, locale independent.
std::string format_number(double value);
std::string format_number(long long value);
std::string to_csv(const Table& table);

struct CommandOutput {
  int exit_code = exit_ok;
  std::vector<Table> tables;
  nlohmann::ordered_json summary;
};

CommandOutput run_command(const ExperimentConfig& config);

// Writes <out>/<command>_<table>.csv and <out>/<command>_summary.json; returns the written paths.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config, const CommandOutput& output,
                                                 double wall_seconds);

}  // namespace lap::cli
