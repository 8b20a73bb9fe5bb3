#include "lap/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;
using namespace lap::cli;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  std::vector<std::string> overrides;
  bool print_config = false;
  bool quiet = false;
};

// Layers, lowest first: defaults, environment, config file, --set, dedicated flags.
json resolve_document(const Options& opt) {
  json doc = json::object();
  if (const char* env = std::getenv("LAP_WORKERS")) {
    try {
      doc["workers"] = std::stoi(env);
    } catch (const std::exception&) {
      throw ValidationError("LAP_WORKERS", "must be an integer, got '" + std::string(env) + "'");
    }
  }
  if (!opt.config_path.empty()) {
    std::ifstream file(opt.config_path);
    if (!file) throw ValidationError("--config", "cannot open " + opt.config_path);
    json user;
    try {
      user = json::parse(file);
    } catch (const json::parse_error& e) {
      throw ValidationError("--config", std::string("invalid JSON: ") + e.what());
    }
    if (!user.is_object()) throw ValidationError("--config", "configuration must be a JSON object");
    doc.merge_patch(user);
  }
  for (const auto& assignment : opt.overrides) apply_override(doc, assignment);
  if (opt.seed) doc["seed"] = *opt.seed;
  if (opt.out_dir) doc["out_dir"] = *opt.out_dir;
  if (opt.workers) doc["workers"] = *opt.workers;
  return doc;
}

int run(const std::string& command, const Options& opt) {
  const ExperimentConfig config = config_from_json(resolve_document(opt), command);
  if (opt.print_config) {
    std::cout << config.to_json().dump(2) << "\n";
    return exit_ok;
  }
  const auto start = std::chrono::steady_clock::now();
  const CommandOutput output = run_command(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto written = write_outputs(config, output, wall);
  if (!opt.quiet) {
    std::cout << command << ": exit " << output.exit_code << " after " << wall << " s\n";
    for (const auto& path : written) std::cout << "  " << path.string() << "\n";
    std::cout << output.summary.dump(2) << "\n";
  }
  return output.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limiting absorption laboratory for (-Laplacian)^m + V"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"norms", "Norm table and embedding-constant measurements"},
      {"resolvent", "Boundary pairings from both backends"},
      {"kernel", "Outgoing kernel decay scan"},
      {"sweep", "Free or perturbed resolvent uniformity sweep"},
      {"spectrum", "Eigenvalue scan with direct-eigensolver oracle"},
      {"potential", "Example potential: shell measures, tail chain, admissibility"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Random seed for the test family");
    sub->add_option("--out-dir", opt.out_dir, "Output directory");
    sub->add_option("--workers", opt.workers, "Worker threads (overrides LAP_WORKERS)");
    sub->add_option("--set", opt.overrides, "Override a field, e.g. --set grid.points_per_axis=64");
    sub->add_flag("--print-config", opt.print_config, "Print the resolved configuration and exit");
    sub->add_flag("--quiet", opt.quiet, "Do not echo the summary");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const ValidationError& e) {
    std::cerr << "lapcli: invalid configuration: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "lapcli: invalid configuration: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "lapcli: " << e.what() << "\n";
    return 1;
  }
}
