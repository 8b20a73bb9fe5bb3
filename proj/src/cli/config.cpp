#include "lap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace lap::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kCommands{"norms", "resolvent", "kernel", "sweep", "spectrum", "potential"};
const std::set<std::string> kFamilyKinds{"gaussian", "modulated", "translated", "shell", "slab", "random", "ball"};

void reject_unknown(const json& user, const json& reference, const std::string& prefix) {
  if (!user.is_object()) return;
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!reference.contains(key)) throw ValidationError(path, "unknown field");
    if (value.is_object() && reference.at(key).is_object()) reject_unknown(value, reference.at(key), path);
  }
}

template <typename T>
T get(const json& doc, const std::string& path) {
  const json* node = &doc;
  std::stringstream stream(path);
  std::string part;
  while (std::getline(stream, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ValidationError(path, "missing field");
    node = &node->at(part);
  }
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(path, "has the wrong type (" + std::string(node->type_name()) + ")");
  }
}

}  // namespace

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["grid"] = {{"dimension", grid.dimension}, {"half_width", grid.half_width}, {"points_per_axis", grid.points_per_axis}};
  j["m"] = m;
  j["delta"] = delta;
  j["lambdas"] = lambdas;
  j["epsilons"] = epsilons;
  j["sign"] = sign;
  j["backend"] = backend;
  j["potential"] = {{"kind", potential.kind},
                    {"depth", potential.depth},
                    {"radius", potential.radius},
                    {"q", potential.q},
                    {"terms", potential.terms}};
  j["family"] = {{"kinds", family.kinds}, {"count", family.count}};
  j["kernel"] = {{"lambda", kernel.lambda},
                 {"radii", kernel.radii},
                 {"directions", kernel.directions},
                 {"tolerance", kernel.tolerance},
                 {"band_limit", kernel.band_limit}};
  j["spectrum"] = {{"lower", spectrum.lower},
                   {"upper", spectrum.upper},
                   {"steps", spectrum.steps},
                   {"eps_probe", spectrum.eps_probe},
                   {"threshold", spectrum.threshold},
                   {"oracle", spectrum.oracle},
                   {"oracle_count", spectrum.oracle_count},
                   {"oracle_tolerance", spectrum.oracle_tolerance}};
  j["sweep"] = {{"drift_limit", sweep.drift_limit},   {"eigen_margin", sweep.eigen_margin},
                {"candidates", sweep.candidates},     {"scan", sweep.scan},
                {"scan_steps", sweep.scan_steps},     {"track_neumann", sweep.track_neumann}};
  j["tolerances"] = {{"solver", tolerances.solver},
                     {"pairing", tolerances.pairing},
                     {"embedding", tolerances.embedding},
                     {"tail_factor", tolerances.tail_factor}};
  j["tail_orders"] = tail_orders;
  j["seed"] = seed;
  j["workers"] = workers;
  j["out_dir"] = out_dir;
  return j;
}

ExperimentConfig default_config(const std::string& command) {
  if (!kCommands.count(command)) throw ValidationError("command", "unknown command '" + command + "'");
  ExperimentConfig c;
  c.command = command;
  if (command == "norms") {
    c.grid.points_per_axis = 256;
    c.family.kinds = {"gaussian", "modulated", "translated", "shell", "slab", "random", "ball"};
    c.family.count = 4;
  } else if (command == "resolvent") {
    c.family.kinds = {"gaussian", "modulated"};
    c.family.count = 2;
  } else if (command == "sweep") {
    c.lambdas = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  } else if (command == "spectrum") {
    c.grid = {3, 6.0, 48};
    c.potential.kind = "square_well";
  } else if (command == "potential") {
    c.grid = {3, 4.0, 64};
    c.potential.kind = "example";
    c.potential.terms = 128;
    c.family.kinds = {"gaussian", "modulated"};
    c.family.count = 1;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (!kCommands.count(command)) throw ValidationError("command", "unknown command '" + command + "'");
  if (grid.dimension < 2 || grid.dimension > 4) throw ValidationError("grid.dimension", "must lie in [2, 4]");
  if (!(grid.half_width > 0.0)) throw ValidationError("grid.half_width", "must be positive");
  if (grid.points_per_axis < 16 || grid.points_per_axis % 2)
    throw ValidationError("grid.points_per_axis", "must be even and at least 16");
  if (m < 1) throw ValidationError("m", "must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta", "must lie in (0, 1]");
  for (double l : lambdas)
    if (l < delta - 1e-12 || l > 1.0 / delta + 1e-12) throw ValidationError("lambdas", "entries must lie in [delta, 1/delta]");
  for (double e : epsilons)
    if (!(e > 0.0 && e <= 1.0)) throw ValidationError("epsilons", "entries must lie in (0, 1]");
  if (sign != "+" && sign != "-") throw ValidationError("sign", "must be \"+\" or \"-\"");
  if (backend != "plemelj" && backend != "epsilon_limit")
    throw ValidationError("backend", "must be \"plemelj\" or \"epsilon_limit\"");
  static const std::set<std::string> potentials{"none", "square_well", "example", "bump"};
  if (!potentials.count(potential.kind)) throw ValidationError("potential.kind", "must be none, square_well, example or bump");
  if (!(potential.radius > 0.0)) throw ValidationError("potential.radius", "must be positive");
  if (!(potential.q >= 1.0)) throw ValidationError("potential.q", "must be >= 1");
  if (potential.terms < 1) throw ValidationError("potential.terms", "must be >= 1");
  for (const auto& k : family.kinds)
    if (!kFamilyKinds.count(k)) throw ValidationError("family.kinds", "unknown kind '" + k + "'");
  if (family.count < 0) throw ValidationError("family.count", "must be >= 0");
  if (command == "kernel") {
    if (grid.dimension > 3) throw ValidationError("grid.dimension", "kernel scans support d = 2, 3");
    if (kernel.lambda < delta || kernel.lambda > 1.0 / delta)
      throw ValidationError("kernel.lambda", "must lie in [delta, 1/delta]");
  }
  for (double r : kernel.radii)
    if (!(r >= 0.0)) throw ValidationError("kernel.radii", "entries must be >= 0");
  for (const auto& dir : kernel.directions) {
    if (static_cast<int>(dir.size()) != grid.dimension)
      throw ValidationError("kernel.directions", "each direction needs grid.dimension components");
    double norm = 0.0;
    for (double c : dir) norm += c * c;
    if (!(norm > 0.0)) throw ValidationError("kernel.directions", "directions must be nonzero");
  }
  if (!(kernel.tolerance > 0.0)) throw ValidationError("kernel.tolerance", "must be positive");
  if (!(spectrum.lower < spectrum.upper)) throw ValidationError("spectrum.lower", "must be below spectrum.upper");
  if (spectrum.lower <= 0.0 && spectrum.upper >= 0.0) throw ValidationError("spectrum", "interval must avoid 0");
  if (spectrum.steps < 3) throw ValidationError("spectrum.steps", "must be >= 3");
  if (!(spectrum.eps_probe > 0.0)) throw ValidationError("spectrum.eps_probe", "must be positive");
  if (!(sweep.eigen_margin >= 0.0)) throw ValidationError("sweep.eigen_margin", "must be >= 0");
  if (!(tolerances.solver > 0.0)) throw ValidationError("tolerances.solver", "must be positive");
  for (int n : tail_orders)
    if (n < 1) throw ValidationError("tail_orders", "entries must be >= 1");
  if (workers < 1) throw ValidationError("workers", "must be >= 1");
  if (out_dir.empty()) throw ValidationError("out_dir", "must not be empty");
}

ExperimentConfig config_from_json(const json& document, const std::string& command) {
  if (!document.is_object()) throw ValidationError("<root>", "configuration must be a JSON object");
  std::string cmd = command;
  if (document.contains("command")) {
    const std::string declared = get<std::string>(document, "command");
    if (!cmd.empty() && declared != cmd)
      throw ValidationError("command", "configuration is for '" + declared + "', not '" + cmd + "'");
    cmd = declared;
  }
  const ExperimentConfig defaults = default_config(cmd);
  json merged = json(defaults.to_json());
  reject_unknown(document, merged, "");
  merged.merge_patch(document);
  merged["command"] = cmd;

  ExperimentConfig c;
  c.command = cmd;
  c.grid.dimension = get<int>(merged, "grid.dimension");
  c.grid.half_width = get<double>(merged, "grid.half_width");
  c.grid.points_per_axis = get<int>(merged, "grid.points_per_axis");
  c.m = get<int>(merged, "m");
  c.delta = get<double>(merged, "delta");
  c.lambdas = get<std::vector<double>>(merged, "lambdas");
  c.epsilons = get<std::vector<double>>(merged, "epsilons");
  c.sign = get<std::string>(merged, "sign");
  c.backend = get<std::string>(merged, "backend");
  c.potential.kind = get<std::string>(merged, "potential.kind");
  c.potential.depth = get<double>(merged, "potential.depth");
  c.potential.radius = get<double>(merged, "potential.radius");
  c.potential.q = get<double>(merged, "potential.q");
  c.potential.terms = get<int>(merged, "potential.terms");
  c.family.kinds = get<std::vector<std::string>>(merged, "family.kinds");
  c.family.count = get<int>(merged, "family.count");
  c.kernel.lambda = get<double>(merged, "kernel.lambda");
  c.kernel.radii = get<std::vector<double>>(merged, "kernel.radii");
  c.kernel.directions = get<std::vector<std::vector<double>>>(merged, "kernel.directions");
  c.kernel.tolerance = get<double>(merged, "kernel.tolerance");
  c.kernel.band_limit = get<double>(merged, "kernel.band_limit");
  c.spectrum.lower = get<double>(merged, "spectrum.lower");
  c.spectrum.upper = get<double>(merged, "spectrum.upper");
  c.spectrum.steps = get<int>(merged, "spectrum.steps");
  c.spectrum.eps_probe = get<double>(merged, "spectrum.eps_probe");
  c.spectrum.threshold = get<double>(merged, "spectrum.threshold");
  c.spectrum.oracle = get<bool>(merged, "spectrum.oracle");
  c.spectrum.oracle_count = get<int>(merged, "spectrum.oracle_count");
  c.spectrum.oracle_tolerance = get<double>(merged, "spectrum.oracle_tolerance");
  c.sweep.drift_limit = get<double>(merged, "sweep.drift_limit");
  c.sweep.eigen_margin = get<double>(merged, "sweep.eigen_margin");
  c.sweep.candidates = get<std::vector<double>>(merged, "sweep.candidates");
  c.sweep.scan = get<bool>(merged, "sweep.scan");
  c.sweep.scan_steps = get<int>(merged, "sweep.scan_steps");
  c.sweep.track_neumann = get<bool>(merged, "sweep.track_neumann");
  c.tolerances.solver = get<double>(merged, "tolerances.solver");
  c.tolerances.pairing = get<double>(merged, "tolerances.pairing");
  c.tolerances.embedding = get<double>(merged, "tolerances.embedding");
  c.tolerances.tail_factor = get<double>(merged, "tolerances.tail_factor");
  c.tail_orders = get<std::vector<int>>(merged, "tail_orders");
  c.seed = get<std::uint64_t>(merged, "seed");
  c.workers = get<int>(merged, "workers");
  c.out_dir = get<std::string>(merged, "out_dir");
  c.validate();
  return c;
}

void apply_override(json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError(assignment, "override must look like key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &document;
  std::stringstream stream(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(stream, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ValidationError(path, "cannot descend into a non-object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  (*node)[parts.back()] = value;
}

}  // namespace lap::cli
