#include "lap/cli.hpp"

#include "lap/boundary.hpp"
#include "lap/bs_solve.hpp"
#include "lap/eigen_scan.hpp"
#include "lap/kernel.hpp"
#include "lap/multiplier.hpp"
#include "lap/potential.hpp"
#include "lap/spaces.hpp"
#include "lap/sweep.hpp"
#include "lap/test_family.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lap::cli {

using nlohmann::ordered_json;

namespace {

using Row = std::vector<std::string>;

std::string num(double v) { return format_number(v); }
std::string num(int v) { return format_number(static_cast<long long>(v)); }
std::string num(std::size_t v) { return format_number(static_cast<long long>(v)); }
std::string flag(bool b) { return b ? "1" : "0"; }

GridSpec make_grid(const ExperimentConfig& c) {
  return GridSpec(c.grid.dimension, c.grid.half_width, c.grid.points_per_axis);
}

std::vector<NamedField> make_family(const ExperimentConfig& c, const GridSpec& grid, double lambda_ref) {
  FamilySpec spec;
  spec.kinds = c.family.kinds;
  spec.count = c.family.count;
  spec.seed = c.seed;
  spec.lambda_ref = lambda_ref;
  spec.m = c.m;
  return make_test_family(grid, spec);
}

Potential make_potential(const ExperimentConfig& c, const GridSpec& grid) {
  const PotentialConfig& p = c.potential;
  if (p.kind == "square_well") return square_well(grid, p.depth, p.radius);
  if (p.kind == "example") return example_potential(p.q, p.terms, grid);
  if (p.kind == "bump") {
    const double depth = p.depth, radius = p.radius;
    const Field v = sample(
        [=](const Point& x) {
          const double t = x.norm() / radius;
          return Complex(t >= 2.0 ? 0.0 : -depth * (1.0 - smooth_step(t - 1.0)));
        },
        grid);
    std::ostringstream name;
    name << "bump(depth=" << depth << ",radius=" << radius << ")";
    return Potential(v, PotentialClass::bounded_compact, std::nullopt, name.str());
  }
  return Potential::zero(grid);
}

Sign parse_sign(const std::string& s) { return s == "-" ? Sign::minus : Sign::plus; }

double middle_lambda(const ExperimentConfig& c) {
  if (c.lambdas.empty()) return 1.0;
  std::vector<double> sorted = c.lambdas;
  std::sort(sorted.begin(), sorted.end());
  return sorted[sorted.size() / 2];
}

// ---------------------------------------------------------------- norms

CommandOutput cmd_norms(const ExperimentConfig& c) {
  const GridSpec grid = make_grid(c);
  const int d = grid.dimension();
  const std::vector<NamedField> family = make_family(c, grid, middle_lambda(c));
  const CompositeNormConfig cfg(c.m, d, middle_lambda(c));
  const double pd = stein_tomas_exponent(d), pd_dual = dual_stein_tomas_exponent(d);
  Table table{"norms",
              {"name", "kind", "l2", "lp_pd", "lorentz_pd_2", "lorentz_pd_dual_2", "b", "bstar", "xstar", "x_upper",
               "x_splitting", "slab_integral", "slab_sup", "embedding_ratio", "dual_embedding_ratio", "edge_ratio"},
              {}};
  double max_embed = 0.0, max_dual = 0.0;
  ordered_json flagged = ordered_json::array();
  for (const auto& nf : family) {
    const Field& f = nf.field;
    const double b = b_norm(f), bs = bstar_norm(f);
    const double slab_int = slab_integral_norm(f), slab_sup = slab_sup_norm(f);
    const double embed = b > 0.0 ? slab_int / b : 0.0;
    const double dual = slab_sup > 0.0 ? bs / slab_sup : 0.0;
    max_embed = std::max(max_embed, embed);
    max_dual = std::max(max_dual, dual);
    const XNormBound x = x_norm_upper(f, cfg);
    const double edge = edge_to_peak_ratio(f);
    if (edge > 1e-10) flagged.push_back(nf.name);
    table.rows.push_back({nf.name, nf.kind, num(l2_norm(f)), num(lp_norm(f, pd)),
                          num(lorentz_norm(f, LorentzExponents(pd, 2.0))),
                          num(lorentz_norm(f, LorentzExponents(pd_dual, 2.0))), num(b), num(bs),
                          num(xstar_norm(f, cfg)), num(x.value), x.splitting, num(slab_int), num(slab_sup), num(embed),
                          num(dual), num(edge)});
  }
  const double limit = std::sqrt(2.0) * (1.0 + c.tolerances.embedding);
  CommandOutput out;
  out.tables.push_back(std::move(table));
  out.summary["fields"] = family.size();
  out.summary["max_embedding_ratio"] = max_embed;
  out.summary["max_dual_embedding_ratio"] = max_dual;
  out.summary["embedding_limit"] = limit;
  out.summary["embedding_pass"] = max_embed <= limit && max_dual <= limit;
  out.summary["truncation_flagged"] = flagged;
  out.summary["family_version"] = FamilySpec::version;
  if (!(max_embed <= limit && max_dual <= limit)) out.exit_code = exit_criteria;
  return out;
}

// ---------------------------------------------------------------- resolvent

CommandOutput cmd_resolvent(const ExperimentConfig& c) {
  const GridSpec grid = make_grid(c);
  const Sign sign = parse_sign(c.sign);
  Table table{"pairings",
              {"lambda", "sign", "f", "g", "re", "im", "surface_re", "surface_im", "principal_re", "principal_im",
               "eps_limit_re", "eps_limit_im", "relative_difference", "error_estimate"},
              {}};
  double worst_diff = 0.0, worst_positivity = 0.0;
  int holes = 0;
  for (double lambda : c.lambdas) {
    const std::vector<NamedField> family = make_family(c, grid, lambda);
    for (std::size_t i = 0; i < family.size(); ++i) {
      for (std::size_t j = i; j < family.size(); ++j) {
        BoundarySpec spec;
        spec.lambda = lambda;
        spec.m = c.m;
        spec.sign = sign;
        spec.delta = c.delta;
        try {
          const SpectralCorrelation corr(family[i].field, family[j].field);
          spec.backend = Backend::plemelj;
          const PairingResult p = boundary_pairing(corr, grid.nyquist(), spec);
          spec.backend = Backend::epsilon_limit;
          const PairingResult e = boundary_pairing(corr, grid.nyquist(), spec);
          const double diff = std::abs(p.value - e.value) / std::max(std::abs(p.value), 1e-300);
          worst_diff = std::max(worst_diff, diff);
          if (i == j) worst_positivity = std::max(worst_positivity, -sign_value(sign) * p.value.imag());
          table.rows.push_back({num(lambda), c.sign, family[i].name, family[j].name, num(p.value.real()),
                                num(p.value.imag()), num(p.surface->real()), num(p.surface->imag()),
                                num(p.principal->real()), num(p.principal->imag()), num(e.value.real()),
                                num(e.value.imag()), num(diff), num(p.error_estimate)});
        } catch (const NumericalError& err) {
          ++holes;
          table.rows.push_back({num(lambda), c.sign, family[i].name, family[j].name, "nan", "nan", "nan", "nan",
                                "nan", "nan", "nan", "nan", "nan", "nan"});
        }
      }
    }
  }
  CommandOutput out;
  out.summary["pairs"] = table.rows.size();
  out.summary["max_backend_difference"] = worst_diff;
  out.summary["max_positivity_violation"] = worst_positivity;
  out.summary["holes"] = holes;
  const bool pass = worst_diff <= c.tolerances.pairing && worst_positivity <= 1e-10;
  out.summary["pass"] = pass;
  out.tables.push_back(std::move(table));
  out.exit_code = !pass ? exit_criteria : holes ? exit_holes : exit_ok;
  return out;
}

// ---------------------------------------------------------------- kernel

std::vector<Point> default_directions(int d) {
  const double a15 = 15.0 * kPi / 180.0, a25 = 25.0 * kPi / 180.0;
  std::vector<Point> dirs;
  auto make = [d](std::initializer_list<double> v) {
    Point p(d);
    int i = 0;
    for (double x : v) p[i++] = x;
    return p;
  };
  if (d == 2) {
    dirs = {make({0.0, 1.0}), make({std::sin(a15), std::cos(a15)}), make({-std::sin(a25), std::cos(a25)}),
            make({0.0, -1.0})};
  } else {
    dirs = {make({0.0, 0.0, 1.0}), make({std::sin(a15), 0.0, std::cos(a15)}),
            make({0.0, std::sin(a25), std::cos(a25)}), make({0.0, 0.0, -1.0})};
  }
  return dirs;
}

CommandOutput cmd_kernel(const ExperimentConfig& c) {
  const int d = c.grid.dimension;
  std::vector<Point> dirs;
  for (const auto& v : c.kernel.directions) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = v[static_cast<std::size_t>(a)];
    dirs.push_back(p);
  }
  if (c.kernel.directions.empty()) dirs = default_directions(d);
  const DecayTable decay = decay_scan(c.kernel.lambda, c.m, d, c.kernel.radii, dirs, c.kernel.tolerance, c.workers);
  Table table{"decay", {"direction"}, {}};
  for (int a = 0; a < d; ++a) table.columns.push_back("x" + std::to_string(a + 1));
  for (const char* col : {"radius", "magnitude", "normalized", "error_estimate", "flagged"}) table.columns.push_back(col);
  int flagged = 0;
  for (std::size_t i = 0; i < decay.rows.size(); ++i) {
    const DecayRow& r = decay.rows[i];
    Row row{num(i / std::max<std::size_t>(c.kernel.radii.size(), 1))};
    for (int a = 0; a < d; ++a) row.push_back(num(r.x[a]));
    for (const std::string& s : {num(r.radius), num(r.magnitude), num(r.normalized), num(r.error_estimate),
                                 flag(r.flagged)})
      row.push_back(s);
    flagged += r.flagged;
    table.rows.push_back(std::move(row));
  }
  CommandOutput out;
  out.summary["rows"] = decay.rows.size();
  out.summary["empirical_constant"] = decay.empirical_constant;
  out.summary["median_normalized"] = decay.median_normalized;
  out.summary["band_ratio"] = decay.band_ratio;
  out.summary["band_limit"] = c.kernel.band_limit;
  out.summary["flagged"] = flagged;
  const bool pass = decay.band_ratio <= c.kernel.band_limit;
  out.summary["pass"] = pass;
  out.tables.push_back(std::move(table));
  out.exit_code = !pass ? exit_criteria : flagged ? exit_holes : exit_ok;
  return out;
}

// ---------------------------------------------------------------- sweep

CommandOutput cmd_sweep(const ExperimentConfig& c) {
  const GridSpec grid = make_grid(c);
  const Potential potential = make_potential(c, grid);
  const bool perturbed = !potential.support().empty();
  const double lo = *std::min_element(c.lambdas.begin(), c.lambdas.end());
  const double hi = *std::max_element(c.lambdas.begin(), c.lambdas.end());
  std::vector<double> candidates = c.sweep.candidates;
  if (perturbed && c.sweep.scan) {
    ScanOptions scan;
    scan.lower = std::max(lo - c.sweep.eigen_margin, 0.5 * lo);
    scan.upper = hi + c.sweep.eigen_margin;
    scan.steps = std::max(3, c.sweep.scan_steps);
    scan.m = c.m;
    scan.eps_probe = c.spectrum.eps_probe;
    scan.threshold = c.spectrum.threshold;
    scan.workers = c.workers;
    for (const auto& cand : eigen_scan(potential, scan).candidates) candidates.push_back(cand.lambda);
  }
  if (perturbed) {
    for (double e : candidates) {
      if (e >= lo - c.sweep.eigen_margin && e <= hi + c.sweep.eigen_margin) {
        std::ostringstream msg;
        msg << "the interval [" << lo << ", " << hi << "] comes within " << c.sweep.eigen_margin
            << " of the eigenvalue candidate " << e;
        throw ValidationError("lambdas", msg.str());
      }
    }
  }
  SweepConfig cfg;
  cfg.m = c.m;
  cfg.delta = c.delta;
  cfg.lambdas = c.lambdas;
  cfg.epsilons = c.epsilons;
  cfg.sign = parse_sign(c.sign);
  cfg.lambda_ref = 1.0;
  cfg.workers = c.workers;
  cfg.solver.tolerance = c.tolerances.solver;
  cfg.track_neumann = c.sweep.track_neumann;
  const std::vector<NamedField> family = make_family(c, grid, cfg.lambda_ref);
  const SweepReport report = perturbed ? lap_perturbed_sweep(potential, family, cfg) : lap_free_sweep(family, cfg);

  Table table{"cells",
              {"lambda", "epsilon", "proxy", "argmax", "lorentz", "bstar", "residual", "iterations",
               "spectral_radius", "sigma_min", "neumann_rate", "holes"},
              {}};
  for (const SweepCell& cell : report.cells) {
    table.rows.push_back({num(cell.lambda), num(cell.epsilon), num(cell.proxy), cell.argmax, num(cell.lorentz),
                          num(cell.bstar), num(cell.residual), num(cell.iterations), num(cell.spectral_radius),
                          num(cell.sigma_min), num(cell.neumann_rate), num(cell.holes)});
  }
  CommandOutput out;
  out.summary["mode"] = perturbed ? "perturbed" : "free";
  out.summary["potential"] = potential.name();
  out.summary["family"] = report.family;
  out.summary["family_version"] = FamilySpec::version;
  out.summary["sup"] = report.sup;
  out.summary["epsilons"] = report.epsilons;
  out.summary["sup_by_epsilon"] = report.sup_by_epsilon;
  out.summary["drift"] = report.drift;
  out.summary["last_decade_drift"] = report.last_decade_drift;
  out.summary["drift_limit"] = c.sweep.drift_limit;
  out.summary["holes"] = report.holes;
  out.summary["max_residual"] = report.max_residual;
  out.summary["neumann_rate"] = report.neumann_rate;
  out.summary["max_spectral_radius"] = report.max_spectral_radius;
  out.summary["proxy_note"] = "lower bound of the X -> X* norm over the listed family; X side is an upper bound";
  const bool pass = report.drift < c.sweep.drift_limit && report.last_decade_drift < c.sweep.drift_limit;
  out.summary["pass"] = pass;
  out.tables.push_back(std::move(table));
  out.exit_code = !pass ? exit_criteria : report.holes ? exit_holes : exit_ok;
  return out;
}

// ---------------------------------------------------------------- spectrum

CommandOutput cmd_spectrum(const ExperimentConfig& c) {
  const GridSpec grid = make_grid(c);
  const Potential potential = make_potential(c, grid);
  ScanOptions scan;
  scan.lower = c.spectrum.lower;
  scan.upper = c.spectrum.upper;
  scan.steps = c.spectrum.steps;
  scan.eps_probe = c.spectrum.eps_probe;
  scan.threshold = c.spectrum.threshold;
  scan.m = c.m;
  scan.workers = c.workers;
  const EigenScanResult plus = eigen_scan(potential, scan);
  scan.sign = Sign::minus;
  const EigenScanResult minus = eigen_scan(potential, scan);
  scan.sign = Sign::plus;
  scan.eps_probe *= 0.5;
  const EigenScanResult half = eigen_scan(potential, scan);

  std::vector<double> oracle;
  bool oracle_converged = true;
  const bool run_oracle = c.spectrum.oracle && c.spectrum.upper < 0.0 && !potential.support().empty();
  if (run_oracle) {
    LobpcgOptions lo;
    lo.count = c.spectrum.oracle_count;
    lo.seed = c.seed;
    for (const auto& pair : lowest_eigenpairs(potential, c.m, lo)) {
      oracle.push_back(pair.value);
      oracle_converged = oracle_converged && pair.converged;
    }
  }

  auto closest = [](const std::vector<EigenCandidate>& set, double x) -> const EigenCandidate* {
    const EigenCandidate* best = nullptr;
    for (const auto& e : set)
      if (!best || std::abs(e.lambda - x) < std::abs(best->lambda - x)) best = &e;
    return best;
  };
  Table cands{"candidates",
              {"lambda", "sigma_min", "dip_depth", "lambda_minus", "lambda_half_eps", "extrapolated", "shift",
               "stable", "oracle", "oracle_relative_error"},
              {}};
  bool sets_coincide = plus.candidates.size() == minus.candidates.size();
  bool stable = plus.candidates.size() == half.candidates.size();
  double worst_oracle = 0.0;
  for (const auto& e : plus.candidates) {
    const EigenCandidate* m = closest(minus.candidates, e.lambda);
    const EigenCandidate* h = closest(half.candidates, e.lambda);
    const double lm = m ? m->lambda : std::nan("");
    const double lh = h ? h->lambda : std::nan("");
    if (!m || std::abs(lm - e.lambda) > plus.step) sets_coincide = false;
    const double shift = h ? std::abs(lh - e.lambda) : std::nan("");
    const bool cell_stable = h && shift < plus.step;
    stable = stable && cell_stable;
    // Dip locations move as O(eps^2); one Richardson step removes the leading term.
    const double extrapolated = h ? (4.0 * lh - e.lambda) / 3.0 : std::nan("");
    double match = std::nan(""), rel = std::nan("");
    if (!oracle.empty()) {
      match = *std::min_element(oracle.begin(), oracle.end(), [&](double a, double b) {
        return std::abs(a - e.lambda) < std::abs(b - e.lambda);
      });
      rel = std::abs(e.lambda - match) / std::abs(match);
      worst_oracle = std::max(worst_oracle, rel);
    }
    cands.rows.push_back({num(e.lambda), num(e.sigma_min), num(e.dip_depth), num(lm), num(lh), num(extrapolated),
                          num(shift), flag(cell_stable), num(match), num(rel)});
  }
  Table samples{"samples", {"lambda", "sigma_plus", "sigma_minus", "sigma_half_eps"}, {}};
  for (std::size_t i = 0; i < plus.samples.size(); ++i)
    samples.rows.push_back({num(plus.samples[i].lambda), num(plus.samples[i].sigma_min),
                            num(minus.samples[i].sigma_min), num(half.samples[i].sigma_min)});

  CommandOutput out;
  out.summary["potential"] = potential.name();
  out.summary["backend"] = plus.backend;
  out.summary["step"] = plus.step;
  out.summary["candidates"] = plus.candidates.size();
  out.summary["sets_coincide"] = sets_coincide;
  out.summary["stable_under_eps_halving"] = stable;
  out.summary["resolution_warning"] = plus.resolution_warning ? plus.warning : "";
  out.summary["oracle"] = oracle;
  out.summary["oracle_converged"] = oracle_converged;
  out.summary["max_oracle_relative_error"] = worst_oracle;
  if (!oracle.empty()) {
    out.summary["lowest_eigenvalue"] = oracle.front();
    out.summary["bounded_below_by_minus_sup_v"] = oracle.front() >= -potential.sup_norm() - 1e-9;
  }
  const bool pass = sets_coincide && stable && worst_oracle <= c.spectrum.oracle_tolerance &&
                    (oracle.empty() || oracle_converged);
  out.summary["pass"] = pass;
  out.tables.push_back(std::move(cands));
  out.tables.push_back(std::move(samples));
  out.exit_code = pass ? exit_ok : exit_criteria;
  return out;
}

// ---------------------------------------------------------------- potential

CommandOutput cmd_potential(const ExperimentConfig& c) {
  const GridSpec grid = make_grid(c);
  const double q = c.potential.q;
  const int terms = c.potential.terms;
  CommandOutput out;
  if (c.potential.kind != "example") {
    const Potential v = make_potential(c, grid);
    const std::vector<NamedField> family = make_family(c, grid, 1.0);
    AdmissibilityConfig acfg;
    acfg.m = c.m;
    const AdmissibilityReport rep = admissibility_check(v, family, acfg);
    out.summary["potential"] = v.name();
    out.summary["symmetry_defect"] = rep.symmetry_defect;
    out.summary["factorization_defect"] = rep.factorization_defect;
    out.summary["smallness_holds"] = rep.smallness_holds;
    return out;
  }
  const Potential full = example_potential(q, terms, grid);
  Table shells{"shells", {"j", "amplitude", "target_measure", "grid_measure", "relative_error"}, {}};
  double worst_measure = 0.0;
  for (const auto& s : example_shell_measures(q, terms, grid)) {
    shells.rows.push_back({num(s.index), num(std::pow(static_cast<double>(s.index), -1.0 / q)), num(s.target),
                           num(s.measure), num(s.relative_error)});
    worst_measure = std::max(worst_measure, s.relative_error);
  }

  // Tail chain: V - V_N = sum_{j >= N}; the full tail is taken with a million terms.
  constexpr int kFullTerms = 1000000;
  Table tail{"tail",
             {"N", "grid_truncated", "exact_truncated", "exact_full", "bound", "ratio_to_bound", "decreasing"},
             {}};
  bool decreasing = true, consistent = true;
  double previous = std::numeric_limits<double>::infinity();
  double worst_grid = 0.0;
  const LorentzExponents weak = LorentzExponents::weak(q);
  for (int n : c.tail_orders) {
    if (n > terms) throw ValidationError("tail_orders", "entries must not exceed potential.terms");
    const Field head = n > 1 ? example_potential(q, n - 1, grid).field() : zero_field(grid);
    const double on_grid = lorentz_norm(full.field() - head, weak);
    const double exact_trunc = example_tail_norm(q, n, terms);
    const double exact = example_tail_norm(q, n, kFullTerms);
    const double bound = example_tail_bound(q, n);
    const double ratio = exact / bound;
    const bool dec = exact < previous;
    decreasing = decreasing && dec;
    consistent = consistent && ratio <= c.tolerances.tail_factor && ratio >= 1.0 / c.tolerances.tail_factor;
    worst_grid = std::max(worst_grid, std::abs(on_grid - exact_trunc) / exact_trunc);
    previous = exact;
    tail.rows.push_back({num(n), num(on_grid), num(exact_trunc), num(exact), num(bound), num(ratio), flag(dec)});
  }

  Table weak_table{"weak_norm", {"J", "grid_weak_norm", "exact_weak_norm"}, {}};
  for (int j : {4, 16, 64}) {
    if (j > terms) continue;
    weak_table.rows.push_back(
        {num(j), num(lorentz_norm(example_potential(q, j, grid).field(), weak)), num(example_tail_norm(q, 1, j))});
  }

  const std::vector<NamedField> family = make_family(c, grid, 1.0);
  AdmissibilityConfig acfg;
  acfg.m = c.m;
  const AdmissibilityReport rep = admissibility_check(full, family, acfg);
  Table small{"smallness", {"N", "gamma", "epsilon", "A", "R", "satisfiable", "pure_ratio"}, {}};
  for (const auto& row : rep.smallness)
    small.rows.push_back({num(row.order), num(row.gamma), num(row.epsilon), num(row.constant), num(row.radius),
                          flag(row.satisfiable), num(row.pure_ratio)});

  const ExponentRange range = admissible_exponents(c.m, grid.dimension());
  out.summary["potential"] = full.name();
  out.summary["max_shell_measure_error"] = worst_measure;
  out.summary["tail_decreasing"] = decreasing;
  out.summary["tail_consistent_with_bound"] = consistent;
  out.summary["grid_vs_exact_tail"] = worst_grid;
  out.summary["exponent_range"] = {{"lower", range.lower}, {"lower_inclusive", range.lower_inclusive},
                                   {"upper", range.upper}};
  out.summary["exponent_admissible"] = range.contains(q);
  out.summary["admissibility"] = {{"symmetry_defect", rep.symmetry_defect},
                                  {"symmetric", rep.symmetric},
                                  {"factorization", rep.factorization},
                                  {"factorization_defect", rep.factorization_defect},
                                  {"factorization_holds", rep.factorization_holds},
                                  {"smallness_holds", rep.smallness_holds},
                                  {"family", rep.family}};
  const bool pass = decreasing && consistent && worst_measure <= 0.01 && worst_grid <= 0.01;
  out.summary["pass"] = pass;
  out.tables.push_back(std::move(shells));
  out.tables.push_back(std::move(tail));
  out.tables.push_back(std::move(weak_table));
  out.tables.push_back(std::move(small));
  out.exit_code = pass ? exit_ok : exit_criteria;
  return out;
}

}  // namespace

CommandOutput run_command(const ExperimentConfig& config) {
  config.validate();
  if (config.command == "norms") return cmd_norms(config);
  if (config.command == "resolvent") return cmd_resolvent(config);
  if (config.command == "kernel") return cmd_kernel(config);
  if (config.command == "sweep") return cmd_sweep(config);
  if (config.command == "spectrum") return cmd_spectrum(config);
  if (config.command == "potential") return cmd_potential(config);
  throw ValidationError("command", "unknown command '" + config.command + "'");
}

}  // namespace lap::cli
