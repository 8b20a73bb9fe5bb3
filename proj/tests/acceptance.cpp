// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include "oracles.hpp"

#include "lap/boundary.hpp"
#include "lap/bs_solve.hpp"
#include "lap/cli.hpp"
#include "lap/eigen_scan.hpp"
#include "lap/kernel.hpp"
#include "lap/multiplier.hpp"
#include "lap/potential.hpp"
#include "lap/radial.hpp"
#include "lap/spaces.hpp"
#include "lap/sweep.hpp"
#include "lap/test_family.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace lap;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& add(const std::string& key, const T& value) {
    if (!text_.empty()) text_ += ", ";
    std::ostringstream s;
    s.precision(6);
    s << key << "=" << value;
    text_ += s.str();
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

// ---------------------------------------------------------------- 1

Outcome transform_fidelity() {
  const auto start = Clock::now();
  const GridSpec g(2, 16.0, 128);
  const double w = 1.0;
  const Field f = GaussianPacket::centered(2, w).sample(g);
  const Field spectrum = forward_transform(f);
  double worst = 0.0, peak = 0.0;
  for (Index k = 0; k < g.size(); ++k) {
    const double rho = g.frequency_node(k).norm();
    if (rho > 5.0) continue;
    const double exact = oracle::gaussian_transform(rho, w, 2);
    worst = std::max(worst, std::abs(spectrum.values()[k] - exact));
    peak = std::max(peak, exact);
  }
  const double transform_rel = worst / peak;

  const auto packets = random_packets(2, 4, 11);
  double parseval_rel = 0.0, roundtrip_rel = 0.0;
  for (const auto& p : packets) {
    const Field h = p.sample(g);
    const Field hh = forward_transform(h);
    const double physical = h.values().squaredNorm() * g.cell_volume();
    const double spectral = hh.values().squaredNorm() * g.frequency_cell_volume() / std::pow(2.0 * kPi, 2);
    parseval_rel = std::max(parseval_rel, std::abs(physical - spectral) / physical);
    const Field back = inverse_transform(hh);
    roundtrip_rel = std::max(roundtrip_rel, (back.values() - h.values()).norm() / h.values().norm());
  }
  const double elapsed = seconds_since(start);
  const bool pass = transform_rel <= 1e-8 && parseval_rel <= 1e-10 && roundtrip_rel <= 1e-10 && elapsed < 10.0;
  return {pass, Detail()
                    .add("transform_rel", transform_rel)
                    .add("parseval_rel", parseval_rel)
                    .add("roundtrip_rel", roundtrip_rel)
                    .add("seconds", elapsed)
                    .str()};
}

// ---------------------------------------------------------------- 2

Outcome plemelj_correctness() {
  const std::vector<std::pair<int, int>> cases{{2, 1}, {2, 2}, {3, 1}};
  int pairs = 0;
  double worst_rel = 0.0, worst_positivity = 0.0;
  for (auto [d, m] : cases) {
    const GridSpec g = d == 2 ? GridSpec(2, 16.0, 128) : GridSpec(3, 8.0, 64);
    const auto packets = random_packets(d, 3, 100 + 10 * d + m);
    std::vector<Field> fields;
    for (const auto& p : packets) fields.push_back(p.sample(g));
    const std::vector<std::pair<int, int>> index_pairs{{0, 0}, {0, 1}, {1, 2}, {2, 2}};
    for (auto [i, j] : index_pairs) {
      const SpectralCorrelation corr(fields[i], fields[j]);
      const oracle::PacketProduct prod(packets[i], packets[j]);
      for (double lambda : {0.5, 1.0, 2.0}) {
        for (Sign sign : {Sign::plus, Sign::minus}) {
          BoundarySpec spec;
          spec.lambda = lambda;
          spec.m = m;
          spec.sign = sign;
          const Complex value = boundary_pairing(corr, g.nyquist(), spec).value;
          const Complex expected = oracle::packet_boundary_pairing(prod, m, lambda, sign_value(sign));
          worst_rel = std::max(worst_rel, std::abs(value - expected) / std::abs(expected));
          if (i == j) worst_positivity = std::max(worst_positivity, -sign_value(sign) * value.imag());
          ++pairs;
        }
      }
    }
  }
  const bool pass = pairs >= 20 && worst_rel <= 1e-4 && worst_positivity <= 1e-10;
  return {pass, Detail()
                    .add("pairs", pairs)
                    .add("max_rel_vs_eps_extrapolation", worst_rel)
                    .add("max_positivity_violation", worst_positivity)
                    .str()};
}

// ---------------------------------------------------------------- 3

Outcome embedding_constants() {
  const GridSpec g(2, 16.0, 256);
  FamilySpec spec;
  spec.kinds = {"gaussian", "modulated", "translated", "shell", "slab", "random", "ball"};
  spec.count = 17;
  const auto family = make_test_family(g, spec);
  double max_embed = 0.0, max_dual = 0.0;
  int shell_localized = 0;
  for (const auto& nf : family) {
    const double b = b_norm(nf.field), bs = bstar_norm(nf.field);
    const double slab_int = slab_integral_norm(nf.field), slab_sup = slab_sup_norm(nf.field);
    if (b > 0.0) max_embed = std::max(max_embed, slab_int / b);
    if (slab_sup > 0.0) max_dual = std::max(max_dual, bs / slab_sup);
    if (nf.kind == "shell" || nf.kind == "slab") ++shell_localized;
  }
  const double limit = std::sqrt(2.0) * (1.0 + 1e-6);
  const bool pass = family.size() >= 100 && shell_localized > 0 && max_embed <= limit && max_dual <= limit;
  return {pass, Detail()
                    .add("fields", family.size())
                    .add("shell_localized", shell_localized)
                    .add("max_embedding_ratio", max_embed)
                    .add("max_dual_embedding_ratio", max_dual)
                    .add("limit", limit)
                    .str()};
}

// ---------------------------------------------------------------- 4

double restriction_constant(const GridSpec& g, double radius) {
  FamilySpec spec;
  spec.kinds = {"gaussian", "modulated", "translated", "shell", "slab", "random", "ball"};
  spec.count = 4;
  const auto family = make_test_family(g, spec);
  const LorentzExponents exps(stein_tomas_exponent(g.dimension()), 2.0);
  double constant = 0.0;
  for (const auto& nf : family) {
    const double denominator = std::min(b_norm(nf.field), lorentz_norm(nf.field, exps));
    if (denominator > 0.0) constant = std::max(constant, sphere_restriction_norm(nf.field, radius) / denominator);
  }
  return constant;
}

Outcome restriction_bound() {
  Detail detail;
  bool pass = true;
  const std::vector<std::tuple<int, double, int>> cases{{2, 16.0, 128}, {3, 8.0, 32}};
  for (auto [d, half_width, n] : cases) {
    for (double radius : {1.0, 2.0}) {
      const double coarse = restriction_constant(GridSpec(d, half_width, n), radius);
      const double fine = restriction_constant(GridSpec(d, half_width, 2 * n), radius);
      const double ratio = fine / coarse;
      pass = pass && coarse > 0.0 && ratio <= 2.0 && ratio >= 0.5;
      const std::string tag = "d" + std::to_string(d) + "_r" + std::to_string(static_cast<int>(radius));
      detail.add(tag + "_C_n", coarse).add(tag + "_C_2n", fine);
    }
  }
  return {pass, detail.str()};
}

// ---------------------------------------------------------------- 5

Outcome kernel_decay() {
  Detail detail;
  bool pass = true;
  const std::vector<double> radii{5, 10, 20, 30, 40, 50};
  for (int d : {2, 3}) {
    std::vector<Point> dirs;
    const double a15 = 15.0 * kPi / 180.0, a25 = 25.0 * kPi / 180.0;
    Point up = Point::Zero(d), tilt1 = Point::Zero(d), tilt2 = Point::Zero(d);
    up[d - 1] = 1.0;
    tilt1[0] = std::sin(a15);
    tilt1[d - 1] = std::cos(a15);
    tilt2[d == 2 ? 0 : 1] = -std::sin(a25);
    tilt2[d - 1] = std::cos(a25);
    dirs = {up, tilt1, tilt2};
    for (int m : {1, 2}) {
      const auto start = Clock::now();
      const DecayTable table = decay_scan(1.0, m, d, radii, dirs, 1e-8);
      const double elapsed = seconds_since(start);
      std::vector<double> with_origin = radii;
      with_origin.insert(with_origin.begin(), 0.0);
      const DecayTable full = decay_scan(1.0, m, d, with_origin, dirs, 1e-8);
      bool flagged = false;
      for (const auto& r : table.rows) flagged = flagged || r.flagged;
      pass = pass && table.band_ratio < 3.0 && elapsed <= 300.0 && !flagged;
      const std::string tag = "d" + std::to_string(d) + "m" + std::to_string(m);
      detail.add(tag + "_band", table.band_ratio)
          .add(tag + "_band_incl_origin", full.band_ratio)
          .add(tag + "_seconds", elapsed);
    }
  }
  return {pass, detail.str()};
}

// ---------------------------------------------------------------- 6

Outcome free_sweep_drift() {
  const GridSpec g(2, 16.0, 128);
  FamilySpec spec;
  spec.kinds = {"gaussian", "modulated", "translated"};
  spec.count = 2;
  const auto family = make_test_family(g, spec);
  SweepConfig cfg;
  cfg.delta = 0.5;
  cfg.lambdas = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  cfg.epsilons = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  const SweepReport report = lap_free_sweep(family, cfg);
  const bool pass = report.drift < 2.0 && report.holes == 0;
  return {pass, Detail()
                    .add("sup", report.sup)
                    .add("drift", report.drift)
                    .add("last_decade_drift", report.last_decade_drift)
                    .add("sup_at_eps_1e-1", report.sup_by_epsilon.front())
                    .add("sup_at_eps_1e-3", report.sup_by_epsilon.back())
                    .str()};
}

// ---------------------------------------------------------------- 7

Potential smooth_bump(const GridSpec& g, double depth, double radius) {
  const Field v = sample(
      [=](const Point& x) {
        const double t = x.norm() / radius;
        return Complex(t >= 2.0 ? 0.0 : -depth * (1.0 - smooth_step(t - 1.0)));
      },
      g);
  return Potential(v, PotentialClass::bounded_compact, std::nullopt, "bump");
}

Outcome perturbed_resolvent() {
  const GridSpec g(2, 16.0, 128);
  FamilySpec spec;
  spec.kinds = {"gaussian", "modulated", "translated"};
  spec.count = 2;
  const auto family = make_test_family(g, spec);

  // V = 0 reduces to the free resolvent
  double reduction = 0.0;
  const ResolventKernels kernels(g, 1, Complex(1.0, 0.0));
  const Complex z(1.0, 1e-2);
  const RadialResolvent r0(kernels.resolvent(z), z);
  for (const auto& nf : family) {
    const Field free = r0.apply(nf.field);
    const BsSolve s = bs_solve(r0, Potential::zero(g), nf.field);
    reduction = std::max(reduction, l2_norm(s.u - free) / l2_norm(free));
  }
  SweepConfig cfg;
  cfg.lambdas = {0.5, 1.0, 2.0};
  cfg.epsilons = {1e-1, 1e-2, 1e-3};
  const SweepReport free = lap_free_sweep(family, cfg);
  const SweepReport zero = lap_perturbed_sweep(Potential::zero(g), family, cfg);
  for (std::size_t i = 0; i < free.cells.size(); ++i)
    reduction = std::max(reduction, std::abs(zero.cells[i].proxy - free.cells[i].proxy) / free.cells[i].proxy);

  // small bump: residuals and the Neumann bound
  cfg.track_neumann = true;
  const SweepReport pert = lap_perturbed_sweep(smooth_bump(g, 0.1, 1.0), family, cfg);
  const double bound = pert.neumann_rate < 1.0 ? free.sup / (1.0 - pert.neumann_rate)
                                               : std::numeric_limits<double>::infinity();
  const bool pass = pert.max_residual <= 1e-8 && reduction <= 1e-10 && pert.sup <= 1.1 * bound;
  return {pass, Detail()
                    .add("max_residual", pert.max_residual)
                    .add("holes", pert.holes)
                    .add("zero_potential_rel", reduction)
                    .add("sup_perturbed", pert.sup)
                    .add("sup_free", free.sup)
                    .add("neumann_rate", pert.neumann_rate)
                    .add("neumann_bound", bound)
                    .str()};
}

// ---------------------------------------------------------------- 8

Outcome eigenvalue_oracle() {
  const GridSpec g(3, 6.0, 48);
  const Potential v = square_well(g, 5.0, 1.0);
  LobpcgOptions lopt;
  lopt.count = 1;
  const auto pairs = lowest_eigenpairs(v, 1, lopt);
  const double ground = pairs.front().value;
  ScanOptions opt;
  opt.lower = -4.5;
  opt.upper = -0.1;
  opt.steps = 24;
  const EigenScanResult plus = eigen_scan(v, opt);
  opt.sign = Sign::minus;
  const EigenScanResult minus = eigen_scan(v, opt);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : plus.candidates) best = std::min(best, std::abs(c.lambda - ground) / std::abs(ground));
  bool coincide = plus.candidates.size() == minus.candidates.size();
  double worst_gap = 0.0;
  for (std::size_t i = 0; coincide && i < plus.candidates.size(); ++i) {
    worst_gap = std::max(worst_gap, std::abs(plus.candidates[i].lambda - minus.candidates[i].lambda));
    coincide = worst_gap <= plus.step;
  }
  const bool pass = pairs.front().converged && best <= 0.01 && coincide;
  return {pass, Detail()
                    .add("oracle_eigenvalue", ground)
                    .add("candidates", plus.candidates.size())
                    .add("best_relative_error", best)
                    .add("plus_minus_gap", worst_gap)
                    .add("scan_step", plus.step)
                    .str()};
}

// ---------------------------------------------------------------- 9

Outcome example_tail() {
  const double q = 2.0;
  const int terms = 128;
  const GridSpec g(3, 4.0, 64);
  const Potential full = example_potential(q, terms, g);
  double previous = std::numeric_limits<double>::infinity();
  bool decreasing = true, within = true;
  double worst_grid = 0.0, min_ratio = 1e300, max_ratio = 0.0;
  for (int order : {1, 2, 4, 8, 16, 32, 64}) {
    const Field head = order > 1 ? example_potential(q, order - 1, g).field() : zero_field(g);
    const double grid_tail = lorentz_norm(full.field() - head, LorentzExponents::weak(q));
    const double exact_truncated = example_tail_norm(q, order, terms);
    worst_grid = std::max(worst_grid, std::abs(grid_tail - exact_truncated) / exact_truncated);
    const double exact = example_tail_norm(q, order, 1000000);
    const double ratio = exact / example_tail_bound(q, order);
    decreasing = decreasing && exact < previous;
    within = within && ratio <= 2.0 && ratio >= 0.5;
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
    previous = exact;
  }
  const bool pass = decreasing && within && worst_grid <= 0.01;
  return {pass, Detail()
                    .add("decreasing", decreasing)
                    .add("min_ratio_to_log_factor", min_ratio)
                    .add("max_ratio_to_log_factor", max_ratio)
                    .add("grid_vs_exact", worst_grid)
                    .str()};
}

// ---------------------------------------------------------------- 10

Outcome determinism() {
  using namespace lap::cli;
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c = default_config("norms");
    c.grid = {2, 8.0, 64};
    c.family.count = 2;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config("resolvent");
    c.grid = {2, 8.0, 64};
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config("kernel");
    c.kernel.radii = {5.0, 10.0};
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config("sweep");
    c.grid = {2, 8.0, 64};
    c.lambdas = {1.0, 1.5};
    c.epsilons = {1e-1, 1e-2};
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config("spectrum");
    c.grid = {2, 6.0, 32};
    c.spectrum.steps = 8;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config("potential");
    c.potential.terms = 64;
    configs.push_back(c);
  }
  bool pass = true;
  int tables = 0;
  std::string mismatched;
  for (const auto& c : configs) {
    const CommandOutput a = run_command(c);
    const CommandOutput b = run_command(c);
    if (a.tables.size() != b.tables.size()) {
      pass = false;
      mismatched += c.command + " ";
      continue;
    }
    for (std::size_t i = 0; i < a.tables.size(); ++i) {
      ++tables;
      if (to_csv(a.tables[i]) != to_csv(b.tables[i])) {
        pass = false;
        mismatched += c.command + "/" + a.tables[i].name + " ";
      }
    }
  }
  return {pass, Detail().add("commands", configs.size()).add("tables", tables).add("mismatched", mismatched.empty() ? "none" : mismatched).str()};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{transform_fidelity,  plemelj_correctness, embedding_constants,
                                                       restriction_bound,   kernel_decay,        free_sweep_drift,
                                                       perturbed_resolvent, eigenvalue_oracle,   example_tail,
                                                       determinism};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = criteria[k]();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("criterion %zu: %s (%s; %.1f s)\n", k + 1, outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
