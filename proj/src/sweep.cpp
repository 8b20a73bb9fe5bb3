#include "lap/sweep.hpp"

#include "lap/boundary.hpp"
#include "lap/multiplier.hpp"
#include "lap/parallel.hpp"
#include "lap/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lap {

void SweepConfig::validate() const {
  if (m < 1) throw std::invalid_argument("sweep: m must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("sweep: delta must lie in (0, 1]");
  if (lambdas.empty() || epsilons.empty()) throw std::invalid_argument("sweep: empty lambda or epsilon grid");
  for (double l : lambdas) {
    if (l < delta - 1e-12 || l > 1.0 / delta + 1e-12) {
      std::ostringstream msg;
      msg << "sweep: lambda = " << l << " lies outside [delta, 1/delta] = [" << delta << ", " << 1.0 / delta << "]";
      throw std::invalid_argument(msg.str());
    }
  }
  for (double e : epsilons)
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("sweep: epsilons must lie in (0, 1]");
}

namespace {

struct CellKernels {
  RadialConvolution plain;
  RadialConvolution theta;
  RadialConvolution order;
};

void finish(SweepReport& report, const SweepConfig& config) {
  report.epsilons = config.epsilons;
  report.sup_by_epsilon.assign(config.epsilons.size(), 0.0);
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const SweepCell& c = report.cells[i];
    const std::size_t e = i % config.epsilons.size();
    report.sup_by_epsilon[e] = std::max(report.sup_by_epsilon[e], c.proxy);
    report.holes += c.holes;
    report.max_residual = std::max(report.max_residual, c.residual);
    report.neumann_rate = std::max(report.neumann_rate, c.neumann_rate);
    report.max_spectral_radius = std::max(report.max_spectral_radius, c.spectral_radius);
  }
  report.sup = *std::max_element(report.sup_by_epsilon.begin(), report.sup_by_epsilon.end());
  auto drift_over = [&](double lo, double hi) {
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < report.epsilons.size(); ++e) {
      if (report.epsilons[e] < lo * (1 - 1e-12) || report.epsilons[e] > hi * (1 + 1e-12)) continue;
      mx = std::max(mx, report.sup_by_epsilon[e]);
      mn = std::min(mn, report.sup_by_epsilon[e]);
    }
    return mn > 0.0 && std::isfinite(mn) ? mx / mn : 1.0;
  };
  const double eps_min = *std::min_element(report.epsilons.begin(), report.epsilons.end());
  report.drift = drift_over(0.0, 1.0);
  report.last_decade_drift = drift_over(eps_min, 10.0 * eps_min);
}

SweepReport run_sweep(const Potential* potential, const std::vector<NamedField>& family, const SweepConfig& config) {
  config.validate();
  SweepReport report;
  if (family.empty()) throw std::invalid_argument("sweep: empty test family");
  const GridSpec& grid = family.front().field.grid();
  const int d = grid.dimension();
  const CompositeNormConfig norms(config.m, d, config.lambda_ref);
  std::vector<double> x_bounds;
  for (const auto& nf : family) {
    require_same_grid(nf.field, family.front().field);
    report.family.push_back(nf.name);
    x_bounds.push_back(x_norm_upper(nf.field, norms).value);
  }
  const double theta = norms.theta();
  const int m = config.m;
  const RadialWeight theta_weight = [theta](double rho) { return bessel_weight(rho, theta); };
  const RadialWeight order_weight = [m](double rho) { return bessel_weight(rho, m); };
  const std::size_t ne = config.epsilons.size();
  report.cells.resize(config.lambdas.size() * ne);

  const std::vector<Index> empty;
  const std::vector<Index>& support = potential ? potential->support() : empty;
  const ComplexVector v_support =
      potential ? potential->support_values().cast<Complex>().eval() : ComplexVector();

  parallel_for(config.lambdas.size(), config.workers, [&](std::size_t li) {
    const double lambda = config.lambdas[li];
    const ResolventKernels kernels(grid, m, Complex(lambda, 0.0), config.window_fraction);
    for (std::size_t ei = 0; ei < ne; ++ei) {
      const Complex z(lambda, sign_value(config.sign) * config.epsilons[ei]);
      const CellKernels k{kernels.resolvent(z), kernels.resolvent(z, theta_weight), kernels.resolvent(z, order_weight)};
      SweepCell cell;
      cell.lambda = lambda;
      cell.epsilon = config.epsilons[ei];
      Eigen::MatrixXcd restricted;
      if (potential && config.track_neumann && !support.empty())
        restricted = k.plain.restricted(support) * potential->support_values().asDiagonal();
      for (std::size_t fi = 0; fi < family.size(); ++fi) {
        const Field& f = family[fi].field;
        Field u_theta = k.theta.apply(f);
        Field u_order = k.order.apply(f);
        if (potential && !support.empty()) {
          const BsSolve solve = bs_solve(RadialResolvent(k.plain, z), *potential, f, config.solver);
          cell.residual = std::max(cell.residual, solve.residual);
          cell.iterations = std::max(cell.iterations, solve.iterations);
          cell.spectral_radius = std::max(cell.spectral_radius, solve.spectral_radius);
          cell.sigma_min = std::min(cell.sigma_min, solve.sigma_min);
          if (solve.flagged) {
            ++cell.holes;
            continue;
          }
          if (config.track_neumann) {
            ComplexVector term(static_cast<Index>(support.size()));
            const Field free = k.plain.apply(f);
            for (std::size_t i = 0; i < support.size(); ++i) term[static_cast<Index>(i)] = free.values()[support[i]];
            double previous = xstar_parts(u_theta, u_order, d).value();
            const double first = previous;
            for (int t = 0; t < config.neumann_terms && previous > 1e-10 * first; ++t) {
              const ComplexVector sources = v_support.cwiseProduct(term);
              const double size = xstar_parts(k.theta.apply_sparse(support, sources),
                                              k.order.apply_sparse(support, sources), d)
                                      .value();
              if (previous > 0.0) cell.neumann_rate = std::max(cell.neumann_rate, size / previous);
              previous = size;
              term = -(restricted * term).eval();
            }
          }
          const ComplexVector sources = v_support.cwiseProduct(solve.support_solution);
          u_theta = u_theta - k.theta.apply_sparse(support, sources);
          u_order = u_order - k.order.apply_sparse(support, sources);
        }
        const XstarParts parts = xstar_parts(u_theta, u_order, d);
        const double ratio = x_bounds[fi] > 0.0 ? parts.value() / x_bounds[fi] : 0.0;
        if (ratio > cell.proxy) {
          cell.proxy = ratio;
          cell.argmax = family[fi].name;
          cell.lorentz = parts.lorentz;
          cell.bstar = parts.bstar;
        }
      }
      report.cells[li * ne + ei] = cell;
    }
  });
  finish(report, config);
  return report;
}

}  // namespace

SweepReport lap_free_sweep(const std::vector<NamedField>& family, const SweepConfig& config) {
  return run_sweep(nullptr, family, config);
}

SweepReport lap_perturbed_sweep(const Potential& potential, const std::vector<NamedField>& family,
                                const SweepConfig& config) {
  return run_sweep(&potential, family, config);
}

}  // namespace lap
