#include "lap/boundary.hpp"

#include "lap/multiplier.hpp"

#include <cmath>
#include <sstream>

namespace lap {

std::vector<double> default_epsilons() {
  std::vector<double> eps;
  for (int k = 0; k < 7; ++k) eps.push_back(0.1 * std::ldexp(1.0, -k));
  return eps;
}

void BoundarySpec::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("boundary: delta must lie in (0, 1]");
  if (m < 1) throw std::invalid_argument("boundary: m must be >= 1");
  if (!(lambda >= delta * (1 - 1e-12) && lambda <= (1 + 1e-12) / delta)) {
    std::ostringstream msg;
    msg << "boundary: lambda = " << lambda << " lies outside [" << delta << ", " << 1.0 / delta << "]";
    throw std::invalid_argument(msg.str());
  }
  if (backend == Backend::epsilon_limit && epsilons.size() < 2)
    throw std::invalid_argument("boundary: the epsilon sequence needs at least two entries");
}

double BoundarySpec::radius() const { return shell_radius(lambda, m); }

double box_diameter(const GridSpec& grid) {
  return (grid.points_per_axis() - 1) * grid.spacing() * std::sqrt(static_cast<double>(grid.dimension()));
}

RadialLayout layout_for(Complex z, int m, double rho_max, double max_distance, double window_fraction,
                        int extra_nodes) {
  LayoutOptions options;
  options.window_fraction = window_fraction;
  options.extra_nodes = extra_nodes;
  if (z.real() > 0.0) {
    const double r = shell_radius(z.real(), m);
    if (r < rho_max * (1.0 - window_fraction)) return RadialLayout(rho_max, max_distance, r, options);
  }
  const double scale = std::pow(std::abs(z), 1.0 / (2.0 * m));
  options.panel_width = std::min(0.5, std::max(0.05, 0.5 * scale));
  return RadialLayout(rho_max, max_distance, std::nullopt, options);
}

namespace {

RadialRule rule_for(const RadialLayout& layout, const BoundarySpec& spec, ExtrapolationReport* report) {
  if (spec.backend == Backend::plemelj) return plemelj_rule(layout, spec.lambda, spec.m, spec.sign);
  return epsilon_limit_rule(layout, spec.lambda, spec.m, spec.sign, spec.epsilons, report);
}

struct RadialEvaluation {
  Complex value;
  Complex surface;
  double scale;
  ExtrapolationReport report;
};

template <typename Means>
RadialEvaluation evaluate(const RadialLayout& layout, const BoundarySpec& spec, int d, Means&& means) {
  RadialEvaluation out;
  const RadialRule rule = rule_for(layout, spec, &out.report);
  const Eigen::VectorXd& rho = rule.nodes();
  Eigen::VectorXcd values = means(rho);
  for (Index j = 0; j < rho.size(); ++j) values[j] *= std::pow(rho[j], d - 1);
  const double norm = std::pow(2.0 * kPi, -d);
  out.value = norm * rule.apply(values);
  out.surface = norm * rule.surface_part(values);
  out.scale = norm * (rule.weights().cwiseAbs().array() * values.cwiseAbs().array()).sum();
  return out;
}

template <typename Means>
PairingResult pairing_from_means(const BoundarySpec& spec, int d, double rho_max, double max_distance,
                                 Means&& means) {
  spec.validate();
  const RadialLayout layout = layout_for(spec.lambda, spec.m, rho_max, max_distance, spec.window_fraction);
  if (!layout.singular_radius())
    throw std::invalid_argument("boundary pairing: the shell of lambda lies beyond the resolved frequencies");
  const RadialEvaluation coarse = evaluate(layout, spec, d, means);
  const RadialEvaluation fine = evaluate(layout.refined(8), spec, d, means);
  PairingResult result;
  result.value = fine.value;
  result.error_estimate = std::abs(fine.value - coarse.value);
  result.extrapolation = fine.report;
  if (spec.backend == Backend::plemelj) {
    result.surface = fine.surface;
    result.principal = fine.value - fine.surface;
  }
  if (result.error_estimate > spec.tolerance * std::max(fine.scale, 1e-300)) {
    std::ostringstream msg;
    msg << "boundary pairing: estimated quadrature error " << result.error_estimate << " exceeds tolerance "
        << spec.tolerance << " relative to " << fine.scale;
    throw NumericalError(msg.str());
  }
  return result;
}

}  // namespace

PairingResult boundary_pairing(const SpectralCorrelation& correlation, double rho_max, const BoundarySpec& spec) {
  return pairing_from_means(spec, correlation.dimension(), rho_max, correlation.max_distance(),
                            [&](const Eigen::VectorXd& rho) { return correlation.spherical_means(rho); });
}

PairingResult boundary_pairing(const Field& f, const Field& g, const BoundarySpec& spec) {
  spec.validate();
  const SpectralCorrelation correlation(f, g);
  return boundary_pairing(correlation, f.grid().nyquist(), spec);
}

PairingResult boundary_pairing(const SpectralFunction& f_hat, const SpectralFunction& g_hat, int d,
                               const BoundarySpec& spec, const AnalyticPairingOptions& options) {
  const SpectralFunction product = [&](const Point& xi) { return f_hat(xi) * std::conj(g_hat(xi)); };
  auto means = [&](const Eigen::VectorXd& rho) {
    Eigen::VectorXcd out(rho.size());
    for (Index j = 0; j < rho.size(); ++j) {
      const SphereIntegral s = integrate_sphere(product, d, rho[j], options.sphere_tolerance, 0, 9, 1e-300);
      if (!s.converged && s.error > options.sphere_tolerance * 1e-3) {
        std::ostringstream msg;
        msg << "boundary pairing: sphere quadrature did not converge at radius " << rho[j];
        throw NumericalError(msg.str());
      }
      // The sphere rule carries rho^(d-1); divide it back out.
      out[j] = s.value / std::pow(rho[j], d - 1);
    }
    return out;
  };
  return pairing_from_means(spec, d, options.rho_max, options.extent, means);
}

Complex resolvent_pairing(const SpectralCorrelation& correlation, double rho_max, Complex z, int m) {
  if (z.imag() == 0.0 && z.real() >= 0.0) throw std::domain_error("resolvent pairing: z lies on [0, inf)");
  const RadialLayout layout = layout_for(z, m, rho_max, correlation.max_distance());
  const RadialRule rule = resolvent_rule(layout, z, m);
  const int d = correlation.dimension();
  Eigen::VectorXcd values = correlation.spherical_means(rule.nodes());
  for (Index j = 0; j < values.size(); ++j) values[j] *= std::pow(rule.nodes()[j], d - 1);
  return std::pow(2.0 * kPi, -d) * rule.apply(values);
}

ResolventKernels::ResolventKernels(const GridSpec& grid, int m, Complex z_reference, double window_fraction)
    : grid_(grid),
      m_(m),
      bins_(std::make_shared<DistanceBins>(grid)),
      layout_(layout_for(z_reference, m, grid.nyquist(), box_diameter(grid), window_fraction)),
      basis_(std::make_shared<KernelBasis>(bins_, layout_)) {}

RadialConvolution ResolventKernels::from_rule(const RadialRule& rule, const RadialWeight& weight) const {
  return RadialConvolution(bins_, basis_->kernel(rule, weight));
}

RadialConvolution ResolventKernels::resolvent(Complex z, const RadialWeight& weight) const {
  if (z.imag() == 0.0 && z.real() >= 0.0) throw std::domain_error("resolvent kernels: z lies on [0, inf)");
  return from_rule(resolvent_rule(layout_, z, m_), weight);
}

RadialConvolution ResolventKernels::boundary(double lambda, Sign sign, Backend backend,
                                             const std::vector<double>& epsilons, const RadialWeight& weight,
                                             ExtrapolationReport* report) const {
  if (backend == Backend::plemelj) return from_rule(plemelj_rule(layout_, lambda, m_, sign), weight);
  return from_rule(epsilon_limit_rule(layout_, lambda, m_, sign, epsilons, report), weight);
}

RadialConvolution ResolventKernels::surface(double lambda, Sign sign, const RadialWeight& weight) const {
  const RadialRule full = plemelj_rule(layout_, lambda, m_, sign);
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(full.weights().size());
  w[full.surface_index()] = full.weights()[full.surface_index()];
  return from_rule(RadialRule(full.nodes(), std::move(w), full.surface_index()), weight);
}

BoundaryApplyResult boundary_apply(const Field& f, const BoundarySpec& spec, const RadialWeight& weight,
                                   bool cross_check) {
  spec.validate();
  if (f.domain() != Domain::physical) throw std::invalid_argument("boundary_apply: field must be physical");
  const ResolventKernels kernels(f.grid(), spec.m, spec.lambda, spec.window_fraction);
  if (!kernels.layout().singular_radius())
    throw std::invalid_argument("boundary_apply: the shell of lambda lies beyond the resolved frequencies");
  ExtrapolationReport report;
  const RadialConvolution primary =
      kernels.boundary(spec.lambda, spec.sign, spec.backend, spec.epsilons, weight, &report);
  BoundaryApplyResult result{primary.apply(f), std::nullopt, std::nullopt, 0.0, false, {}};
  result.extrapolation = report;
  if (spec.backend == Backend::plemelj) result.surface = kernels.surface(spec.lambda, spec.sign, weight).apply(f);
  if (cross_check) {
    const Backend other = spec.backend == Backend::plemelj ? Backend::epsilon_limit : Backend::plemelj;
    ExtrapolationReport other_report;
    result.alternate =
        kernels.boundary(spec.lambda, spec.sign, other, spec.epsilons, weight, &other_report).apply(f);
    const double scale = std::max(result.u.values().norm(), 1e-300);
    result.disagreement = (result.u.values() - result.alternate->values()).norm() / scale;
    result.flagged = result.disagreement > spec.cross_check_tolerance || report.diverging || other_report.diverging;
  } else {
    result.flagged = report.diverging;
  }
  return result;
}

std::vector<Field> gaussian_probes(const GridSpec& grid, double frequency) {
  const int d = grid.dimension();
  std::vector<Point> centers;
  Point c = Point::Zero(d);
  centers.push_back(c);
  c[0] = 1.0;
  centers.push_back(c);
  c = Point::Zero(d);
  c[d - 1] = -1.5;
  centers.push_back(c);
  std::vector<Field> probes;
  for (const Point& center : centers) {
    probes.push_back(sample([center](const Point& x) { return Complex(std::exp(-0.5 * (x - center).squaredNorm())); },
                            grid));
  }
  for (const Point& center : centers) {
    probes.push_back(sample(
        [center, frequency](const Point& x) {
          return std::exp(-0.5 * (x - center).squaredNorm()) * std::exp(Complex(0.0, frequency * x[0]));
        },
        grid));
  }
  return probes;
}

double defining_residual(const Field& u, const Field& rhs, Complex z, int m, const std::vector<Field>& probes,
                         const Field* potential_term) {
  require_same_grid(u, rhs);
  const Symbol shifted = Symbol::radial(
      [m, zc = std::conj(z)](double rho) { return std::pow(rho * rho, m) - zc; }, "P-conj(z)");
  double worst = 0.0, scale = 0.0;
  for (const Field& phi : probes) {
    const Complex a = inner(u, apply_symbol(shifted, phi));
    const Complex b = potential_term ? inner(*potential_term, phi) : Complex(0.0);
    const Complex c = inner(rhs, phi);
    worst = std::max(worst, std::abs(a + b - c));
    scale = std::max(scale, std::abs(a) + std::abs(b) + std::abs(c));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace lap
