#include "lap/kernel.hpp"

#include "lap/multiplier.hpp"
#include "lap/parallel.hpp"
#include "lap/quadrature.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lap {

double PatchCutoff::operator()(double xi_prime_norm, double radius) const {
  const double t = xi_prime_norm / radius;
  return 1.0 - smooth_step((t - plateau) / (support - plateau));
}

GraphPoint graph_and_weight(double lambda, int m, const Point& xi_prime) {
  const double r = shell_radius(lambda, m);
  const double s2 = xi_prime.squaredNorm();
  if (s2 >= r * r) {
    std::ostringstream msg;
    msg << "graph_and_weight: |xi'| = " << std::sqrt(s2) << " is not below r(lambda) = " << r;
    throw std::domain_error(msg.str());
  }
  GraphPoint out;
  out.height = std::sqrt(r * r - s2);
  CutoffSpec spec;
  spec.lambda = lambda;
  spec.m = m;
  const double full2 = s2 + out.height * out.height;
  const double chi = cutoff_profile(spec, std::pow(full2, m));
  out.weight = chi / (2.0 * m * std::pow(full2, m - 1) * out.height);
  return out;
}

namespace {

constexpr int kPanelNodes = 20;

// Composite Gauss-Legendre sum of fn over [a, b] with the given panel count.
template <typename Fn>
Complex composite(Fn&& fn, double a, double b, int panels) {
  const GaussRule& rule = gauss_legendre(kPanelNodes);
  const double width = (b - a) / panels;
  Complex acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * width;
    for (int k = 0; k < kPanelNodes; ++k) acc += (0.5 * width * rule.weights[k]) * fn(c + 0.5 * width * rule.nodes[k]);
  }
  return acc;
}

}  // namespace

KernelSample kernel_k_plus(double lambda, int m, const Point& x, double tol, int node_budget,
                           const PatchCutoff& patch) {
  const int d = static_cast<int>(x.size());
  if (d != 2 && d != 3) throw std::invalid_argument("kernel_k_plus: only d = 2, 3 are supported");
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_k_plus: tol must be positive");
  KernelSample sample;
  sample.x = x;
  const double xd = x[d - 1];
  if (xd < 0.0) {
    sample.value = 0.0;
    return sample;
  }
  const double r = shell_radius(lambda, m);
  const double a = patch.support * r;
  const Point xp = x.head(d - 1);
  const double xp_norm = xp.norm();

  auto weight = [&](double s) {
    Point xi_prime = Point::Zero(d - 1);
    xi_prime[0] = s;
    const GraphPoint g = graph_and_weight(lambda, m, xi_prime);
    return std::pair<double, double>{g.height, g.weight * patch(std::abs(s), r)};
  };
  std::function<Complex(double)> integrand;
  double lo = 0.0;
  if (d == 2) {
    lo = -a;
    integrand = [&](double s) {
      const auto [phi, q] = weight(s);
      return q * std::exp(Complex(0.0, xd * phi + x[0] * s));
    };
  } else {
    // Angular integral of exp(i x' xi') over |xi'| = s is 2 pi J0(s |x'|).
    integrand = [&](double s) {
      const auto [phi, q] = weight(s);
      return 2.0 * kPi * s * Eigen::numext::bessel_j0(s * xp_norm) * q * std::exp(Complex(0.0, xd * phi));
    };
  }
  const double extent = std::max(1.0, x.norm());
  int panels = std::max(2, static_cast<int>(std::ceil((a - lo) * extent * 2.5 / 8.0)));
  Complex previous = composite(integrand, lo, a, panels);
  Complex current = previous;
  bool converged = false;
  while (2 * panels * kPanelNodes <= node_budget) {
    panels *= 2;
    current = composite(integrand, lo, a, panels);
    sample.error_estimate = std::abs(current - previous);
    if (sample.error_estimate < tol) {
      converged = true;
      break;
    }
    previous = current;
  }
  sample.nodes = panels * kPanelNodes;
  const double prefactor = std::pow(2.0 * kPi, -(d - 1));
  sample.value = Complex(0.0, prefactor) * current;
  sample.error_estimate *= prefactor;
  sample.flagged = !converged;
  return sample;
}

DecayTable decay_scan(double lambda, int m, int d, const std::vector<double>& radii,
                      const std::vector<Point>& directions, double tol, int workers) {
  DecayTable table;
  if (radii.empty() || directions.empty()) return table;
  for (const Point& dir : directions)
    if (dir.size() != d || !(dir.norm() > 0.0)) throw std::invalid_argument("decay_scan: bad direction");
  table.rows.resize(radii.size() * directions.size());
  parallel_for(table.rows.size(), workers, [&](std::size_t i) {
    const Point dir = directions[i / radii.size()].normalized();
    const double radius = radii[i % radii.size()];
    const Point x = radius * dir;
    const KernelSample s = kernel_k_plus(lambda, m, x, tol);
    DecayRow row;
    row.x = x;
    row.radius = x.norm();
    row.magnitude = std::abs(s.value);
    row.normalized = row.magnitude * std::pow(1.0 + row.radius, 0.5 * (d - 1));
    row.error_estimate = s.error_estimate;
    row.flagged = s.flagged;
    table.rows[i] = row;
  });
  // Rows below the x_d = 0 hyperplane vanish identically and carry no decay information.
  std::vector<double> normalized;
  for (const auto& row : table.rows)
    if (row.x[d - 1] >= 0.0) normalized.push_back(row.normalized);
  if (normalized.empty()) return table;
  table.empirical_constant = *std::max_element(normalized.begin(), normalized.end());
  std::vector<double> sorted = normalized;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  table.median_normalized = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  for (double v : normalized) {
    if (table.median_normalized > 0.0 && v > 0.0)
      table.band_ratio = std::max({table.band_ratio, v / table.median_normalized, table.median_normalized / v});
  }
  return table;
}

WeightRatioScan weight_ratio_scan(const WeightParams& weight, double extent, int samples) {
  if (samples < 2) throw std::invalid_argument("weight_ratio_scan: need at least two samples");
  WeightRatioScan scan;
  scan.max_ratio = 0.0;
  scan.min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double xd = -extent + 2.0 * extent * i / (samples - 1);
    for (int j = 0; j < i; ++j) {
      const double yd = -extent + 2.0 * extent * j / (samples - 1);
      const double ratio = mu_weight(std::abs(xd), weight) / mu_weight(std::abs(yd), weight);
      if (ratio > scan.max_ratio) {
        scan.max_ratio = ratio;
        scan.max_at_x = xd;
        scan.max_at_y = yd;
      }
      scan.min_ratio = std::min(scan.min_ratio, ratio);
    }
  }
  return scan;
}

}  // namespace lap
