#include "lap/radial.hpp"

#include "lap/fft.hpp"
#include "lap/quadrature.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <cmath>
#include <sstream>

namespace lap {

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

double sphere_transform(int d, double t) {
  const double at = std::abs(t);
  switch (d) {
    case 2:
      return 2.0 * kPi * Eigen::numext::bessel_j0(at);
    case 3:
      return at < 1e-4 ? 4.0 * kPi * (1.0 - at * at / 6.0) : 4.0 * kPi * std::sin(at) / at;
    case 4:
      return at < 1e-4 ? 2.0 * kPi * kPi * (1.0 - at * at / 8.0)
                       : 4.0 * kPi * kPi * Eigen::numext::bessel_j1(at) / at;
    default:
      throw std::invalid_argument("sphere_transform: unsupported dimension");
  }
}

namespace {

int oscillation_nodes(double width, double max_distance, int minimum, int base) {
  return std::max(minimum, static_cast<int>(std::ceil(0.5 * width * max_distance)) + base);
}

}  // namespace

RadialLayout::RadialLayout(double rho_max, double max_distance, std::optional<double> singular_radius,
                           const LayoutOptions& options)
    : rho_max_(rho_max), max_distance_(max_distance), singular_radius_(singular_radius), options_(options) {
  if (!(rho_max > 0.0)) throw std::invalid_argument("radial layout: rho_max must be positive");
  if (!(max_distance >= 0.0)) throw std::invalid_argument("radial layout: max_distance must be >= 0");
  if (!(options.window_fraction > 0.0 && options.window_fraction <= 0.5))
    throw std::invalid_argument("radial layout: window fraction must lie in (0, 0.5]");

  auto add_segment = [&](double a, double b) {
    if (b - a <= 0.0) return;
    const int count = static_cast<int>(std::ceil((b - a) / options_.panel_width - 1e-12));
    const double width = (b - a) / count;
    for (int k = 0; k < count; ++k) {
      const int p = oscillation_nodes(width, max_distance_, options_.min_nodes, 12) + options_.extra_nodes;
      panels_.push_back(RadialPanel{a + k * width, a + (k + 1) * width, p, false});
    }
  };

  if (singular_radius_) {
    const double r = *singular_radius_;
    if (!(r > 0.0 && r < rho_max))
      throw std::invalid_argument("radial layout: singular radius must lie inside (0, rho_max)");
    window_half_width_ = std::min(options_.window_fraction * r, 0.5 * (rho_max - r));
    add_segment(0.0, r - window_half_width_);
    int p = oscillation_nodes(2.0 * window_half_width_, max_distance_, 24, 16) + options_.extra_nodes;
    p += p % 2;
    panels_.push_back(RadialPanel{r - window_half_width_, r + window_half_width_, p, true});
    add_segment(r + window_half_width_, rho_max);
  } else {
    add_segment(0.0, rho_max);
  }

  Index total = 0;
  for (const auto& panel : panels_) total += panel.nodes;
  const Index extra = singular_radius_ ? 1 : 0;
  nodes_.resize(total + extra);
  gauss_weights_.resize(total + extra);
  Index offset = 0;
  for (const auto& panel : panels_) {
    const GaussRule rule = gauss_legendre(panel.nodes, panel.a, panel.b);
    if (panel.window) {
      window_first_ = offset;
      window_count_ = panel.nodes;
    }
    nodes_.segment(offset, panel.nodes) = rule.nodes;
    gauss_weights_.segment(offset, panel.nodes) = rule.weights;
    offset += panel.nodes;
  }
  if (singular_radius_) {
    nodes_[offset] = *singular_radius_;
    gauss_weights_[offset] = 0.0;
  }
}

RadialLayout RadialLayout::refined(int extra_nodes) const {
  LayoutOptions options = options_;
  options.extra_nodes += extra_nodes;
  return RadialLayout(rho_max_, max_distance_, singular_radius_, options);
}

RadialRule::RadialRule(Eigen::VectorXd nodes, Eigen::VectorXcd weights, Index surface_index)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), surface_index_(surface_index) {
  if (nodes_.size() != weights_.size()) throw std::invalid_argument("radial rule: size mismatch");
}

RadialRule RadialRule::weighted(const RadialWeight& weight) const {
  if (!weight) return *this;
  Eigen::VectorXcd w = weights_;
  for (Index j = 0; j < nodes_.size(); ++j) w[j] *= weight(nodes_[j]);
  return RadialRule(nodes_, std::move(w), surface_index_);
}

Complex RadialRule::surface_part(const Eigen::VectorXcd& values) const {
  return surface_index_ >= 0 ? weights_[surface_index_] * values[surface_index_] : Complex(0.0);
}

namespace {

double p_of(double rho, int m) { return std::pow(rho * rho, m); }

// Integrals of the window cardinal functions against 1 / (rho^(2m) - z).
Eigen::VectorXcd window_moments(const RadialLayout& layout, Complex z, int m) {
  const Index first = layout.window_first(), count = layout.window_count();
  const Eigen::VectorXd nodes = layout.nodes().segment(first, count);
  const Eigen::VectorXd bary = barycentric_weights(nodes);
  const double a = *layout.singular_radius() - layout.window_half_width();
  const double b = *layout.singular_radius() + layout.window_half_width();
  auto integrand = [&](double rho) -> Eigen::VectorXcd {
    const Complex k = 1.0 / (p_of(rho, m) - z);
    return lagrange_basis(nodes, bary, rho).cast<Complex>() * k;
  };
  AdaptiveOptions options;
  options.abs_tol = 1e-15;
  options.rel_tol = 1e-13;
  options.max_intervals = 20000;
  const AdaptiveResult result = integrate_adaptive(integrand, a, b, count, options);
  if (!result.converged) throw NumericalError("resolvent rule: window integral did not converge");
  return result.value;
}

}  // namespace

RadialRule resolvent_rule(const RadialLayout& layout, Complex z, int m) {
  if (m < 1) throw std::invalid_argument("resolvent rule: m must be >= 1");
  const Eigen::VectorXd& nodes = layout.nodes();
  const Eigen::VectorXd& gw = layout.gauss_weights();
  Eigen::VectorXcd weights(nodes.size());
  for (Index j = 0; j < nodes.size(); ++j) {
    if (j == layout.surface_index()) {
      weights[j] = 0.0;
      continue;
    }
    const Complex denom = p_of(nodes[j], m) - z;
    if (std::abs(denom) == 0.0) throw std::domain_error("resolvent rule: node hits the singularity");
    weights[j] = gw[j] / denom;
  }
  if (layout.singular_radius()) {
    weights.segment(layout.window_first(), layout.window_count()) = window_moments(layout, z, m);
    weights[layout.surface_index()] = 0.0;
  }
  return RadialRule(nodes, std::move(weights), layout.surface_index());
}

RadialRule plemelj_rule(const RadialLayout& layout, double lambda, int m, Sign sign) {
  if (!layout.singular_radius()) throw std::invalid_argument("plemelj rule: layout has no singular radius");
  const double r = *layout.singular_radius();
  if (std::abs(p_of(r, m) - lambda) > 1e-12 * lambda)
    throw std::invalid_argument("plemelj rule: layout window is not centred on the shell of lambda");
  const Eigen::VectorXd& nodes = layout.nodes();
  const Eigen::VectorXd& gw = layout.gauss_weights();
  Eigen::VectorXcd weights(nodes.size());
  for (Index j = 0; j < nodes.size(); ++j)
    weights[j] = j == layout.surface_index() ? 0.0 : gw[j] / (p_of(nodes[j], m) - lambda);

  // Symmetric subtraction on the window: sum w_i (g_i - g(r)) / (rho_i - r) with g = H (rho - r) / (P - lambda).
  const Index first = layout.window_first(), count = layout.window_count();
  const Eigen::VectorXd wnodes = nodes.segment(first, count);
  const Eigen::VectorXd cardinal = lagrange_basis(wnodes, barycentric_weights(wnodes), r);
  const double coarea = 1.0 / (2.0 * m * std::pow(r, 2 * m - 1));
  double odd_sum = 0.0;
  for (Index i = 0; i < count; ++i) odd_sum += gw[first + i] / (wnodes[i] - r);
  for (Index i = 0; i < count; ++i) weights[first + i] -= cardinal[i] * coarea * odd_sum;
  weights[layout.surface_index()] = Complex(0.0, sign_value(sign) * kPi * coarea);
  return RadialRule(nodes, std::move(weights), layout.surface_index());
}

RadialRule epsilon_limit_rule(const RadialLayout& layout, double lambda, int m, Sign sign,
                              const std::vector<double>& epsilons, ExtrapolationReport* report) {
  if (epsilons.size() < 2) throw std::invalid_argument("epsilon limit: need at least two epsilons");
  const std::size_t count = epsilons.size();
  std::vector<Eigen::VectorXcd> table;
  table.reserve(count);
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon limit: epsilons must be positive");
    table.push_back(resolvent_rule(layout, Complex(lambda, sign_value(sign) * eps), m).weights());
  }
  std::vector<Eigen::VectorXcd> diagonal{table.back()};
  for (std::size_t level = 1; level < count; ++level) {
    for (std::size_t i = count - 1; i >= level; --i) {
      const double hi = epsilons[i - level], lo = epsilons[i];
      table[i] = (hi * table[i] - lo * table[i - 1]) / (hi - lo);
      if (i == level) break;
    }
    diagonal.push_back(table[count - 1]);
  }
  const std::size_t k = diagonal.size();
  if (report) {
    const double scale = diagonal.back().norm();
    report->error = k >= 2 ? (diagonal[k - 1] - diagonal[k - 2]).norm() : 0.0;
    report->diverging = false;
    if (k >= 3) {
      const double last = (diagonal[k - 1] - diagonal[k - 2]).norm();
      const double prev = (diagonal[k - 2] - diagonal[k - 3]).norm();
      report->diverging = last > prev && last > 1e-12 * scale;
    }
  }
  return RadialRule(layout.nodes(), diagonal.back(), layout.surface_index());
}

DistanceBins::DistanceBins(const GridSpec& grid) : grid_(grid) {
  const int d = grid.dimension();
  const long long n1 = grid.points_per_axis() - 1;
  const long long max_square = d * n1 * n1;
  std::vector<char> reachable(max_square + 1, 0);
  reachable[0] = 1;
  long long reach = 0;
  for (int a = 0; a < d; ++a) {
    std::vector<char> next(max_square + 1, 0);
    for (long long s = 0; s <= reach; ++s) {
      if (!reachable[s]) continue;
      for (long long k = 0; k <= n1; ++k) next[s + k * k] = 1;
    }
    reachable.swap(next);
    reach += n1 * n1;
  }
  lookup_.assign(max_square + 1, -1);
  for (long long s = 0; s <= max_square; ++s) {
    if (!reachable[s]) continue;
    lookup_[s] = static_cast<int>(squares_.size());
    squares_.push_back(s);
  }
  distances_.resize(count());
  for (Index b = 0; b < count(); ++b) distances_[b] = grid.spacing() * std::sqrt(static_cast<double>(squares_[b]));
}

Index DistanceBins::prefix_count(double max_distance) const {
  Index k = 0;
  while (k < count() && distances_[k] <= max_distance * (1.0 + 1e-12)) ++k;
  return k;
}

KernelBasis::KernelBasis(std::shared_ptr<const DistanceBins> bins, const RadialLayout& layout, Index bin_limit)
    : bins_(std::move(bins)), nodes_(layout.nodes()) {
  const int d = bins_->grid().dimension();
  const Index rows = bin_limit < 0 ? bins_->count() : std::min(bin_limit, bins_->count());
  const double norm = std::pow(2.0 * kPi, -d);
  phi_.resize(rows, nodes_.size());
  const Eigen::VectorXd& s = bins_->distances();
  for (Index j = 0; j < nodes_.size(); ++j) {
    const double rho = nodes_[j];
    const double radial = norm * std::pow(rho, d - 1);
    for (Index b = 0; b < rows; ++b) phi_(b, j) = radial * sphere_transform(d, rho * s[b]);
  }
}

Eigen::VectorXcd KernelBasis::kernel(const RadialRule& rule, const RadialWeight& weight) const {
  if (rule.nodes().size() != nodes_.size() || (rule.nodes() - nodes_).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("kernel basis: rule nodes do not match the basis layout");
  const RadialRule folded = rule.weighted(weight);
  const Eigen::VectorXd re = folded.weights().real(), im = folded.weights().imag();
  Eigen::VectorXcd out(phi_.rows());
  out.real() = phi_ * re;
  out.imag() = phi_ * im;
  return out;
}

namespace {

std::array<int, 4> padded_shape(const GridSpec& grid) {
  std::array<int, 4> shape{};
  for (int a = 0; a < grid.dimension(); ++a) shape[a] = 2 * grid.points_per_axis();
  return shape;
}

Index padded_size(const GridSpec& grid) {
  Index total = 1;
  for (int a = 0; a < grid.dimension(); ++a) total *= 2 * grid.points_per_axis();
  return total;
}

// Copies the box into the low corner of the padded array.
Eigen::VectorXcd pad(const Field& f) {
  const GridSpec& grid = f.grid();
  const int n = grid.points_per_axis(), d = grid.dimension();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(padded_size(grid));
  for_each_node(grid, [&](Index flat, const LatticeIndex& idx) {
    Index p = 0;
    for (int a = 0; a < d; ++a) p = p * (2 * n) + idx[a];
    out[p] = f.values()[flat];
  });
  return out;
}

Eigen::VectorXcd unpad(const GridSpec& grid, const Eigen::VectorXcd& padded) {
  const int n = grid.points_per_axis(), d = grid.dimension();
  Eigen::VectorXcd out(grid.size());
  for_each_node(grid, [&](Index flat, const LatticeIndex& idx) {
    Index p = 0;
    for (int a = 0; a < d; ++a) p = p * (2 * n) + idx[a];
    out[flat] = padded[p];
  });
  return out;
}

// Visits every padded index with its signed offset square; offset -n per axis is reported as -1.
template <typename Visitor>
void for_each_offset(const GridSpec& grid, Visitor&& visit) {
  const int n = grid.points_per_axis(), d = grid.dimension();
  const Index total = padded_size(grid);
  std::array<int, 4> idx{0, 0, 0, 0};
  for (Index p = 0; p < total; ++p) {
    long long square = 0;
    bool valid = true;
    for (int a = 0; a < d; ++a) {
      const int k = idx[a];
      if (k == n) valid = false;
      const long long o = k < n ? k : k - 2 * n;
      square += o * o;
    }
    visit(p, valid ? square : -1LL);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < 2 * n) break;
      idx[a] = 0;
    }
  }
}

long long offset_square(const GridSpec& grid, Index i, Index j) {
  const LatticeIndex a = grid.unflatten(i), b = grid.unflatten(j);
  long long s = 0;
  for (int k = 0; k < grid.dimension(); ++k) {
    const long long o = a[k] - b[k];
    s += o * o;
  }
  return s;
}

}  // namespace

RadialConvolution::RadialConvolution(std::shared_ptr<const DistanceBins> bins, Eigen::VectorXcd kernel)
    : bins_(std::move(bins)), kernel_(std::move(kernel)) {
  if (kernel_.size() > bins_->count()) throw std::invalid_argument("radial convolution: kernel longer than bins");
  if (kernel_.size() == bins_->count()) {
    const GridSpec& g = grid();
    padded_spectrum_ = Eigen::VectorXcd::Zero(padded_size(g));
    for_each_offset(g, [&](Index p, long long square) {
      if (square >= 0) padded_spectrum_[p] = kernel_[bins_->bin_of_square(square)];
    });
    const auto shape = padded_shape(g);
    fft::transform(padded_spectrum_, std::span<const int>(shape.data(), g.dimension()), fft::Sign::negative);
  }
}

Complex RadialConvolution::kernel_at_square(long long square) const {
  const int b = bins_->bin_of_square(square);
  if (b < 0 || b >= kernel_.size()) throw std::out_of_range("radial convolution: distance outside the kernel table");
  return kernel_[b];
}

Field RadialConvolution::apply(const Field& f) const {
  if (f.domain() != Domain::physical) throw std::invalid_argument("radial convolution: field must be physical");
  if (!(f.grid() == grid())) throw std::invalid_argument("radial convolution: grid mismatch");
  if (padded_spectrum_.size() == 0)
    throw std::logic_error("radial convolution: kernel table does not cover the box diameter");
  const GridSpec& g = grid();
  const auto shape = padded_shape(g);
  const std::span<const int> dims(shape.data(), g.dimension());
  Eigen::VectorXcd work = pad(f);
  fft::transform(work, dims, fft::Sign::negative);
  work.array() *= padded_spectrum_.array();
  fft::transform(work, dims, fft::Sign::positive);
  work *= g.cell_volume() / static_cast<double>(work.size());
  return Field(g, unpad(g, work), Domain::physical);
}

Eigen::MatrixXcd RadialConvolution::restricted(const std::vector<Index>& nodes) const {
  const GridSpec& g = grid();
  const Index k = static_cast<Index>(nodes.size());
  Eigen::MatrixXcd out(k, k);
  const double vol = g.cell_volume();
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) out(i, j) = vol * kernel_at_square(offset_square(g, nodes[i], nodes[j]));
  return out;
}

Field RadialConvolution::apply_sparse(const std::vector<Index>& nodes, const Eigen::VectorXcd& weights) const {
  const GridSpec& g = grid();
  if (static_cast<Index>(nodes.size()) != weights.size())
    throw std::invalid_argument("radial convolution: source size mismatch");
  std::vector<LatticeIndex> sources;
  sources.reserve(nodes.size());
  for (Index s : nodes) sources.push_back(g.unflatten(s));
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(g.size());
  const double vol = g.cell_volume();
  for_each_node(g, [&](Index flat, const LatticeIndex& idx) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      long long square = 0;
      for (int a = 0; a < g.dimension(); ++a) {
        const long long o = idx[a] - sources[j][a];
        square += o * o;
      }
      acc += kernel_at_square(square) * weights[j];
    }
    out[flat] = vol * acc;
  });
  return Field(g, std::move(out), Domain::physical);
}

SpectralCorrelation::SpectralCorrelation(const Field& f, const Field& g, double prune)
    : dimension_(f.grid().dimension()) {
  require_same_grid(f, g);
  if (f.domain() != Domain::physical) throw std::invalid_argument("correlation: fields must be physical");
  const GridSpec& grid = f.grid();
  const auto shape = padded_shape(grid);
  const std::span<const int> dims(shape.data(), grid.dimension());
  Eigen::VectorXcd pf = pad(f), pg = pad(g);
  fft::transform(pf, dims, fft::Sign::negative);
  fft::transform(pg, dims, fft::Sign::negative);
  pf.array() *= pg.array().conjugate();
  fft::transform(pf, dims, fft::Sign::positive);
  const double vol = grid.cell_volume();
  pf *= vol * vol / static_cast<double>(pf.size());

  const DistanceBins bins(grid);
  Eigen::VectorXcd sums = Eigen::VectorXcd::Zero(bins.count());
  for_each_offset(grid, [&](Index p, long long square) {
    if (square >= 0) sums[bins.bin_of_square(square)] += pf[p];
  });
  const double peak = sums.cwiseAbs().maxCoeff();
  std::vector<Index> kept;
  for (Index b = 0; b < bins.count(); ++b)
    if (std::abs(sums[b]) > prune * peak) kept.push_back(b);
  distances_.resize(static_cast<Index>(kept.size()));
  coefficients_.resize(static_cast<Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    distances_[i] = bins.distances()[kept[i]];
    coefficients_[i] = sums[kept[i]];
  }
}

Complex SpectralCorrelation::spherical_mean(double rho) const {
  Complex acc = 0.0;
  for (Index b = 0; b < distances_.size(); ++b) acc += coefficients_[b] * sphere_transform(dimension_, rho * distances_[b]);
  return acc;
}

Eigen::VectorXcd SpectralCorrelation::spherical_means(const Eigen::VectorXd& rhos) const {
  Eigen::VectorXcd out(rhos.size());
  for (Index j = 0; j < rhos.size(); ++j) out[j] = spherical_mean(rhos[j]);
  return out;
}

Complex SpectralCorrelation::radial_density(double t, int m) const {
  if (!(t > 0.0)) throw std::invalid_argument("radial density: t must be positive");
  const double rho = std::pow(t, 1.0 / (2.0 * m));
  return std::pow(t, (dimension_ - 2.0 * m) / (2.0 * m)) * spherical_mean(rho) / (2.0 * m);
}

double sphere_restriction_norm(const Field& f, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("restriction: radius must be positive");
  const SpectralCorrelation corr(f, f);
  const double mass = corr.spherical_mean(radius).real() * std::pow(radius, corr.dimension() - 1);
  return std::sqrt(std::max(mass, 0.0));
}

SphereQuadrature::SphereQuadrature(int d, double radius, int level) : dimension_(d), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere quadrature: radius must be positive");
  if (level < 0 || level > 12) throw std::invalid_argument("sphere quadrature: level out of range");
  if (d == 2) {
    const int count = 16 << level;
    nodes_.resize(2, count);
    weights_ = Eigen::VectorXd::Constant(count, 2.0 * kPi * radius / count);
    for (int k = 0; k < count; ++k) {
      const double angle = 2.0 * kPi * k / count;
      nodes_(0, k) = radius * std::cos(angle);
      nodes_(1, k) = radius * std::sin(angle);
    }
  } else if (d == 3) {
    const int polar = 8 << level, azimuth = 2 * polar;
    const GaussRule& rule = gauss_legendre(polar);
    nodes_.resize(3, polar * azimuth);
    weights_.resize(polar * azimuth);
    int k = 0;
    for (int i = 0; i < polar; ++i) {
      const double c = rule.nodes[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < azimuth; ++j, ++k) {
        const double phi = 2.0 * kPi * j / azimuth;
        nodes_(0, k) = radius * s * std::cos(phi);
        nodes_(1, k) = radius * s * std::sin(phi);
        nodes_(2, k) = radius * c;
        weights_[k] = radius * radius * rule.weights[i] * 2.0 * kPi / azimuth;
      }
    }
  } else {
    throw std::invalid_argument("sphere quadrature: only d = 2, 3 are supported");
  }
}

double SphereQuadrature::coarea_factor(int m) const { return 1.0 / (2.0 * m * std::pow(radius_, 2 * m - 1)); }

Complex SphereQuadrature::integrate(const SpectralFunction& fn) const {
  Complex acc = 0.0;
  Point xi(dimension_);
  for (Index k = 0; k < weights_.size(); ++k) {
    xi = nodes_.col(k);
    acc += weights_[k] * fn(xi);
  }
  return acc;
}

SphereIntegral integrate_sphere(const SpectralFunction& fn, int d, double radius, double tol, int start_level,
                                int max_level, double abs_tol) {
  SphereIntegral out;
  Complex previous = SphereQuadrature(d, radius, start_level).integrate(fn);
  for (int level = start_level + 1; level <= max_level; ++level) {
    const Complex current = SphereQuadrature(d, radius, level).integrate(fn);
    out.value = current;
    out.error = std::abs(current - previous);
    out.level = level;
    if (out.error <= std::max(tol * std::abs(current), abs_tol)) {
      out.converged = true;
      return out;
    }
    previous = current;
  }
  return out;
}

}  // namespace lap
