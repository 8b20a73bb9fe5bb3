#pragma once

#include "lap/lattice.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace lap {

enum class Sign { plus, minus };
inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

using SpectralFunction = std::function<Complex(const Point&)>;
using RadialWeight = std::function<double(double)>;

double sphere_area(int d);
// Integral of exp(i t w_1) over the unit sphere S^{d-1}.
double sphere_transform(int d, double t);

struct LayoutOptions {
  double panel_width = 0.5;
  double window_fraction = 0.25;  // window half-width relative to the singular radius
  int min_nodes = 16;
  int extra_nodes = 0;
};

struct RadialPanel {
  double a = 0.0;
  double b = 0.0;
  int nodes = 0;
  bool window = false;
};

// Composite Gauss-Legendre layout of [0, rho_max], fine enough for exp(i rho s) with s <= max_distance.
// With a singular radius r the panel [r - w, r + w] is a symmetric window and r is appended as the last node.
class RadialLayout {
 public:
  RadialLayout(double rho_max, double max_distance, std::optional<double> singular_radius,
               const LayoutOptions& options = {});

  const std::vector<RadialPanel>& panels() const { return panels_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& gauss_weights() const { return gauss_weights_; }
  std::optional<double> singular_radius() const { return singular_radius_; }
  double window_half_width() const { return window_half_width_; }
  double rho_max() const { return rho_max_; }
  double max_distance() const { return max_distance_; }
  // Node range [first, first + count) of the window panel.
  Index window_first() const { return window_first_; }
  Index window_count() const { return window_count_; }
  Index surface_index() const { return singular_radius_ ? nodes_.size() - 1 : -1; }
  RadialLayout refined(int extra_nodes) const;

 private:
  double rho_max_;
  double max_distance_;
  std::optional<double> singular_radius_;
  LayoutOptions options_;
  double window_half_width_ = 0.0;
  std::vector<RadialPanel> panels_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd gauss_weights_;
  Index window_first_ = 0;
  Index window_count_ = 0;
};

// Weights c_j with sum_j c_j H(rho_j) approximating a radial integral of H against a resolvent kernel.
class RadialRule {
 public:
  RadialRule(Eigen::VectorXd nodes, Eigen::VectorXcd weights, Index surface_index);

  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXcd& weights() const { return weights_; }
  Index surface_index() const { return surface_index_; }
  RadialRule weighted(const RadialWeight& weight) const;
  Complex apply(const Eigen::VectorXcd& values) const { return (weights_.array() * values.array()).sum(); }
  Complex surface_part(const Eigen::VectorXcd& values) const;

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXcd weights_;
  Index surface_index_;
};

struct ExtrapolationReport {
  double error = 0.0;
  bool diverging = false;
};

// Integral of H(rho) / (rho^(2m) - z) over [0, rho_max].
RadialRule resolvent_rule(const RadialLayout& layout, Complex z, int m);
// p.v. integral of H / (rho^(2m) - lambda) plus the surface term +-i pi H(r) / (2m r^(2m-1)).
RadialRule plemelj_rule(const RadialLayout& layout, double lambda, int m, Sign sign);
// Neville extrapolation to eps = 0 of resolvent rules at lambda +- i eps.
RadialRule epsilon_limit_rule(const RadialLayout& layout, double lambda, int m, Sign sign,
                              const std::vector<double>& epsilons, ExtrapolationReport* report = nullptr);

// Distinct squared integer lengths of lattice offsets in [-(n-1), n-1]^d.
class DistanceBins {
 public:
  explicit DistanceBins(const GridSpec& grid);
  const GridSpec& grid() const { return grid_; }
  Index count() const { return static_cast<Index>(squares_.size()); }
  const std::vector<long long>& squares() const { return squares_; }
  const Eigen::VectorXd& distances() const { return distances_; }
  int bin_of_square(long long square) const { return lookup_[square]; }
  // Bins with distance <= max_distance form the prefix [0, prefix_count(max_distance)).
  Index prefix_count(double max_distance) const;

 private:
  GridSpec grid_;
  std::vector<long long> squares_;
  Eigen::VectorXd distances_;
  std::vector<int> lookup_;
};

// (2 pi)^(-d) rho^(d-1) sigma_hat(rho s) sampled over bins x layout nodes.
class KernelBasis {
 public:
  KernelBasis(std::shared_ptr<const DistanceBins> bins, const RadialLayout& layout, Index bin_limit = -1);
  const DistanceBins& bins() const { return *bins_; }
  std::shared_ptr<const DistanceBins> shared_bins() const { return bins_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  // Kernel values per bin for the given rule (nodes must match) and optional radial weight.
  Eigen::VectorXcd kernel(const RadialRule& rule, const RadialWeight& weight = {}) const;

 private:
  std::shared_ptr<const DistanceBins> bins_;
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd phi_;
};

// Radially symmetric convolution u(x) = h^d sum_y G(|x - y|) f(y) on the box.
class RadialConvolution {
 public:
  RadialConvolution(std::shared_ptr<const DistanceBins> bins, Eigen::VectorXcd kernel);
  const GridSpec& grid() const { return bins_->grid(); }
  Complex kernel_at_square(long long square) const;
  const Eigen::VectorXcd& kernel() const { return kernel_; }
  Field apply(const Field& f) const;
  // Matrix h^d G(|x_i - x_j|) on a node subset.
  Eigen::MatrixXcd restricted(const std::vector<Index>& nodes) const;
  // h^d sum_j G(|x - y_j|) w_j evaluated at every node, for sources on a small node set.
  Field apply_sparse(const std::vector<Index>& nodes, const Eigen::VectorXcd& weights) const;

 private:
  std::shared_ptr<const DistanceBins> bins_;
  Eigen::VectorXcd kernel_;
  Eigen::VectorXcd padded_spectrum_;
};

// Lattice cross-correlation of f and g binned by offset length; gives exact spherical means of f_hat conj(g_hat).
class SpectralCorrelation {
 public:
  SpectralCorrelation(const Field& f, const Field& g, double prune = 1e-16);
  int dimension() const { return dimension_; }
  double max_distance() const { return distances_.size() ? distances_.maxCoeff() : 0.0; }
  const Eigen::VectorXd& distances() const { return distances_; }
  const Eigen::VectorXcd& coefficients() const { return coefficients_; }
  // Integral of f_hat conj(g_hat)(rho w) over w in S^{d-1}.
  Complex spherical_mean(double rho) const;
  Eigen::VectorXcd spherical_means(const Eigen::VectorXd& rhos) const;
  // Radial density t^((d-2m)/2m) * spherical_mean(t^(1/2m)) / (2m); its Cauchy integral in t is the pairing.
  Complex radial_density(double t, int m) const;

 private:
  int dimension_;
  Eigen::VectorXd distances_;
  Eigen::VectorXcd coefficients_;
};

// L2 norm of f_hat on the sphere of the given radius, in surface measure.
double sphere_restriction_norm(const Field& f, double radius);

class SphereQuadrature {
 public:
  // d = 2: 16 * 2^level trapezoid nodes; d = 3: 8 * 2^level Gauss-Legendre polar nodes times twice as many azimuths.
  SphereQuadrature(int d, double radius, int level);
  int dimension() const { return dimension_; }
  double radius() const { return radius_; }
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  // 1 / |grad P_m| on the sphere.
  double coarea_factor(int m) const;
  Complex integrate(const SpectralFunction& fn) const;

 private:
  int dimension_;
  double radius_;
  Eigen::MatrixXd nodes_;
  Eigen::VectorXd weights_;
};

struct SphereIntegral {
  Complex value;
  double error = 0.0;
  int level = 0;
  bool converged = false;
};

// Surface integral over the radius-r sphere, refined by doubling until two levels agree to tol.
SphereIntegral integrate_sphere(const SpectralFunction& fn, int d, double radius, double tol, int start_level = 0,
                                int max_level = 7, double abs_tol = 0.0);

}  // namespace lap
