#pragma once

#include "lap/lattice.hpp"
#include "lap/radial.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace lap {

enum class Backend { plemelj, epsilon_limit };

// 0.1 * 2^-k, k = 0..6
std::vector<double> default_epsilons();

struct BoundarySpec {
  double lambda = 1.0;
  int m = 1;
  Sign sign = Sign::plus;
  Backend backend = Backend::plemelj;
  double delta = 0.5;
  double window_fraction = 0.25;
  std::vector<double> epsilons = default_epsilons();
  double tolerance = 1e-7;
  double cross_check_tolerance = 1e-6;

  void validate() const;
  double radius() const;
};

struct PairingResult {
  Complex value;
  // Plemelj split; only the plemelj backend fills these.
  std::optional<Complex> surface;
  std::optional<Complex> principal;
  double error_estimate = 0.0;
  ExtrapolationReport extrapolation;
};

// <R_0(lambda +- i0) f, g> for lattice fields, through the exact spherical means of the lattice correlation.
PairingResult boundary_pairing(const Field& f, const Field& g, const BoundarySpec& spec);
PairingResult boundary_pairing(const SpectralCorrelation& correlation, double rho_max, const BoundarySpec& spec);

struct AnalyticPairingOptions {
  double rho_max = 12.0;
  double extent = 10.0;  // spatial diameter bounding the oscillation of f_hat conj(g_hat)
  double sphere_tolerance = 1e-12;
};

// Same pairing for closed-form transforms, with spherical means from SphereQuadrature.
PairingResult boundary_pairing(const SpectralFunction& f_hat, const SpectralFunction& g_hat, int d,
                               const BoundarySpec& spec, const AnalyticPairingOptions& options);

// <R_0(z) f, g> for z off [0, inf), truncated to |xi| <= rho_max.
Complex resolvent_pairing(const SpectralCorrelation& correlation, double rho_max, Complex z, int m);

// Layout adapted to z: window at r(Re z) for Re z > 0, graded panels near 0 otherwise.
RadialLayout layout_for(Complex z, int m, double rho_max, double max_distance, double window_fraction = 0.25,
                        int extra_nodes = 0);

double box_diameter(const GridSpec& grid);

// Radial kernels of free resolvents on one grid and one layout, sharing the sampled basis.
class ResolventKernels {
 public:
  ResolventKernels(const GridSpec& grid, int m, Complex z_reference, double window_fraction = 0.25);

  const GridSpec& grid() const { return grid_; }
  int m() const { return m_; }
  const RadialLayout& layout() const { return layout_; }

  RadialConvolution resolvent(Complex z, const RadialWeight& weight = {}) const;
  RadialConvolution boundary(double lambda, Sign sign, Backend backend, const std::vector<double>& epsilons,
                             const RadialWeight& weight = {}, ExtrapolationReport* report = nullptr) const;
  // Surface part only: +-i pi (2 pi)^-d r^(d-1) sigma_hat(r s) / (2m r^(2m-1)).
  RadialConvolution surface(double lambda, Sign sign, const RadialWeight& weight = {}) const;
  RadialConvolution from_rule(const RadialRule& rule, const RadialWeight& weight = {}) const;

 private:
  GridSpec grid_;
  int m_;
  std::shared_ptr<const DistanceBins> bins_;
  RadialLayout layout_;
  std::shared_ptr<const KernelBasis> basis_;
};

struct BoundaryApplyResult {
  Field u;
  std::optional<Field> surface;      // plemelj backend: surface extension term
  std::optional<Field> alternate;    // other backend
  double disagreement = 0.0;
  bool flagged = false;
  ExtrapolationReport extrapolation;
};

// u = R_0(lambda +- i0) f on the box; an optional radial weight multiplies the symbol.
BoundaryApplyResult boundary_apply(const Field& f, const BoundarySpec& spec, const RadialWeight& weight = {},
                                   bool cross_check = true);

// Gaussian probes e^{-|x-c|^2/2}, some modulated at frequency `frequency` along axis 0.
std::vector<Field> gaussian_probes(const GridSpec& grid, double frequency);

// max_k |<u,(P-conj z)phi_k> + <Vu,phi_k> - <rhs,phi_k>| relative to the size of the terms.
double defining_residual(const Field& u, const Field& rhs, Complex z, int m, const std::vector<Field>& probes,
                         const Field* potential_term = nullptr);

}  // namespace lap
