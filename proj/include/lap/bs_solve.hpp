#pragma once

#include "lap/lattice.hpp"
#include "lap/potential.hpp"
#include "lap/radial.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lap {

// Free resolvent R_0(z) as a translation-invariant operator on the grid.
class ResolventOperator {
 public:
  virtual ~ResolventOperator() = default;
  virtual Complex z() const = 0;
  virtual const GridSpec& grid() const = 0;
  virtual Field apply(const Field& f) const = 0;
  // h^d G(x_i - x_j) on a node subset.
  virtual Eigen::MatrixXcd restricted(const std::vector<Index>& nodes) const = 0;
  // R_0 applied to a field supported on `nodes` with the given values.
  virtual Field apply_sparse(const std::vector<Index>& nodes, const Eigen::VectorXcd& values) const;
};

// Periodic multiplier (P_m - z)^(-1) on the box.
class PeriodicResolvent final : public ResolventOperator {
 public:
  PeriodicResolvent(const GridSpec& grid, int m, Complex z);
  Complex z() const override { return z_; }
  const GridSpec& grid() const override { return grid_; }
  int m() const { return m_; }
  Field apply(const Field& f) const override;
  Eigen::MatrixXcd restricted(const std::vector<Index>& nodes) const override;

 private:
  GridSpec grid_;
  int m_;
  Complex z_;
  ComplexVector green_;  // G at each periodic offset, indexed like the grid with the origin at n/2
};

// Free-space resolvent kernel truncated to the box.
class RadialResolvent final : public ResolventOperator {
 public:
  RadialResolvent(RadialConvolution convolution, Complex z);
  Complex z() const override { return z_; }
  const GridSpec& grid() const override { return convolution_.grid(); }
  const RadialConvolution& convolution() const { return convolution_; }
  Field apply(const Field& f) const override { return convolution_.apply(f); }
  Eigen::MatrixXcd restricted(const std::vector<Index>& nodes) const override {
    return convolution_.restricted(nodes);
  }
  Field apply_sparse(const std::vector<Index>& nodes, const Eigen::VectorXcd& values) const override {
    return convolution_.apply_sparse(nodes, values);
  }

 private:
  RadialConvolution convolution_;
  Complex z_;
};

struct BsOptions {
  double tolerance = 1e-10;
  int max_iterations = 400;
  int restart = 60;
  double neumann_threshold = 0.5;  // spectral radius below which the Neumann series is used
  double singular_threshold = 1e-6;
  Index dense_limit = 2500;  // support size up to which spectra are computed densely
};

struct BsSolve {
  Complex z;
  Field u;
  ComplexVector support_solution;  // u on supp V
  double residual = 0.0;           // ||(Id + R_0 V)u - R_0 f|| / ||R_0 f|| on supp V
  std::vector<double> residual_history;
  int iterations = 0;
  int predicted_iterations = 0;  // Neumann regime: log(tol) / log(spectral radius)
  double spectral_radius = 0.0;  // of R_0 V restricted to supp V
  double sigma_min = 1.0;        // of Id + R_0 V restricted to supp V
  std::string method;
  bool converged = true;
  bool near_singular = false;
  bool flagged = false;
};

BsSolve bs_solve(const ResolventOperator& resolvent, const Potential& potential, const Field& f,
                 const BsOptions& options = {});

using LinearOperator = std::function<ComplexVector(const ComplexVector&)>;

struct GmresResult {
  ComplexVector x;
  std::vector<double> history;  // relative residual after each inner step
  int iterations = 0;
  bool converged = false;
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
GmresResult gmres(const LinearOperator& op, const ComplexVector& rhs, double tol, int restart, int max_iterations);

// ||(P_m - z)u + V u - f|| / ||f|| with P_m applied spectrally on the periodic box.
double hamiltonian_residual(const Field& u, const Field& f, const Potential& potential, Complex z, int m);

// (1/R) integral over |x| <= R of |u|^2, for each R.
std::vector<double> rellich_averages(const Field& u, const std::vector<double>& radii);

}  // namespace lap
