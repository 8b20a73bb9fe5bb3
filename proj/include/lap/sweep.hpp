#pragma once

#include "lap/bs_solve.hpp"
#include "lap/potential.hpp"
#include "lap/radial.hpp"
#include "lap/test_family.hpp"

#include <string>
#include <vector>

namespace lap {

struct SweepConfig {
  int m = 1;
  double delta = 0.5;
  std::vector<double> lambdas{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  std::vector<double> epsilons{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  Sign sign = Sign::plus;
  double lambda_ref = 1.0;  // centre of the frequency splittings in the X bound
  double window_fraction = 0.25;
  int workers = 1;
  BsOptions solver;
  // Measure the X* contraction rate of the Neumann series terms (-R_0 V)^k R_0 f.
  bool track_neumann = false;
  int neumann_terms = 60;

  void validate() const;
};

struct SweepCell {
  double lambda = 0.0;
  double epsilon = 0.0;
  double proxy = 0.0;  // max over the family of ||u||_X* / ||f||_X(upper)
  std::string argmax;
  double lorentz = 0.0;  // X* components of the maximising u
  double bstar = 0.0;
  double residual = 0.0;  // largest solver residual in the cell
  int iterations = 0;
  double spectral_radius = 0.0;
  double sigma_min = 1.0;
  double neumann_rate = 0.0;
  int holes = 0;  // flagged solves left out of the maximum
};

struct SweepReport {
  std::vector<SweepCell> cells;  // lambda-major, epsilon-minor
  std::vector<double> epsilons;
  std::vector<double> sup_by_epsilon;
  double sup = 0.0;
  // max / min of sup_by_epsilon over all epsilons, and over the last decade [eps_min, 10 eps_min].
  double drift = 1.0;
  double last_decade_drift = 1.0;
  int holes = 0;
  double max_residual = 0.0;
  double neumann_rate = 0.0;
  double max_spectral_radius = 0.0;
  std::vector<std::string> family;
};

SweepReport lap_free_sweep(const std::vector<NamedField>& family, const SweepConfig& config);
SweepReport lap_perturbed_sweep(const Potential& potential, const std::vector<NamedField>& family,
                                const SweepConfig& config);

}  // namespace lap
