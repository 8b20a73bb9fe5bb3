#pragma once

#include "lap/lattice.hpp"
#include "lap/potential.hpp"
#include "lap/radial.hpp"
#include "lap/spaces.hpp"
#include "lap/test_family.hpp"

#include <string>
#include <vector>

namespace lap {

struct ScanOptions {
  double lower = -2.0;
  double upper = -0.1;
  int steps = 24;
  double eps_probe = 1e-3;
  Sign sign = Sign::plus;
  int m = 1;
  double threshold = 0.1;  // sigma_min below this marks a candidate
  double window_fraction = 0.25;
  int workers = 1;
};

struct ScanSample {
  double lambda = 0.0;
  double sigma_min = 1.0;
};

struct EigenCandidate {
  double lambda = 0.0;
  double sigma_min = 0.0;
  double dip_depth = 0.0;  // 1 - sigma_min / median of the scan
  double bracket = 0.0;    // half width of the refinement bracket (the scan step)
};

struct EigenScanResult {
  std::vector<ScanSample> samples;
  std::vector<EigenCandidate> candidates;
  std::string backend;  // periodic (negative axis) or radial (positive axis)
  double step = 0.0;
  bool resolution_warning = false;
  std::string warning;
};

// sigma_min(Id + R_0(lambda +- i eps) V) on supp V over a lambda grid, with golden-section refinement of dips.
EigenScanResult eigen_scan(const Potential& potential, const ScanOptions& options);

// Smallest singular value of Id + R_0(z) V restricted to supp V, using the periodic resolvent.
double bs_sigma_min_periodic(const Potential& potential, int m, Complex z);

// P_m(D) u + V u on the periodic box.
Field apply_hamiltonian(const Potential& potential, int m, const Field& u);

struct EigenPair {
  double value = 0.0;
  Field vector;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct LobpcgOptions {
  int count = 1;
  double tolerance = 1e-9;
  int max_iterations = 600;
  std::uint64_t seed = 7;
};

// Lowest eigenpairs of the discrete H_m by preconditioned LOBPCG with deflation; (P_m + shift)^(-1) preconditioner.
std::vector<EigenPair> lowest_eigenpairs(const Potential& potential, int m, const LobpcgOptions& options = {});

// max |<H u, v> - <u, H v>| over pairs, relative to the largest |<H u, v>|.
double hamiltonian_symmetry_defect(const Potential& potential, int m, const std::vector<NamedField>& family);

// ||(1 + |x|^2) u||_X* / ||u||_X*.
double decay_ratio(const Field& u, const CompositeNormConfig& cfg);

}  // namespace lap
