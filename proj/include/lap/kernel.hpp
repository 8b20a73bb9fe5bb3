#pragma once

#include "lap/lattice.hpp"
#include "lap/spaces.hpp"

#include <vector>

namespace lap {

// North-pole patch on the shell: 1 for |xi'| <= plateau r, 0 beyond support r.
struct PatchCutoff {
  double plateau = 0.5;
  double support = 0.8;
  double operator()(double xi_prime_norm, double radius) const;
};

struct GraphPoint {
  double height = 0.0;  // xi_d on the shell above xi'
  double weight = 0.0;  // chi / (d P / d xi_d) at that point
};

GraphPoint graph_and_weight(double lambda, int m, const Point& xi_prime);

struct KernelSample {
  Point x;
  Complex value;
  double error_estimate = 0.0;
  int nodes = 0;
  bool flagged = false;
};

// Outgoing kernel of the shell patch at x (d = x.size() in {2, 3}).
KernelSample kernel_k_plus(double lambda, int m, const Point& x, double tol, int node_budget = 1 << 16,
                           const PatchCutoff& patch = {});

struct DecayRow {
  Point x;
  double radius = 0.0;
  double magnitude = 0.0;
  double normalized = 0.0;
  double error_estimate = 0.0;
  bool flagged = false;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  double empirical_constant = 0.0;  // max of the normalized column
  double median_normalized = 0.0;
  // max over rows of max(v/median, median/v)
  double band_ratio = 0.0;
};

// Rows are ordered direction-major, then by radius.
DecayTable decay_scan(double lambda, int m, int d, const std::vector<double>& radii, const std::vector<Point>& directions,
                      double tol, int workers = 1);

// Extremes of mu(x_d) / mu(y_d) over pairs x_d > y_d in [-extent, extent].
struct WeightRatioScan {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double max_at_x = 0.0, max_at_y = 0.0;
};
WeightRatioScan weight_ratio_scan(const WeightParams& weight, double extent, int samples);

}  // namespace lap
