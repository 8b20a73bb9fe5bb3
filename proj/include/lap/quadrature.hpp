#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace lap {

struct GaussRule {
  Eigen::VectorXd nodes;    // on [-1, 1], ascending
  Eigen::VectorXd weights;
};

// Gauss-Legendre rule with n nodes; cached per n, thread safe.
const GaussRule& gauss_legendre(int n);

// Rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Barycentric weights for interpolation through the given nodes.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes);

// Values of the Lagrange cardinal functions l_j(x) through the nodes.
Eigen::VectorXd lagrange_basis(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary, double x);

struct AdaptiveOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

struct AdaptiveResult {
  Eigen::VectorXcd value;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod (7/15) for a vector-valued integrand fn(x) -> VectorXcd of size dim.
AdaptiveResult integrate_adaptive(const std::function<Eigen::VectorXcd(double)>& fn, double a, double b,
                                  Eigen::Index dim, const AdaptiveOptions& options = {});

// Neville tableau extrapolating values sampled at steps h_k to h = 0.
template <typename Scalar>
struct Extrapolation {
  Scalar value{};
  double error = 0.0;
  // Successive diagonal estimates; their differences should shrink.
  std::vector<Scalar> diagonal;
  bool diverging = false;
};

template <typename Scalar>
Extrapolation<Scalar> richardson(std::span<const double> steps, std::span<const Scalar> values,
                                 int max_order = std::numeric_limits<int>::max()) {
  const std::size_t count = steps.size();
  Extrapolation<Scalar> out;
  if (count == 0 || values.size() != count) return out;
  std::vector<Scalar> table(values.begin(), values.end());
  out.diagonal.push_back(table.back());
  const std::size_t orders = std::min<std::size_t>(count - 1, static_cast<std::size_t>(std::max(max_order, 0)));
  for (std::size_t level = 1; level <= orders; ++level) {
    for (std::size_t i = count - 1; i >= level; --i) {
      const double hi = steps[i - level];
      const double lo = steps[i];
      table[i] = (hi * table[i] - lo * table[i - 1]) / (hi - lo);
      if (i == level) break;
    }
    out.diagonal.push_back(table[count - 1]);
  }
  out.value = out.diagonal.back();
  const std::size_t k = out.diagonal.size();
  if (k >= 2) out.error = std::abs(out.diagonal[k - 1] - out.diagonal[k - 2]);
  if (k >= 3) {
    const double last = std::abs(out.diagonal[k - 1] - out.diagonal[k - 2]);
    const double prev = std::abs(out.diagonal[k - 2] - out.diagonal[k - 3]);
    out.diverging = last > prev && last > 1e-14 * (1.0 + std::abs(out.value));
  }
  return out;
}

// Golden-section minimisation of a unimodal function on [a, b].
double golden_section_minimize(const std::function<double(double)>& fn, double a, double b, double tol);

}  // namespace lap
