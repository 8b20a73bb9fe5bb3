#include "lap/quadrature.hpp"

#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>

namespace lap {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Kronrod 15-point extension of the 7-point Gauss rule.
constexpr double kKronrodNodes[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  Eigen::VectorXcd value;
  double error;
  bool operator<(const Interval& other) const { return error < other.error; }
};

Interval kronrod(const std::function<Eigen::VectorXcd(double)>& fn, double a, double b, Eigen::Index dim) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Eigen::VectorXcd k15 = Eigen::VectorXcd::Zero(dim), g7 = Eigen::VectorXcd::Zero(dim);
  const Eigen::VectorXcd center = fn(c);
  k15 += kKronrodWeights[7] * center;
  g7 += kGaussWeights[3] * center;
  for (int i = 0; i < 7; ++i) {
    const Eigen::VectorXcd s = fn(c - h * kKronrodNodes[i]) + fn(c + h * kKronrodNodes[i]);
    k15 += kKronrodWeights[i] * s;
    if (i % 2 == 1) g7 += kGaussWeights[i / 2] * s;
  }
  k15 *= h;
  g7 *= h;
  return Interval{a, b, k15, (k15 - g7).cwiseAbs().maxCoeff()};
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

GaussRule gauss_legendre(int n, double a, double b) {
  const GaussRule& ref = gauss_legendre(n);
  GaussRule out;
  out.nodes = (0.5 * (a + b)) + (0.5 * (b - a)) * ref.nodes.array();
  out.weights = (0.5 * (b - a)) * ref.weights;
  return out;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  // Scale by the interval length to keep the products O(1).
  const double scale = n > 1 ? 4.0 / (nodes.maxCoeff() - nodes.minCoeff()) : 1.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) w[j] /= scale * (nodes[j] - nodes[k]);
  return w;
}

Eigen::VectorXd lagrange_basis(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary, double x) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (x == nodes[j]) {
      out.setZero();
      out[j] = 1.0;
      return out;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) out[j] = bary[j] / (x - nodes[j]);
  return out / out.sum();
}

AdaptiveResult integrate_adaptive(const std::function<Eigen::VectorXcd(double)>& fn, double a, double b,
                                  Eigen::Index dim, const AdaptiveOptions& options) {
  std::priority_queue<Interval> heap;
  heap.push(kronrod(fn, a, b, dim));
  Eigen::VectorXcd total = heap.top().value;
  double error = heap.top().error;
  AdaptiveResult result;
  int intervals = 1;
  while (intervals < options.max_intervals) {
    const double scale = total.cwiseAbs().maxCoeff();
    if (error <= std::max(options.abs_tol, options.rel_tol * scale)) {
      result.converged = true;
      break;
    }
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Interval left = kronrod(fn, worst.a, mid, dim);
    Interval right = kronrod(fn, mid, worst.b, dim);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++intervals;
  }
  // Recompute the sums to shed accumulated cancellation.
  total.setZero();
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  if (!result.converged) {
    const double scale = total.cwiseAbs().maxCoeff();
    result.converged = error <= std::max(options.abs_tol, options.rel_tol * scale);
  }
  result.value = total;
  result.error = error;
  result.intervals = intervals;
  return result;
}

double golden_section_minimize(const std::function<double(double)>& fn, double a, double b, double tol) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace lap
