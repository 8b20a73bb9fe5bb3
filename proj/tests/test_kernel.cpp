#include "oracles.hpp"

#include "lap/kernel.hpp"
#include "lap/multiplier.hpp"

#include <doctest.h>

using namespace lap;

namespace {

double step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// Q on the shell: patch(|xi'|) / (d P / d xi_d) at the graph point; the shell cutoff equals 1 there.
double q_weight(double s, double lambda, int m) {
  const double r = std::pow(lambda, 1.0 / (2.0 * m));
  const double patch = 1.0 - step((s / r - 0.5) / 0.3);
  const double height = std::sqrt(r * r - s * s);
  return patch / (2.0 * m * std::pow(r, 2 * m - 2) * height);
}

Complex kernel_oracle(double lambda, int m, const Point& x) {
  const int d = static_cast<int>(x.size());
  const double r = std::pow(lambda, 1.0 / (2.0 * m));
  const double a = 0.8 * r;
  const oracle::Kronrod quad(1e-15, 1e-13);
  Complex integral;
  if (d == 2) {
    integral = quad.integrate(
        [&](double s) {
          return q_weight(std::abs(s), lambda, m) * std::exp(Complex(0.0, x[1] * std::sqrt(r * r - s * s) + x[0] * s));
        },
        -a, a);
  } else {
    // Angular average over the circle of radius s in xi' by a fine trapezoid rule.
    const double xp = x.head(2).norm();
    integral = quad.integrate(
        [&](double s) {
          const int n = 256;
          double circle = 0.0;
          for (int k = 0; k < n; ++k) circle += std::cos(s * xp * std::cos(2.0 * kPi * k / n));
          circle *= 2.0 * kPi / n;
          return s * circle * q_weight(s, lambda, m) * std::exp(Complex(0.0, x[2] * std::sqrt(r * r - s * s)));
        },
        0.0, a);
  }
  return Complex(0.0, std::pow(2.0 * kPi, -(d - 1))) * integral;
}

}  // namespace

TEST_CASE("graph of the shell over the tangent plane") {
  Point xi(1);
  xi << 0.6;
  const GraphPoint g = graph_and_weight(1.0, 1, xi);
  CHECK(g.height == doctest::Approx(0.8).epsilon(1e-14));
  for (int m : {1, 2}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      const double r = shell_radius(lambda, m);
      const GraphPoint pole = graph_and_weight(lambda, m, Point::Zero(2));
      CHECK(pole.height == doctest::Approx(r));
      CHECK(pole.weight == doctest::Approx(1.0 / (2.0 * m * std::pow(r, 2 * m - 1))));
      for (double s : {0.1, 0.3, 0.55}) {
        Point p(2);
        p << s * r, 0.2 * s * r;
        const GraphPoint gp = graph_and_weight(lambda, m, p);
        const double full = p.squaredNorm() + gp.height * gp.height;
        CHECK(std::abs(std::pow(full, m) - lambda) < 1e-12);
      }
    }
  }
  Point outside(1);
  outside << 1.2;
  CHECK_THROWS(graph_and_weight(1.0, 1, outside));
}

TEST_CASE("kernel vanishes below the hyperplane") {
  for (int d : {2, 3}) {
    Point x = Point::Constant(d, 0.3);
    x[d - 1] = -1.0;
    CHECK(kernel_k_plus(1.0, 1, x, 1e-10).value == Complex(0.0));
  }
}

TEST_CASE("kernel at the origin and far away matches a direct quadrature") {
  for (int d : {2, 3})
    for (int m : {1, 2}) {
      const KernelSample origin = kernel_k_plus(1.0, m, Point::Zero(d), 1e-12);
      CHECK(std::abs(origin.value - kernel_oracle(1.0, m, Point::Zero(d))) < 1e-8 * std::abs(origin.value));
      CHECK(origin.value.real() == doctest::Approx(0.0));
      Point far = Point::Zero(d);
      far[0] = 3.0;
      far[d - 1] = 17.0;
      const KernelSample s = kernel_k_plus(1.0, m, far, 1e-12);
      CHECK_FALSE(s.flagged);
      CHECK(std::abs(s.value - kernel_oracle(1.0, m, far)) < 1e-8 * std::abs(origin.value));
    }
}

TEST_CASE("d = 2 decay along the axis") {
  std::vector<double> normalized, magnitude;
  for (double radius : {5.0, 10.0, 20.0, 40.0}) {
    Point x(2);
    x << 0.0, radius;
    const double k = std::abs(kernel_k_plus(1.0, 1, x, 1e-10).value);
    magnitude.push_back(k);
    normalized.push_back(k * std::sqrt(1.0 + radius));
  }
  for (std::size_t i = 1; i < magnitude.size(); ++i) CHECK(magnitude[i] < magnitude[i - 1]);
  const double hi = *std::max_element(normalized.begin(), normalized.end());
  const double lo = *std::min_element(normalized.begin(), normalized.end());
  CHECK(hi / lo < 3.0);
}

TEST_CASE("decay scan edge cases") {
  Point up(2);
  up << 0.0, 1.0;
  CHECK(decay_scan(1.0, 1, 2, {}, {up}, 1e-8).rows.empty());
  const DecayTable single = decay_scan(1.0, 1, 2, {0.0}, {up}, 1e-10);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].normalized == doctest::Approx(std::abs(kernel_k_plus(1.0, 1, Point::Zero(2), 1e-10).value)));
  Point down(2);
  down << 0.0, -1.0;
  const DecayTable below = decay_scan(1.0, 1, 2, {1.0, 5.0}, {down}, 1e-10);
  for (const auto& row : below.rows) CHECK(row.magnitude == 0.0);
  CHECK_THROWS(decay_scan(1.0, 1, 3, {1.0}, {up}, 1e-8));
}

TEST_CASE("d = 3 decay band over the far field") {
  const double a15 = 15.0 * kPi / 180.0, a25 = 25.0 * kPi / 180.0;
  std::vector<Point> dirs(3, Point::Zero(3));
  dirs[0] << 0.0, 0.0, 1.0;
  dirs[1] << std::sin(a15), 0.0, std::cos(a15);
  dirs[2] << 0.0, std::sin(a25), std::cos(a25);
  const DecayTable t = decay_scan(1.0, 1, 3, {5, 10, 20, 30, 40, 50}, dirs, 1e-8);
  CHECK(t.rows.size() == 18);
  CHECK(t.band_ratio < 3.0);
  CHECK(t.empirical_constant > 0.0);
}

TEST_CASE("weight ratio scan is bounded for mu weights") {
  const WeightRatioScan scan = weight_ratio_scan(WeightParams(1.0, 0.1), 20.0, 81);
  CHECK(scan.max_ratio >= 1.0);
  CHECK(std::isfinite(scan.max_ratio));
  CHECK(scan.min_ratio > 0.0);
}
