#pragma once

// Reference computations that share no numerical code with the library.

#include "lap/lattice.hpp"
#include "lap/test_family.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using lap::kPi;

inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

inline double unit_ball_volume(int d) { return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

// Continuum transform of exp(-|x|^2 / (2 w^2)) with the e^{+i xi x} convention.
inline double gaussian_transform(double xi_norm, double width, int d) {
  return std::pow(2.0 * kPi * width * width, 0.5 * d) * std::exp(-0.5 * width * width * xi_norm * xi_norm);
}

// ---------------------------------------------------------------- quadrature

// Adaptive 15-point Gauss-Kronrod on [a, b].
class Kronrod {
 public:
  Kronrod(double abs_tol, double rel_tol) : abs_tol_(abs_tol), rel_tol_(rel_tol) {}

  Complex integrate(const std::function<Complex(double)>& fn, double a, double b) const {
    Complex coarse_k, coarse_g;
    rule(fn, a, b, coarse_k, coarse_g);
    return recurse(fn, a, b, coarse_k, coarse_g, 0);
  }

 private:
  static void rule(const std::function<Complex(double)>& fn, double a, double b, Complex& kronrod, Complex& gauss) {
    static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const Complex center = fn(c);
    kronrod = wgk[7] * center;
    gauss = wg[3] * center;
    for (int i = 0; i < 7; ++i) {
      const Complex s = fn(c - h * xgk[i]) + fn(c + h * xgk[i]);
      kronrod += wgk[i] * s;
      if (i % 2 == 1) gauss += wg[i / 2] * s;
    }
    kronrod *= h;
    gauss *= h;
  }

  Complex recurse(const std::function<Complex(double)>& fn, double a, double b, Complex k, Complex g,
                  int depth) const {
    if (std::abs(k - g) <= std::max(abs_tol_, rel_tol_ * std::abs(k)) || depth > 60) return k;
    const double mid = 0.5 * (a + b);
    Complex lk, lg, rk, rg;
    rule(fn, a, mid, lk, lg);
    rule(fn, mid, b, rk, rg);
    return recurse(fn, a, mid, lk, lg, depth + 1) + recurse(fn, mid, b, rk, rg, depth + 1);
  }

  double abs_tol_;
  double rel_tol_;
};

// Polynomial extrapolation to zero (Neville) of samples value[k] taken at step[k].
inline Complex extrapolate_to_zero(const std::vector<double>& steps, const std::vector<Complex>& values) {
  std::vector<Complex> p(values);
  const std::size_t n = steps.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i)
      p[i] = (steps[i + level] * p[i] - steps[i] * p[i + 1]) / (steps[i + level] - steps[i]);
  return p[0];
}

// ---------------------------------------------------------------- special functions

// Dawson integral e^{-x^2} int_0^x e^{t^2} dt by its positive series.
inline double dawson(double x) {
  long double term = x, sum = x;
  const long double x2 = static_cast<long double>(x) * x;
  for (int n = 1; n < 400; ++n) {
    term *= x2 / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (add < 1e-20L * sum) break;
  }
  return static_cast<double>(std::exp(-x2) * sum);
}

// Unit-sphere integral of exp(rho * s * omega_1) for complex s: sinh(t)/t or I_0 series.
inline Complex sphere_exponential(int d, Complex t) {
  if (d == 3) {
    if (std::abs(t) < 1e-6) return 4.0 * kPi * (1.0 + t * t / 6.0);
    return 4.0 * kPi * std::sinh(t) / t;
  }
  using LC = std::complex<long double>;
  const LC q = LC(t) * LC(t) / 4.0L;
  LC term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 600; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum)) break;
  }
  return 2.0 * kPi * Complex(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
}

// ---------------------------------------------------------------- packet pairings

// f_hat conj(g_hat)(xi) = coefficient * exp(-alpha |xi|^2 + v . xi) for two Gaussian packets.
struct PacketProduct {
  Complex coefficient;
  double alpha = 0.0;
  Eigen::VectorXcd v;
  int d = 0;

  PacketProduct(const lap::GaussianPacket& f, const lap::GaussianPacket& g) : d(static_cast<int>(f.center.size())) {
    const double wf2 = f.width * f.width, wg2 = g.width * g.width;
    const double nf = std::pow(2.0 * kPi * wf2, 0.5 * d), ng = std::pow(2.0 * kPi * wg2, 0.5 * d);
    alpha = 0.5 * (wf2 + wg2);
    v.resize(d);
    double kf2 = 0.0, kg2 = 0.0, kfc = 0.0, kgc = 0.0;
    for (int a = 0; a < d; ++a) {
      v[a] = Complex(-wf2 * f.modulation[a] - wg2 * g.modulation[a], f.center[a] - g.center[a]);
      kf2 += f.modulation[a] * f.modulation[a];
      kg2 += g.modulation[a] * g.modulation[a];
      kfc += f.modulation[a] * f.center[a];
      kgc += g.modulation[a] * g.center[a];
    }
    coefficient = f.amplitude * std::conj(g.amplitude) * nf * ng *
                  std::exp(Complex(-0.5 * wf2 * kf2 - 0.5 * wg2 * kg2, kfc - kgc));
  }

  // Integral of f_hat conj(g_hat) over the unit-sphere directions at radius rho.
  Complex sphere_integral(double rho) const {
    Complex vv = 0.0;
    for (int a = 0; a < d; ++a) vv += v[a] * v[a];
    return coefficient * std::exp(-alpha * rho * rho) * sphere_exponential(d, rho * std::sqrt(vv));
  }

  double cutoff() const {
    const double s = v.cwiseAbs().norm();
    return (s + std::sqrt(s * s + 4.0 * alpha * 50.0)) / (2.0 * alpha);
  }
};

// (2 pi)^{-d} int f_hat conj(g_hat) / (|xi|^{2m} - z) d xi by radial quadrature.
inline Complex packet_resolvent_pairing(const PacketProduct& prod, int m, Complex z) {
  const int d = prod.d;
  const Kronrod quad(1e-17, 1e-14);
  auto integrand = [&](double rho) {
    return std::pow(rho, d - 1) * prod.sphere_integral(rho) / (std::pow(rho, 2 * m) - z);
  };
  const double r = std::pow(std::abs(z.real()), 1.0 / (2.0 * m));
  const double top = std::max(prod.cutoff(), 2.0 * r + 1.0);
  Complex total = 0.0;
  if (z.real() > 0.0) {
    const double w = std::max(std::abs(z.imag()), 1e-3) * 8.0 / (2.0 * m * std::pow(r, 2 * m - 1));
    const std::vector<double> cuts{0.0, std::max(0.5 * r, r - 32 * w), r - 4 * w, r, r + 4 * w, r + 32 * w, top};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) total += quad.integrate(integrand, cuts[i], cuts[i + 1]);
  } else {
    total = quad.integrate(integrand, 0.0, top);
  }
  return total / std::pow(2.0 * kPi, d);
}

// Boundary value at lambda +- i0 from the epsilon -> 0 limit of the regular pairings.
inline Complex packet_boundary_pairing(const PacketProduct& prod, int m, double lambda, double sign) {
  std::vector<double> steps;
  std::vector<Complex> values;
  for (int k = 0; k < 5; ++k) {
    const double eps = 0.01 * std::ldexp(1.0, -k) * lambda;
    steps.push_back(eps);
    values.push_back(packet_resolvent_pairing(prod, m, Complex(lambda, sign * eps)));
  }
  return extrapolate_to_zero(steps, values);
}

// Closed forms for f = g = exp(-|x|^2 / (2 w^2)).
inline Complex centered_gaussian_boundary(int d, int m, double width, double lambda, double sign) {
  const double a = width * width;
  const double scale = std::pow(2.0 * kPi * a, d) * unit_sphere_area(d) / std::pow(2.0 * kPi, d);
  if (d == 3 && m == 1) {
    const double k = std::sqrt(lambda);
    const double re = 0.5 * std::sqrt(kPi / a) - k * std::sqrt(kPi) * dawson(std::sqrt(a) * k);
    const double im = sign * kPi * k * std::exp(-a * k * k) / 2.0;
    return scale * Complex(re, im);
  }
  if (d == 2 && m == 1) {
    const double b = a * lambda;
    return scale * 0.5 * Complex(-std::exp(-b) * std::expint(b), sign * kPi * std::exp(-b));
  }
  if (d == 2 && m == 2) {
    const double k = std::sqrt(lambda);
    const double e1 = -std::expint(-a * k);
    const double re = (-std::exp(-a * k) * std::expint(a * k) - std::exp(a * k) * e1) / (4.0 * k);
    const double im = sign * kPi * std::exp(-a * k) / (4.0 * k);
    return scale * Complex(re, im);
  }
  throw std::invalid_argument("centered_gaussian_boundary: unsupported (d, m)");
}

// ---------------------------------------------------------------- rearrangement

// Lorentz quasi-norm by sorting the magnitudes; q <= 0 means q = infinity.
inline double lorentz(std::vector<double> mags, double cell, double p, double q) {
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double acc = 0.0, t = 0.0;
  for (double f : mags) {
    if (f == 0.0) break;
    const double next = t + cell;
    if (q <= 0.0) {
      acc = std::max(acc, f * std::pow(next, 1.0 / p));
    } else {
      acc += std::pow(f, q) * (p / q) * (std::pow(next, q / p) - std::pow(t, q / p));
    }
    t = next;
  }
  return q <= 0.0 ? acc : std::pow(acc, 1.0 / q);
}

// ---------------------------------------------------------------- dense Hamiltonian

// Periodic (-Laplacian) + V on the node grid, built as a Kronecker sum of one-axis spectral matrices.
inline Eigen::MatrixXd dense_hamiltonian(const lap::GridSpec& grid, const Eigen::VectorXd& potential) {
  const int n = grid.points_per_axis(), d = grid.dimension();
  Eigen::MatrixXd axis(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int q = 0; q < n; ++q) {
        const double kappa = grid.frequency(q);
        s += kappa * kappa * std::cos(kappa * (grid.coordinate(j) - grid.coordinate(k)));
      }
      axis(j, k) = s / n;
    }
  }
  const Eigen::Index size = grid.size();
  Eigen::MatrixXd h = potential.asDiagonal();
  std::vector<int> stride(d, 1);
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * n;
  for (Eigen::Index row = 0; row < size; ++row) {
    for (int a = 0; a < d; ++a) {
      const int ia = static_cast<int>(row / stride[a]) % n;
      const Eigen::Index base = row - static_cast<Eigen::Index>(ia) * stride[a];
      for (int k = 0; k < n; ++k) h(row, base + static_cast<Eigen::Index>(k) * stride[a]) += axis(ia, k);
    }
  }
  return h;
}

}  // namespace oracle
