#include "oracles.hpp"

#include "lap/boundary.hpp"
#include "lap/multiplier.hpp"
#include "lap/radial.hpp"
#include "lap/test_family.hpp"

#include <doctest.h>

using namespace lap;

namespace {

GridSpec grid_for(int d) { return d == 2 ? GridSpec(2, 16.0, 128) : GridSpec(3, 8.0, 64); }

BoundarySpec spec_for(double lambda, int m, Sign sign, Backend backend = Backend::plemelj) {
  BoundarySpec s;
  s.lambda = lambda;
  s.m = m;
  s.sign = sign;
  s.backend = backend;
  return s;
}

double relative(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("sphere quadrature: total weight and node radius") {
  for (int d : {2, 3}) {
    for (double r : {0.5, 1.0, 1.7}) {
      const SphereQuadrature q(d, r, 2);
      CHECK(q.weights().sum() == doctest::Approx(oracle::unit_sphere_area(d) * std::pow(r, d - 1)).epsilon(1e-8));
      for (Index k = 0; k < q.nodes().cols(); ++k) CHECK(std::abs(q.nodes().col(k).norm() - r) < 1e-12);
      CHECK(q.coarea_factor(2) == doctest::Approx(1.0 / (4.0 * r * r * r)));
    }
  }
}

TEST_CASE("closed-form Gaussian pairings agree with the epsilon-limit oracle") {
  const std::vector<std::pair<int, int>> cases{{2, 1}, {2, 2}, {3, 1}};
  for (auto [d, m] : cases) {
    const GaussianPacket p = GaussianPacket::centered(d, 0.9);
    const oracle::PacketProduct prod(p, p);
    for (double lambda : {0.5, 1.0, 2.0})
      for (double sign : {1.0, -1.0}) {
        const Complex closed = oracle::centered_gaussian_boundary(d, m, 0.9, lambda, sign);
        CHECK(relative(oracle::packet_boundary_pairing(prod, m, lambda, sign), closed) < 1e-8);
      }
  }
}

TEST_CASE("boundary pairing of lattice packets matches the continuum oracle") {
  const std::vector<std::pair<int, int>> cases{{2, 1}, {2, 2}, {3, 1}};
  for (auto [d, m] : cases) {
    const GridSpec g = grid_for(d);
    const auto packets = random_packets(d, 3, 40 + d + m);
    for (std::size_t i = 0; i < packets.size(); ++i) {
      const Field f = packets[i].sample(g);
      const Field h = packets[(i + 1) % packets.size()].sample(g);
      const oracle::PacketProduct prod(packets[i], packets[(i + 1) % packets.size()]);
      for (Sign sign : {Sign::plus, Sign::minus}) {
        const PairingResult res = boundary_pairing(f, h, spec_for(1.0, m, sign));
        const Complex expected = oracle::packet_boundary_pairing(prod, m, 1.0, sign_value(sign));
        CAPTURE(d);
        CAPTURE(m);
        CHECK(relative(res.value, expected) < 1e-6);
        CHECK(relative(*res.surface + *res.principal, res.value) < 1e-12);
      }
    }
  }
}

TEST_CASE("surface term vanishes away from the shell") {
  const GridSpec g = grid_for(2);
  GaussianPacket p = GaussianPacket::centered(2, 3.0);
  p.modulation = Point::Zero(2);
  p.modulation[0] = 4.0;
  const Field f = p.sample(g);
  const PairingResult res = boundary_pairing(f, f, spec_for(1.0, 1, Sign::plus));
  CHECK(std::abs(*res.surface) < 1e-12 * std::abs(res.value));
  const oracle::PacketProduct prod(p, p);
  CHECK(relative(res.value, oracle::packet_boundary_pairing(prod, 1, 1.0, 1.0)) < 1e-9);
}

TEST_CASE("imaginary part equals the circle integral of |f_hat|^2") {
  const GridSpec g = grid_for(2);
  GaussianPacket p = GaussianPacket::centered(2, 1.1);
  p.modulation = Point::Zero(2);
  p.modulation[1] = 0.6;
  p.center = Point::Zero(2);
  p.center[0] = 0.8;
  const Field f = p.sample(g);
  const PairingResult res = boundary_pairing(f, f, spec_for(1.0, 1, Sign::plus));
  const int n = 4096;
  double circle = 0.0;
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * kPi * k / n;
    Point xi(2);
    xi << std::cos(phi), std::sin(phi);
    const double amp = std::exp(-0.5 * 1.1 * 1.1 * (xi + p.modulation).squaredNorm()) * 2.0 * kPi * 1.1 * 1.1;
    circle += amp * amp * 2.0 * kPi / n;
  }
  const double expected = kPi / std::pow(2.0 * kPi, 2) / 2.0 * circle;
  CHECK(res.value.imag() == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("plemelj and epsilon-limit backends agree") {
  const GridSpec g = grid_for(2);
  const auto packets = random_packets(2, 3, 5);
  for (int m : {1, 2})
    for (double lambda : {0.5, 1.0, 2.0}) {
      const Field f = packets[0].sample(g), h = packets[2].sample(g);
      const Complex a = boundary_pairing(f, h, spec_for(lambda, m, Sign::plus)).value;
      const Complex b = boundary_pairing(f, h, spec_for(lambda, m, Sign::plus, Backend::epsilon_limit)).value;
      CHECK(relative(a, b) < 1e-4);
    }
}

TEST_CASE("spec validation") {
  BoundarySpec s = spec_for(3.0, 1, Sign::plus);
  CHECK_THROWS(s.validate());
  s.lambda = 1.0;
  s.delta = 0.0;
  CHECK_THROWS(s.validate());
}

TEST_CASE("boundary_apply solves (P - lambda) u = f weakly and has the sign of the delta term") {
  const GridSpec g = grid_for(2);
  const auto probes = gaussian_probes(g, 1.0);
  for (int m : {1, 2}) {
    for (const auto& p : random_packets(2, 2, 8 + m)) {
      const Field f = p.sample(g);
      const BoundaryApplyResult res = boundary_apply(f, spec_for(1.0, m, Sign::plus));
      CHECK_FALSE(res.flagged);
      CHECK(defining_residual(res.u, f, Complex(1.0), m, probes) < 1e-6);
      CHECK(inner(res.u, f).imag() >= -1e-10);
    }
  }
}

TEST_CASE("sign swap is complex conjugation for real fields") {
  const GridSpec g = grid_for(2);
  const Field f = sample([](const Point& x) { return Complex(std::exp(-0.6 * (x[0] - 0.5) * (x[0] - 0.5) - 0.4 * x[1] * x[1])); }, g);
  const Field plus = boundary_apply(conj(f), spec_for(1.0, 1, Sign::minus), {}, false).u;
  const Field minus = conj(boundary_apply(f, spec_for(1.0, 1, Sign::plus), {}, false).u);
  CHECK((plus.values() - minus.values()).norm() < 1e-8 * minus.values().norm());
}

TEST_CASE("pairings are Hoelder-1/2 in lambda") {
  const GridSpec g = grid_for(2);
  const auto packets = random_packets(2, 2, 77);
  const Field f = packets[0].sample(g), h = packets[1].sample(g);
  const SpectralCorrelation corr(f, h);
  auto constant = [&](double step) {
    double worst = 0.0;
    Complex prev = boundary_pairing(corr, g.nyquist(), spec_for(0.9, 1, Sign::plus)).value;
    for (double lambda = 0.9 + step; lambda <= 1.1 + 1e-12; lambda += step) {
      const Complex cur = boundary_pairing(corr, g.nyquist(), spec_for(lambda, 1, Sign::plus)).value;
      worst = std::max(worst, std::abs(cur - prev) / std::sqrt(step));
      prev = cur;
    }
    return worst;
  };
  const double coarse = constant(0.02), fine = constant(0.01);
  CHECK(std::isfinite(fine));
  CHECK(fine <= 1.5 * coarse);
}

TEST_CASE("sphere restriction norm matches the packet oracle") {
  for (int d : {2, 3}) {
    const GridSpec g = grid_for(d);
    for (const auto& p : random_packets(d, 3, 91)) {
      const oracle::PacketProduct prod(p, p);
      for (double r : {0.5, 1.0, 1.5}) {
        const double expected = std::sqrt(std::pow(r, d - 1) * prod.sphere_integral(r).real());
        CHECK(sphere_restriction_norm(p.sample(g), r) == doctest::Approx(expected).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("regular resolvent pairing agrees with the multiplier off the axis") {
  const GridSpec g = grid_for(2);
  const auto packets = random_packets(2, 2, 12);
  const Field f = packets[0].sample(g), h = packets[1].sample(g);
  const SpectralCorrelation corr(f, h);
  for (Complex z : {Complex(-1.0, 0.0), Complex(1.0, 2.0)}) {
    const Complex direct = inner(free_resolvent(z, 1, f), h);
    CHECK(relative(resolvent_pairing(corr, g.nyquist(), z, 1), direct) < 1e-8);
  }
}
