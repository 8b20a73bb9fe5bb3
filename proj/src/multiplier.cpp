#include "lap/multiplier.hpp"

#include <cmath>
#include <sstream>

namespace lap {

Symbol Symbol::general(General fn, std::string name) {
  Symbol s;
  s.general_ = std::move(fn);
  s.name_ = std::move(name);
  return s;
}

Symbol Symbol::radial(Radial fn, std::string name) {
  Symbol s;
  s.radial_ = std::move(fn);
  s.name_ = std::move(name);
  return s;
}

Complex Symbol::operator()(const Point& xi) const {
  if (radial_) return radial_(xi.norm());
  return general_(xi);
}

Complex Symbol::radial_value(double rho) const {
  if (!radial_) throw std::logic_error("symbol '" + name_ + "' is not radial");
  return radial_(rho);
}

Symbol operator*(const Symbol& a, const Symbol& b) {
  const std::string name = a.name_ + "*" + b.name_;
  if (a.is_radial() && b.is_radial())
    return Symbol::radial([a, b](double rho) { return a.radial_(rho) * b.radial_(rho); }, name);
  return Symbol::general([a, b](const Point& xi) { return a(xi) * b(xi); }, name);
}

Symbol symbol_p(int m) {
  if (m < 1) throw std::invalid_argument("symbol_p: m must be >= 1");
  return Symbol::radial([m](double rho) { return Complex(std::pow(rho * rho, m), 0.0); },
                        "P_" + std::to_string(m));
}

double bessel_weight(double rho, double alpha) { return std::pow(1.0 + rho * rho, 0.5 * alpha); }

Symbol bessel_symbol(double alpha) {
  std::ostringstream name;
  name << "S_" << alpha;
  return Symbol::radial([alpha](double rho) { return Complex(bessel_weight(rho, alpha), 0.0); }, name.str());
}

double shell_radius(double lambda, int m) {
  if (!(lambda > 0.0)) throw std::invalid_argument("shell_radius: lambda must be positive");
  return std::pow(lambda, 1.0 / (2.0 * m));
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double cutoff_profile(const CutoffSpec& spec, double p_value) {
  const double lo = spec.lower * spec.lambda, plo = spec.plateau_lower * spec.lambda;
  const double phi = spec.plateau_upper * spec.lambda, hi = spec.upper * spec.lambda;
  if (p_value <= lo || p_value >= hi) return 0.0;
  if (p_value >= plo && p_value <= phi) return 1.0;
  if (p_value < plo) return smooth_step((p_value - lo) / (plo - lo));
  return smooth_step((hi - p_value) / (hi - phi));
}

namespace {

void validate(const CutoffSpec& spec) {
  if (!(spec.lambda > 0.0)) throw std::invalid_argument("chi_lambda: lambda must be positive");
  if (spec.m < 1) throw std::invalid_argument("chi_lambda: m must be >= 1");
  if (!(0.0 < spec.lower && spec.lower < spec.plateau_lower && spec.plateau_lower <= 1.0 &&
        1.0 <= spec.plateau_upper && spec.plateau_upper < spec.upper))
    throw std::invalid_argument("chi_lambda: profile parameters must be ordered around 1");
}

}  // namespace

Symbol chi_lambda(const CutoffSpec& spec) {
  validate(spec);
  const int m = spec.m;
  std::ostringstream name;
  name << "chi_" << spec.lambda;
  return Symbol::radial(
      [spec, m](double rho) { return Complex(cutoff_profile(spec, std::pow(rho * rho, m)), 0.0); },
      name.str());
}

void require_shell_resolution(const CutoffSpec& spec, const GridSpec& grid, int min_steps) {
  validate(spec);
  const double width = shell_radius(spec.upper * spec.lambda, spec.m) -
                       shell_radius(spec.lower * spec.lambda, spec.m);
  const double steps = width / grid.frequency_step();
  if (steps < min_steps) {
    const double needed_half_width = min_steps * kPi / width;
    int needed_points = static_cast<int>(std::ceil(2.0 * needed_half_width / grid.spacing()));
    needed_points += needed_points % 2;
    std::ostringstream msg;
    msg << "chi_lambda: shell at lambda=" << spec.lambda << " spans " << steps
        << " frequency steps (need " << min_steps << "); use half_width >= " << needed_half_width
        << ", i.e. points_per_axis >= " << needed_points << " at the current spacing";
    throw std::invalid_argument(msg.str());
  }
}

Field apply_symbol(const Symbol& symbol, const Field& f) {
  const bool physical = f.domain() == Domain::physical;
  Field spectrum = physical ? forward_transform(f) : f;
  const GridSpec& grid = f.grid();
  ComplexVector v = spectrum.values();
  Point xi(grid.dimension());
  const double step = grid.frequency_step();
  for_each_node(grid, [&](Index flat, const LatticeIndex& idx) {
    Complex s;
    if (symbol.is_radial()) {
      long long sq = 0;
      for (int a = 0; a < grid.dimension(); ++a) {
        const long long c = idx[a] - grid.points_per_axis() / 2;
        sq += c * c;
      }
      s = symbol.radial_value(step * std::sqrt(static_cast<double>(sq)));
    } else {
      for (int a = 0; a < grid.dimension(); ++a) xi[a] = grid.frequency(idx[a]);
      s = symbol(xi);
    }
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      std::ostringstream msg;
      msg << "apply_symbol: symbol '" << symbol.name() << "' is not finite at lattice frequency " << flat;
      throw std::domain_error(msg.str());
    }
    v[flat] *= s;
  });
  Field out(grid, std::move(v), Domain::spectral);
  return physical ? inverse_transform(out) : out;
}

Field free_resolvent(Complex z, int m, const Field& f) {
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw std::domain_error("free_resolvent: z lies on [0, inf); use the boundary-value operator");
  const double threshold = 1e-8 * (1.0 + std::abs(z));
  const Symbol resolvent = Symbol::radial(
      [m, z, threshold](double rho) {
        const Complex denom = std::pow(rho * rho, m) - z;
        if (std::abs(denom) < threshold)
          throw std::domain_error("free_resolvent: z is within noise distance of a lattice value of P_m");
        return 1.0 / denom;
      },
      "resolvent");
  return apply_symbol(resolvent, f);
}

}  // namespace lap
