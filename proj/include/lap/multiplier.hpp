#pragma once

#include "lap/lattice.hpp"

#include <functional>
#include <string>

namespace lap {

// Fourier multiplier symbol xi -> complex. Radial symbols also expose rho -> value.
class Symbol {
 public:
  using General = std::function<Complex(const Point&)>;
  using Radial = std::function<Complex(double)>;

  static Symbol general(General fn, std::string name);
  static Symbol radial(Radial fn, std::string name);

  Complex operator()(const Point& xi) const;
  bool is_radial() const { return static_cast<bool>(radial_); }
  Complex radial_value(double rho) const;
  const std::string& name() const { return name_; }

  // Pointwise product of two symbols.
  friend Symbol operator*(const Symbol& a, const Symbol& b);

 private:
  General general_;
  Radial radial_;
  std::string name_;
};

// |xi|^(2m)
Symbol symbol_p(int m);
// (1 + |xi|^2)^(alpha/2)
Symbol bessel_symbol(double alpha);

double shell_radius(double lambda, int m);  // lambda^(1/(2m))
double bessel_weight(double rho, double alpha);  // (1 + rho^2)^(alpha/2)

// C-infinity transition: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

struct CutoffSpec {
  double lambda = 1.0;
  int m = 1;
  // Support [lower, upper] and plateau [plateau_lower, plateau_upper] in units of lambda.
  double lower = 0.5;
  double plateau_lower = 0.75;
  double plateau_upper = 1.25;
  double upper = 1.5;
};

// chi as a function of the symbol value P = |xi|^(2m).
double cutoff_profile(const CutoffSpec& spec, double p_value);
Symbol chi_lambda(const CutoffSpec& spec);
// Throws if the support shell spans fewer than 8 lattice frequency steps radially.
void require_shell_resolution(const CutoffSpec& spec, const GridSpec& grid, int min_steps = 8);

Field apply_symbol(const Symbol& symbol, const Field& f);

// Periodic multiplier (P_m(xi) - z)^(-1); z must stay away from [0, inf).
Field free_resolvent(Complex z, int m, const Field& f);

}  // namespace lap
