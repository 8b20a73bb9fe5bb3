#pragma once

#include "lap/lattice.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lap {

class LorentzExponents {
 public:
  // q = nullopt encodes q = infinity.
  LorentzExponents(double p, std::optional<double> q);
  static LorentzExponents weak(double p) { return LorentzExponents(p, std::nullopt); }

  double p() const { return p_; }
  std::optional<double> q() const { return q_; }
  bool is_weak() const { return !q_.has_value(); }

 private:
  double p_;
  std::optional<double> q_;
};

// Stein-Tomas pair p_d = (2d+2)/(d+3) and its dual (2d+2)/(d-1).
double stein_tomas_exponent(int d);
double dual_stein_tomas_exponent(int d);

double lp_norm(const Field& f, double p);

// Exact plateau sum over the decreasing rearrangement of |values|, each carrying the given measure.
double lorentz_norm(const Field& f, const LorentzExponents& exps);
double lorentz_norm(std::span<const double> magnitudes, double cell_measure, const LorentzExponents& exps);
double lorentz_norm(std::span<const double> magnitudes, std::span<const double> measures,
                    const LorentzExponents& exps);

// Shell membership D_0 = {|x| <= 1}, D_j = {2^(j-1) < |x| <= 2^j}. Shells reaching past the box are
// truncated to the box.
class DyadicShells {
 public:
  explicit DyadicShells(const GridSpec& grid);
  int shell_count() const { return shell_count_; }
  int shell_of(Index flat) const { return membership_[flat]; }
  // Shell index for a radius, ignoring the box.
  static int shell_for_radius(double radius);

 private:
  std::vector<int> membership_;
  int shell_count_ = 0;
};

Eigen::VectorXd shell_l2_norms(const Field& f);
double b_norm(const Field& f);
double bstar_norm(const Field& f);

// Slab norms along the last coordinate: integral over x_d of ||f(., x_d)||, and its supremum.
double slab_integral_norm(const Field& f);
double slab_sup_norm(const Field& f);

class WeightParams {
 public:
  WeightParams(double order, double gamma);
  double order() const { return order_; }
  double gamma() const { return gamma_; }

 private:
  double order_;
  double gamma_;
};

double mu_weight(double t, const WeightParams& w);
// Multiplies f(x) by mu(|x|)^power.
Field apply_mu(const Field& f, const WeightParams& w, double power = 1.0);

class CompositeNormConfig {
 public:
  CompositeNormConfig(int m, int d, double lambda_ref = 1.0);
  int m() const { return m_; }
  int d() const { return d_; }
  double theta() const;
  double lambda_ref() const { return lambda_ref_; }
  // Half-widths of the frequency splittings, as fractions of the shell radius.
  std::vector<double> splitting_widths{0.0625, 0.125, 0.25, 0.5, 1.0};

 private:
  int m_;
  int d_;
  double lambda_ref_;
};

struct XstarParts {
  double lorentz = 0.0;  // L^{p_d', 2} norm of S_theta u
  double bstar = 0.0;    // B* norm of S_m u
  double value() const { return std::max(lorentz, bstar); }
};

XstarParts xstar_parts(const Field& s_theta_u, const Field& s_m_u, int d);
XstarParts xstar_components(const Field& u, const CompositeNormConfig& cfg);
double xstar_norm(const Field& u, const CompositeNormConfig& cfg);

struct Splitting {
  Field low;   // measured in the Lorentz part
  Field near;  // measured in the B part
};

struct XNormBound {
  double value = 0.0;
  double lorentz = 0.0;
  double b = 0.0;
  std::string splitting;
  bool upper_bound = true;
};

XNormBound x_norm_upper(const Field& f, const CompositeNormConfig& cfg,
                        const std::optional<Splitting>& witness = std::nullopt);

}  // namespace lap
