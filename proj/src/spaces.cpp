#include "lap/spaces.hpp"

#include "lap/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace lap {

LorentzExponents::LorentzExponents(double p, std::optional<double> q) : p_(p), q_(q) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("lorentz: p must be > 1");
  if (q && !(*q >= 1.0 && std::isfinite(*q))) throw std::invalid_argument("lorentz: q must be >= 1 or infinite");
}

double stein_tomas_exponent(int d) { return (2.0 * d + 2.0) / (d + 3.0); }

double dual_stein_tomas_exponent(int d) { return (2.0 * d + 2.0) / (d - 1.0); }

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const double s = f.values().cwiseAbs().array().pow(p).sum();
  return std::pow(f.grid().cell_volume() * s, 1.0 / p);
}

namespace {

double plateau_sum(std::vector<std::pair<double, double>>& entries, const LorentzExponents& exps) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const double p = exps.p();
  double cumulative = 0.0;
  if (exps.is_weak()) {
    double best = 0.0;
    for (const auto& [a, mu] : entries) {
      if (a <= 0.0) break;
      cumulative += mu;
      best = std::max(best, a * std::pow(cumulative, 1.0 / p));
    }
    return best;
  }
  const double q = *exps.q();
  const double e = q / p;
  double sum = 0.0;
  for (const auto& [a, mu] : entries) {
    if (a <= 0.0) break;
    const double previous = cumulative;
    cumulative += mu;
    // T_k^e - T_{k-1}^e without cancellation.
    const double growth = previous > 0.0 ? -std::expm1(e * std::log1p(-mu / cumulative)) : 1.0;
    sum += std::pow(a, q) * std::pow(cumulative, e) * growth;
  }
  return std::pow((p / q) * sum, 1.0 / q);
}

}  // namespace

double lorentz_norm(std::span<const double> magnitudes, std::span<const double> measures,
                    const LorentzExponents& exps) {
  if (magnitudes.size() != measures.size())
    throw std::invalid_argument("lorentz_norm: magnitudes and measures differ in length");
  std::vector<std::pair<double, double>> entries;
  entries.reserve(magnitudes.size());
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (measures[i] < 0.0) throw std::invalid_argument("lorentz_norm: negative measure");
    if (magnitudes[i] > 0.0 && measures[i] > 0.0) entries.emplace_back(magnitudes[i], measures[i]);
  }
  return plateau_sum(entries, exps);
}

double lorentz_norm(std::span<const double> magnitudes, double cell_measure, const LorentzExponents& exps) {
  std::vector<std::pair<double, double>> entries;
  entries.reserve(magnitudes.size());
  for (double a : magnitudes)
    if (a > 0.0) entries.emplace_back(a, cell_measure);
  return plateau_sum(entries, exps);
}

double lorentz_norm(const Field& f, const LorentzExponents& exps) {
  if (f.domain() != Domain::physical) throw std::invalid_argument("lorentz_norm: field must be physical");
  const Eigen::VectorXd mags = f.values().cwiseAbs();
  return lorentz_norm(std::span<const double>(mags.data(), mags.size()), f.grid().cell_volume(), exps);
}

int DyadicShells::shell_for_radius(double radius) {
  if (radius <= 1.0) return 0;
  int j = 1;
  double outer = 2.0;
  while (radius > outer) {
    outer *= 2.0;
    ++j;
  }
  return j;
}

DyadicShells::DyadicShells(const GridSpec& grid) : membership_(grid.size(), 0) {
  if (grid.half_width() < 2.0)
    throw std::invalid_argument("dyadic shells: the box must contain the shell 1 <= |x| <= 2 (L >= 2)");
  const double h = grid.spacing();
  for (Index flat = 0; flat < grid.size(); ++flat) {
    const int j = shell_for_radius(h * std::sqrt(static_cast<double>(grid.centered_square(flat))));
    membership_[flat] = j;
    shell_count_ = std::max(shell_count_, j + 1);
  }
}

Eigen::VectorXd shell_l2_norms(const Field& f) {
  if (f.domain() != Domain::physical) throw std::invalid_argument("shell norms: field must be physical");
  const DyadicShells shells(f.grid());
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(shells.shell_count());
  for (Index k = 0; k < f.grid().size(); ++k) sums[shells.shell_of(k)] += std::norm(f.values()[k]);
  return (f.grid().cell_volume() * sums).cwiseSqrt();
}

double b_norm(const Field& f) {
  const Eigen::VectorXd norms = shell_l2_norms(f);
  double s = 0.0;
  for (Index j = 0; j < norms.size(); ++j) s += std::pow(2.0, 0.5 * j) * norms[j];
  return s;
}

double bstar_norm(const Field& f) {
  const Eigen::VectorXd norms = shell_l2_norms(f);
  double s = 0.0;
  for (Index j = 0; j < norms.size(); ++j) s = std::max(s, std::pow(2.0, -0.5 * j) * norms[j]);
  return s;
}

namespace {

Eigen::VectorXd slab_norms(const Field& f) {
  if (f.domain() != Domain::physical) throw std::invalid_argument("slab norms: field must be physical");
  const GridSpec& grid = f.grid();
  const int n = grid.points_per_axis();
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(n);
  // Row-major storage: the last coordinate varies fastest.
  for (Index k = 0; k < grid.size(); ++k) sums[k % n] += std::norm(f.values()[k]);
  return (std::pow(grid.spacing(), grid.dimension() - 1) * sums).cwiseSqrt();
}

}  // namespace

double slab_integral_norm(const Field& f) { return f.grid().spacing() * slab_norms(f).sum(); }

double slab_sup_norm(const Field& f) { return slab_norms(f).maxCoeff(); }

WeightParams::WeightParams(double order, double gamma) : order_(order), gamma_(gamma) {
  if (!(order >= 0.0)) throw std::invalid_argument("weight: N must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("weight: gamma must lie in (0, 1]");
}

double mu_weight(double t, const WeightParams& w) {
  const double t2 = t * t;
  return std::pow((1.0 + t2) / (1.0 + w.gamma() * t2), w.order());
}

Field apply_mu(const Field& f, const WeightParams& w, double power) {
  if (f.domain() != Domain::physical) throw std::invalid_argument("apply_mu: field must be physical");
  const GridSpec& grid = f.grid();
  ComplexVector v = f.values();
  const double h = grid.spacing();
  for (Index k = 0; k < grid.size(); ++k) {
    const double t = h * std::sqrt(static_cast<double>(grid.centered_square(k)));
    v[k] *= std::pow(mu_weight(t, w), power);
  }
  return f.with_values(std::move(v));
}

CompositeNormConfig::CompositeNormConfig(int m, int d, double lambda_ref) : m_(m), d_(d), lambda_ref_(lambda_ref) {
  if (m < 1) throw std::invalid_argument("composite norm: m must be >= 1");
  if (d < 2 || d > 4) throw std::invalid_argument("composite norm: d must lie in [2, 4]");
  if (!(lambda_ref > 0.0)) throw std::invalid_argument("composite norm: lambda_ref must be positive");
}

double CompositeNormConfig::theta() const { return m_ - static_cast<double>(d_) / (d_ + 1.0); }

XstarParts xstar_parts(const Field& s_theta_u, const Field& s_m_u, int d) {
  XstarParts parts;
  parts.lorentz = lorentz_norm(s_theta_u, LorentzExponents(dual_stein_tomas_exponent(d), 2.0));
  parts.bstar = bstar_norm(s_m_u);
  return parts;
}

XstarParts xstar_components(const Field& u, const CompositeNormConfig& cfg) {
  if (u.domain() != Domain::physical) throw std::invalid_argument("xstar_norm: field must be physical");
  const Field spectrum = forward_transform(u);
  return xstar_parts(inverse_transform(apply_symbol(bessel_symbol(cfg.theta()), spectrum)),
                     inverse_transform(apply_symbol(bessel_symbol(cfg.m()), spectrum)), cfg.d());
}

double xstar_norm(const Field& u, const CompositeNormConfig& cfg) { return xstar_components(u, cfg).value(); }

namespace {

Field radial_multiply(const Field& spectrum, const std::function<double(double)>& fn) {
  const GridSpec& grid = spectrum.grid();
  ComplexVector v = spectrum.values();
  const double step = grid.frequency_step();
  for (Index k = 0; k < grid.size(); ++k)
    v[k] *= fn(step * std::sqrt(static_cast<double>(grid.centered_square(k))));
  return Field(grid, std::move(v), Domain::spectral);
}

}  // namespace

XNormBound x_norm_upper(const Field& f, const CompositeNormConfig& cfg, const std::optional<Splitting>& witness) {
  if (f.domain() != Domain::physical) throw std::invalid_argument("x_norm_upper: field must be physical");
  const int d = cfg.d();
  const LorentzExponents exps(stein_tomas_exponent(d), 2.0);
  const double theta = cfg.theta();
  const int m = cfg.m();

  if (witness) {
    require_same_grid(f, witness->low);
    require_same_grid(f, witness->near);
    const double mismatch = (witness->low.values() + witness->near.values() - f.values()).norm();
    if (mismatch > 1e-10 * std::max(1.0, f.values().norm()))
      throw std::invalid_argument("x_norm_upper: witness pieces do not sum to f");
    XNormBound out;
    out.lorentz = lorentz_norm(apply_symbol(bessel_symbol(-theta), witness->low), exps);
    out.b = b_norm(apply_symbol(bessel_symbol(-m), witness->near));
    out.value = out.lorentz + out.b;
    out.splitting = "witness";
    return out;
  }

  const Field spectrum = forward_transform(f);
  XNormBound best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](double lorentz, double b, const std::string& name) {
    if (lorentz + b < best.value) {
      best.value = lorentz + b;
      best.lorentz = lorentz;
      best.b = b;
      best.splitting = name;
    }
  };
  consider(lorentz_norm(inverse_transform(radial_multiply(spectrum, [&](double rho) {
             return bessel_weight(rho, -theta);
           })),
                        exps),
           0.0, "lorentz-only");
  consider(0.0,
           b_norm(inverse_transform(radial_multiply(spectrum, [&](double rho) { return bessel_weight(rho, -m); }))),
           "b-only");
  const double r = shell_radius(cfg.lambda_ref(), m);
  for (double width : cfg.splitting_widths) {
    const double t = width * r;
    auto near = [r, t](double rho) { return 1.0 - smooth_step((std::abs(rho - r) - t) / t); };
    const double lorentz = lorentz_norm(inverse_transform(radial_multiply(spectrum, [&](double rho) {
                                          return (1.0 - near(rho)) * bessel_weight(rho, -theta);
                                        })),
                                        exps);
    const double b = b_norm(inverse_transform(
        radial_multiply(spectrum, [&](double rho) { return near(rho) * bessel_weight(rho, -m); })));
    std::ostringstream name;
    name << "shell-" << width;
    consider(lorentz, b, name.str());
  }
  if (f.values().isZero(0.0)) {
    best.value = 0.0;
    best.lorentz = best.b = 0.0;
  }
  return best;
}

}  // namespace lap
