#include "lap/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lap {

std::string to_string(PotentialClass c) {
  switch (c) {
    case PotentialClass::weak_lorentz: return "weak_lorentz";
    case PotentialClass::bounded_compact: return "bounded_compact";
    case PotentialClass::custom: return "custom";
  }
  return "custom";
}

Potential::Potential(Field values, PotentialClass kind, std::optional<double> exponent, std::string name)
    : values_(std::move(values)), kind_(kind), exponent_(exponent), name_(std::move(name)) {
  if (values_.domain() != Domain::physical) throw std::invalid_argument("potential: values must be physical");
  const ComplexVector& v = values_.values();
  const double peak = v.cwiseAbs().maxCoeff();
  for (Index k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag())) {
      std::ostringstream msg;
      msg << "potential: non-finite value at node " << k;
      throw std::domain_error(msg.str());
    }
    if (std::abs(v[k].imag()) > 1e-14 * std::max(peak, 1.0))
      throw std::domain_error("potential: values must be real");
  }
  ComplexVector real = v.real().cast<Complex>();
  values_ = values_.with_values(std::move(real));
  for (Index k = 0; k < v.size(); ++k) {
    if (values_.values()[k].real() != 0.0) {
      support_.push_back(k);
      support_radius_ = std::max(support_radius_, values_.grid().node(k).norm());
    }
  }
  if (exponent_ && !(*exponent_ >= 1.0)) throw std::invalid_argument("potential: Lorentz exponent must be >= 1");
}

Potential Potential::zero(const GridSpec& grid) {
  return Potential(zero_field(grid), PotentialClass::bounded_compact, std::nullopt, "zero");
}

double Potential::sup_norm() const { return values_.values().cwiseAbs().maxCoeff(); }

Eigen::VectorXd Potential::support_values() const {
  Eigen::VectorXd out(static_cast<Index>(support_.size()));
  for (std::size_t i = 0; i < support_.size(); ++i) out[static_cast<Index>(i)] = values_.values()[support_[i]].real();
  return out;
}

Field Potential::apply(const Field& f) const { return pointwise(values_, f); }

bool ExponentRange::contains(double q) const {
  const bool above = lower_inclusive ? q >= lower : q > lower;
  return above && q <= upper;
}

ExponentRange admissible_exponents(int m, int d) {
  if (m < 1 || d < 2) throw std::invalid_argument("admissible_exponents: need m >= 1 and d >= 2");
  ExponentRange range;
  range.upper = 0.5 * (d + 1);
  if (d > 2 * m) {
    range.lower = static_cast<double>(d) / (2.0 * m);
    range.lower_inclusive = true;
  } else {
    range.lower = 1.0;
    range.lower_inclusive = false;
  }
  return range;
}

Potential square_well(const GridSpec& grid, double depth, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("square_well: radius must be positive");
  const Field v = sample([=](const Point& x) { return Complex(x.norm() <= radius ? -depth : 0.0); }, grid);
  std::ostringstream name;
  name << "square_well(depth=" << depth << ",radius=" << radius << ")";
  return Potential(v, PotentialClass::bounded_compact, std::nullopt, name.str());
}

namespace {

struct ShellLayout {
  std::vector<Index> order;         // nodes sorted by radius
  std::vector<std::size_t> bounds;  // shell j occupies order[bounds[j-1], bounds[j])
};

ShellLayout layout_shells(int terms, const GridSpec& grid) {
  if (terms < 1) throw std::invalid_argument("example_potential: need at least one term");
  ShellLayout layout;
  layout.order.resize(static_cast<std::size_t>(grid.size()));
  std::iota(layout.order.begin(), layout.order.end(), Index{0});
  std::stable_sort(layout.order.begin(), layout.order.end(),
                   [&](Index a, Index b) { return grid.centered_square(a) < grid.centered_square(b); });
  const double cell = grid.cell_volume();
  layout.bounds.push_back(0);
  for (int j = 1; j <= terms; ++j) {
    const double target = 1.0 / std::log(1.0 + j);
    const auto count = static_cast<std::size_t>(std::llround(target / cell));
    if (count == 0 || std::abs(count * cell - target) > 0.01 * target) {
      std::ostringstream msg;
      msg << "example_potential: the grid cell " << cell << " cannot realise shell " << j << " of measure " << target
          << " to 1%";
      throw std::invalid_argument(msg.str());
    }
    layout.bounds.push_back(layout.bounds.back() + count);
  }
  const std::size_t used = layout.bounds.back();
  if (used > layout.order.size() || grid.node(layout.order[used - 1]).norm() > grid.half_width() - grid.spacing()) {
    std::ostringstream msg;
    msg << "example_potential: the box of half width " << grid.half_width() << " cannot host " << terms << " shells";
    throw std::invalid_argument(msg.str());
  }
  return layout;
}

}  // namespace

Potential example_potential(double q, int terms, const GridSpec& grid) {
  if (!(q >= 1.0)) throw std::invalid_argument("example_potential: q must be >= 1");
  const ShellLayout layout = layout_shells(terms, grid);
  ComplexVector v = ComplexVector::Zero(grid.size());
  for (int j = 1; j <= terms; ++j) {
    const double amplitude = std::pow(static_cast<double>(j), -1.0 / q);
    for (std::size_t i = layout.bounds[j - 1]; i < layout.bounds[j]; ++i) v[layout.order[i]] = amplitude;
  }
  std::ostringstream name;
  name << "example(q=" << q << ",J=" << terms << ")";
  return Potential(Field(grid, std::move(v), Domain::physical), PotentialClass::weak_lorentz, q, name.str());
}

std::vector<ShellMeasure> example_shell_measures(double q, int terms, const GridSpec& grid) {
  (void)q;
  const ShellLayout layout = layout_shells(terms, grid);
  std::vector<ShellMeasure> out;
  for (int j = 1; j <= terms; ++j) {
    ShellMeasure s;
    s.index = j;
    s.target = 1.0 / std::log(1.0 + j);
    s.measure = static_cast<double>(layout.bounds[j] - layout.bounds[j - 1]) * grid.cell_volume();
    s.relative_error = std::abs(s.measure - s.target) / s.target;
    out.push_back(s);
  }
  return out;
}

double example_tail_norm(double q, int first, int last) {
  if (first < 1 || last < first) return 0.0;
  std::vector<double> mags, measures;
  for (int j = first; j <= last; ++j) {
    mags.push_back(std::pow(static_cast<double>(j), -1.0 / q));
    measures.push_back(1.0 / std::log(1.0 + j));
  }
  return lorentz_norm(std::span<const double>(mags), std::span<const double>(measures), LorentzExponents::weak(q));
}

double example_tail_bound(double q, int first) {
  // lambda floor(lambda^-q)^(1/q) <= 1 with equality at lambda = k^(-1/q).
  return std::pow(std::log(2.0 + first), -1.0 / q);
}

namespace {

double local_l2(const Field& u, double radius) {
  const GridSpec& g = u.grid();
  double acc = 0.0;
  for (Index k = 0; k < g.size(); ++k)
    if (g.node(k).norm() <= radius) acc += std::norm(u.values()[k]);
  return std::sqrt(acc * g.cell_volume());
}

}  // namespace

AdmissibilityReport admissibility_check(const Potential& potential, const std::vector<NamedField>& family,
                                        const AdmissibilityConfig& config) {
  AdmissibilityReport report;
  const GridSpec& grid = potential.grid();
  const int d = grid.dimension();
  for (const auto& nf : family) report.family.push_back(nf.name);
  if (potential.exponent()) report.exponent_admissible = admissible_exponents(config.m, d).contains(*potential.exponent());

  // (1) symmetry on test pairs
  double scale = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      const Field& phi = family[i].field;
      const Field& psi = family[j].field;
      const Complex a = inner(potential.apply(phi), psi);
      const Complex b = inner(phi, potential.apply(psi));
      report.symmetry_defect = std::max(report.symmetry_defect, std::abs(a - b));
      scale = std::max(scale, std::abs(a) + std::abs(b));
    }
  }
  report.symmetric = report.symmetry_defect <= 1e-10 * std::max(scale, 1e-300) || report.symmetry_defect == 0.0;

  // (3) factorisation V = sgn(V)|V|^(1/2) |V|^(1/2)
  report.factorization = "J=1; A_1 = |V|^(1/2)*, B_1 = sgn(V)|V|^(1/2)*";
  ComplexVector root(grid.size()), signed_root(grid.size());
  for (Index k = 0; k < grid.size(); ++k) {
    const double v = potential.field().values()[k].real();
    root[k] = std::sqrt(std::abs(v));
    signed_root[k] = v < 0.0 ? -std::sqrt(-v) : std::sqrt(v);
  }
  const Field a_op(grid, root), b_op(grid, signed_root);
  double fact_scale = 0.0;
  for (const auto& f : family) {
    for (const auto& g : family) {
      const Complex lhs = inner(potential.apply(f.field), g.field);
      const Complex rhs = inner(pointwise(b_op, f.field), pointwise(a_op, g.field));
      report.factorization_defect = std::max(report.factorization_defect, std::abs(lhs - rhs));
      fact_scale = std::max(fact_scale, std::abs(lhs));
    }
  }
  if (fact_scale > 0.0) report.factorization_defect /= fact_scale;
  report.factorization_holds = report.factorization_defect <= 1e-10;

  // (2) smallness table
  const CompositeNormConfig cfg(config.m, d, config.lambda_ref);
  report.smallness_holds = true;
  for (double order : config.orders) {
    for (double gamma : config.gammas) {
      const WeightParams w(order, gamma);
      std::vector<double> lhs, weighted, local;
      std::vector<std::vector<double>> local_by_radius(config.radii.size());
      SmallnessRow row;
      row.order = order;
      row.gamma = gamma;
      for (const auto& nf : family) {
        const Field vu = potential.apply(nf.field);
        const double a = x_norm_upper(apply_mu(vu, w), cfg).value;
        const double b = xstar_norm(apply_mu(nf.field, w), cfg);
        lhs.push_back(a);
        weighted.push_back(b);
        for (std::size_t r = 0; r < config.radii.size(); ++r)
          local_by_radius[r].push_back(local_l2(nf.field, config.radii[r]));
        if (b > 0.0) row.pure_ratio = std::max(row.pure_ratio, a / b);
      }
      std::vector<double> eps = config.epsilons;
      std::sort(eps.begin(), eps.end());
      for (double e : eps) {
        double best_a = std::numeric_limits<double>::infinity(), best_r = 0.0;
        for (std::size_t r = 0; r < config.radii.size(); ++r) {
          double needed = 0.0;
          for (std::size_t i = 0; i < lhs.size(); ++i) {
            const double excess = lhs[i] - e * weighted[i];
            if (excess <= 1e-14 * std::max(lhs[i], 1e-300)) continue;
            const double c = local_by_radius[r][i];
            needed = c > 0.0 ? std::max(needed, excess / c) : std::numeric_limits<double>::infinity();
          }
          if (needed < best_a) {
            best_a = needed;
            best_r = needed > 0.0 ? config.radii[r] : 0.0;
          }
        }
        if (best_a <= config.constant_cap) {
          row.epsilon = e;
          row.constant = best_a;
          row.radius = best_r;
          row.satisfiable = true;
          break;
        }
      }
      report.smallness_holds = report.smallness_holds && row.satisfiable;
      report.smallness.push_back(row);
    }
  }
  return report;
}

}  // namespace lap
