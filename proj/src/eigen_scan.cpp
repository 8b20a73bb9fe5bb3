#include "lap/eigen_scan.hpp"

#include "lap/boundary.hpp"
#include "lap/bs_solve.hpp"
#include "lap/multiplier.hpp"
#include "lap/parallel.hpp"
#include "lap/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace lap {

namespace {

double sigma_min_of(const ResolventOperator& resolvent, const Potential& potential) {
  const std::vector<Index>& support = potential.support();
  if (support.empty()) return 1.0;
  const auto count = static_cast<Index>(support.size());
  const Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(count, count) +
                                  resolvent.restricted(support) * potential.support_values().asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(system);
  return svd.singularValues()[count - 1];
}

double sigma_min_at(const Potential& potential, const ScanOptions& options, double lambda) {
  const Complex z(lambda, sign_value(options.sign) * options.eps_probe);
  if (lambda < 0.0) return sigma_min_of(PeriodicResolvent(potential.grid(), options.m, z), potential);
  const ResolventKernels kernels(potential.grid(), options.m, Complex(lambda, 0.0), options.window_fraction);
  return sigma_min_of(RadialResolvent(kernels.resolvent(z), z), potential);
}

}  // namespace

double bs_sigma_min_periodic(const Potential& potential, int m, Complex z) {
  return sigma_min_of(PeriodicResolvent(potential.grid(), m, z), potential);
}

EigenScanResult eigen_scan(const Potential& potential, const ScanOptions& options) {
  if (!(options.lower < options.upper)) throw std::invalid_argument("eigen_scan: empty interval");
  if (options.lower <= 0.0 && options.upper >= 0.0) throw std::invalid_argument("eigen_scan: interval must avoid 0");
  if (!(options.eps_probe > 0.0)) throw std::invalid_argument("eigen_scan: eps_probe must be positive");
  if (options.steps < 3) throw std::invalid_argument("eigen_scan: need at least three steps");
  EigenScanResult result;
  result.backend = options.upper < 0.0 ? "periodic" : "radial";
  result.step = (options.upper - options.lower) / (options.steps - 1);
  const auto support_size = potential.support().size();
  if (support_size > 0 && support_size < 8) {
    result.resolution_warning = true;
    result.warning = "support of V has fewer than 8 nodes";
  }
  result.samples.resize(static_cast<std::size_t>(options.steps));
  parallel_for(result.samples.size(), options.workers, [&](std::size_t i) {
    const double lambda = options.lower + result.step * static_cast<double>(i);
    result.samples[i] = {lambda, sigma_min_at(potential, options, lambda)};
  });
  if (support_size == 0) return result;

  std::vector<double> sigmas;
  for (const auto& s : result.samples) sigmas.push_back(s.sigma_min);
  std::vector<double> sorted = sigmas;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t i = 1; i + 1 < sigmas.size(); ++i) {
    if (!(sigmas[i] <= sigmas[i - 1] && sigmas[i] <= sigmas[i + 1])) continue;
    const double a = result.samples[i - 1].lambda, b = result.samples[i + 1].lambda;
    auto fn = [&](double lambda) { return sigma_min_at(potential, options, lambda); };
    const double best = golden_section_minimize(fn, a, b, 1e-5 * result.step);
    const double depth = fn(best);
    if (depth >= options.threshold) continue;
    if (depth < 1e-2 * sigmas[i] && sigmas[i] > options.threshold) {
      result.resolution_warning = true;
      result.warning = "dip much narrower than the scan step";
    }
    result.candidates.push_back({best, depth, median > 0.0 ? 1.0 - depth / median : 0.0, result.step});
  }
  return result;
}

Field apply_hamiltonian(const Potential& potential, int m, const Field& u) {
  return apply_symbol(symbol_p(m), u) + potential.apply(u);
}

namespace {

// Orthonormalises the columns against `locked` and each other; drops dependent columns.
Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& block, const std::vector<ComplexVector>& locked) {
  std::vector<ComplexVector> kept;
  for (Index c = 0; c < block.cols(); ++c) {
    ComplexVector v = block.col(c);
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : locked) v -= q.dot(v) * q;
      for (const auto& q : kept) v -= q.dot(v) * q;
    }
    const double norm = v.norm();
    if (norm > 1e-10 * original) kept.push_back(v / norm);
  }
  Eigen::MatrixXcd out(block.rows(), static_cast<Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Index>(i)) = kept[i];
  return out;
}

}  // namespace

std::vector<EigenPair> lowest_eigenpairs(const Potential& potential, int m, const LobpcgOptions& options) {
  const GridSpec& grid = potential.grid();
  const Index n = grid.size();
  const double shift = 1.0 + potential.sup_norm();
  auto apply_h = [&](const ComplexVector& x) {
    return apply_hamiltonian(potential, m, Field(grid, x, Domain::physical)).values();
  };
  const Symbol precond = Symbol::radial([m, shift](double rho) { return 1.0 / (std::pow(rho * rho, m) + shift); },
                                        "preconditioner");
  auto apply_t = [&](const ComplexVector& x) {
    return apply_symbol(precond, Field(grid, x, Domain::physical)).values();
  };
  Rng rng(options.seed);
  std::vector<ComplexVector> locked;
  std::vector<EigenPair> pairs;
  for (int k = 0; k < options.count; ++k) {
    ComplexVector x(n);
    for (Index i = 0; i < n; ++i) {
      const Point p = grid.node(i);
      x[i] = std::exp(-0.5 * p.squaredNorm()) * (1.0 + 0.1 * rng.uniform());
    }
    Eigen::MatrixXcd start(n, 1);
    start.col(0) = x;
    x = orthonormalize(start, locked).col(0);
    ComplexVector p;
    EigenPair pair{0.0, zero_field(grid), 0.0, 0, false};
    double theta = x.dot(apply_h(x)).real();
    for (int it = 0; it < options.max_iterations; ++it) {
      const ComplexVector hx = apply_h(x);
      theta = x.dot(hx).real();
      const ComplexVector r = hx - theta * x;
      pair.residual = r.norm();
      pair.iterations = it;
      if (pair.residual <= options.tolerance * std::max(1.0, std::abs(theta))) {
        pair.converged = true;
        break;
      }
      const Index cols = p.size() ? 3 : 2;
      Eigen::MatrixXcd block(n, cols);
      block.col(0) = x;
      block.col(1) = apply_t(r);
      if (p.size()) block.col(2) = p;
      const Eigen::MatrixXcd basis = orthonormalize(block, locked);
      Eigen::MatrixXcd hb(n, basis.cols());
      for (Index c = 0; c < basis.cols(); ++c) hb.col(c) = apply_h(basis.col(c));
      Eigen::MatrixXcd gram = basis.adjoint() * hb;
      gram = 0.5 * (gram + gram.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(gram);
      const ComplexVector coeff = small.eigenvectors().col(0);
      const ComplexVector next = basis * coeff;
      // Search direction: the part of the update outside the current iterate.
      p = next - x.dot(next) * x;
      x = next / next.norm();
    }
    pair.value = theta;
    pair.vector = Field(grid, x, Domain::physical);
    locked.push_back(x);
    pairs.push_back(std::move(pair));
  }
  std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  return pairs;
}

double hamiltonian_symmetry_defect(const Potential& potential, int m, const std::vector<NamedField>& family) {
  double worst = 0.0, scale = 0.0;
  for (const auto& a : family) {
    const Field ha = apply_hamiltonian(potential, m, a.field);
    for (const auto& b : family) {
      const Field hb = apply_hamiltonian(potential, m, b.field);
      const Complex lhs = inner(ha, b.field);
      const Complex rhs = inner(a.field, hb);
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(lhs));
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

double decay_ratio(const Field& u, const CompositeNormConfig& cfg) {
  const Field weighted = pointwise(sample([](const Point& x) { return Complex(1.0 + x.squaredNorm()); }, u.grid()), u);
  const double base = xstar_norm(u, cfg);
  if (base == 0.0) throw std::invalid_argument("decay_ratio: zero field");
  return xstar_norm(weighted, cfg) / base;
}

}  // namespace lap
