#include "lap/bs_solve.hpp"

#include "lap/multiplier.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace lap {

Field ResolventOperator::apply_sparse(const std::vector<Index>& nodes, const Eigen::VectorXcd& values) const {
  ComplexVector v = ComplexVector::Zero(grid().size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[nodes[i]] = values[static_cast<Index>(i)];
  return apply(Field(grid(), std::move(v), Domain::physical));
}

PeriodicResolvent::PeriodicResolvent(const GridSpec& grid, int m, Complex z) : grid_(grid), m_(m), z_(z) {
  const int half = grid.points_per_axis() / 2;
  LatticeIndex origin{half, half, half, half};
  ComplexVector delta = ComplexVector::Zero(grid.size());
  delta[grid.flatten(origin)] = 1.0 / grid.cell_volume();
  green_ = free_resolvent(z, m, Field(grid, std::move(delta), Domain::physical)).values();
}

Field PeriodicResolvent::apply(const Field& f) const {
  if (!(f.grid() == grid_)) throw std::invalid_argument("periodic resolvent: grid mismatch");
  return free_resolvent(z_, m_, f);
}

Eigen::MatrixXcd PeriodicResolvent::restricted(const std::vector<Index>& nodes) const {
  const int d = grid_.dimension();
  const int n = grid_.points_per_axis();
  std::vector<LatticeIndex> idx;
  idx.reserve(nodes.size());
  for (Index k : nodes) idx.push_back(grid_.unflatten(k));
  const auto count = static_cast<Index>(nodes.size());
  Eigen::MatrixXcd out(count, count);
  const double vol = grid_.cell_volume();
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < count; ++j) {
      LatticeIndex offset{0, 0, 0, 0};
      for (int a = 0; a < d; ++a) offset[a] = ((idx[i][a] - idx[j][a]) % n + n + n / 2) % n;
      out(i, j) = vol * green_[grid_.flatten(offset)];
    }
  }
  return out;
}

RadialResolvent::RadialResolvent(RadialConvolution convolution, Complex z)
    : convolution_(std::move(convolution)), z_(z) {}

GmresResult gmres(const LinearOperator& op, const ComplexVector& rhs, double tol, int restart, int max_iterations) {
  GmresResult out;
  const Index n = rhs.size();
  out.x = ComplexVector::Zero(n);
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    out.converged = true;
    return out;
  }
  restart = std::max(1, std::min<int>(restart, static_cast<int>(n)));
  while (out.iterations < max_iterations) {
    ComplexVector r = rhs - op(out.x);
    double beta = r.norm();
    if (beta <= tol * rhs_norm) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXcd basis(n, restart + 1);
    Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(restart + 1, restart);
    std::vector<Complex> cs(restart), sn(restart);
    ComplexVector g = ComplexVector::Zero(restart + 1);
    g[0] = beta;
    basis.col(0) = r / beta;
    int k = 0;
    for (; k < restart && out.iterations < max_iterations; ++k) {
      ++out.iterations;
      ComplexVector w = op(basis.col(k));
      for (int i = 0; i <= k; ++i) {
        hess(i, k) = basis.col(i).dot(w);
        w -= hess(i, k) * basis.col(i);
      }
      hess(k + 1, k) = w.norm();
      if (std::abs(hess(k + 1, k)) > 0.0) basis.col(k + 1) = w / hess(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const Complex t = std::conj(cs[i]) * hess(i, k) + std::conj(sn[i]) * hess(i + 1, k);
        hess(i + 1, k) = -sn[i] * hess(i, k) + cs[i] * hess(i + 1, k);
        hess(i, k) = t;
      }
      const double a = std::abs(hess(k, k)), b = std::abs(hess(k + 1, k));
      const double rho = std::hypot(a, b);
      if (rho == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = hess(k, k) / rho;
        sn[k] = hess(k + 1, k) / rho;
      }
      hess(k, k) = rho;
      hess(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      const double rel = std::abs(g[k + 1]) / rhs_norm;
      out.history.push_back(rel);
      if (rel <= tol || b == 0.0) {
        ++k;
        break;
      }
    }
    const ComplexVector y =
        hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    out.x += basis.leftCols(k) * y;
    if (!out.history.empty() && out.history.back() <= tol) {
      out.converged = (rhs - op(out.x)).norm() <= 10.0 * tol * rhs_norm;
      if (out.converged) break;
    }
  }
  if (!out.converged) out.converged = (rhs - op(out.x)).norm() <= tol * rhs_norm;
  return out;
}

BsSolve bs_solve(const ResolventOperator& resolvent, const Potential& potential, const Field& f,
                 const BsOptions& options) {
  if (!(resolvent.grid() == potential.grid())) throw std::invalid_argument("bs_solve: grid mismatch");
  require_same_grid(f, potential.field());
  const Field free = resolvent.apply(f);
  BsSolve out{resolvent.z(), free, ComplexVector(), 0.0, {}, 0, 0, 0.0, 1.0, "free", true, false, false};
  const std::vector<Index>& support = potential.support();
  if (support.empty()) return out;

  const Eigen::VectorXd v = potential.support_values();
  const auto count = static_cast<Index>(support.size());
  const Eigen::MatrixXcd kernel = resolvent.restricted(support) * v.asDiagonal();
  ComplexVector rhs(count);
  for (Index i = 0; i < count; ++i) rhs[i] = free.values()[support[static_cast<std::size_t>(i)]];

  if (count <= options.dense_limit) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(kernel, false);
    out.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(count, count) + kernel;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(system);
    out.sigma_min = svd.singularValues()[count - 1];
  } else {
    ComplexVector x = ComplexVector::Ones(count) / std::sqrt(static_cast<double>(count));
    for (int it = 0; it < 60; ++it) {
      const ComplexVector y = kernel * x;
      out.spectral_radius = y.norm();
      if (out.spectral_radius == 0.0) break;
      x = y / out.spectral_radius;
    }
    out.sigma_min = std::numeric_limits<double>::quiet_NaN();
  }
  out.near_singular = out.sigma_min < options.singular_threshold;

  const double rhs_norm = rhs.norm();
  ComplexVector x;
  if (out.spectral_radius < options.neumann_threshold) {
    out.method = "neumann";
    x = rhs;
    out.predicted_iterations =
        out.spectral_radius > 0.0
            ? static_cast<int>(std::ceil(std::log(options.tolerance) / std::log(out.spectral_radius)))
            : 1;
    out.converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      const ComplexVector next = rhs - kernel * x;
      const double change = (next - x).norm() / std::max(rhs_norm, 1e-300);
      x = next;
      ++out.iterations;
      out.residual_history.push_back(change);
      if (change <= options.tolerance) {
        out.converged = true;
        break;
      }
    }
  } else {
    out.method = "gmres";
    const GmresResult g = gmres([&](const ComplexVector& y) -> ComplexVector { return y + kernel * y; }, rhs,
                                options.tolerance, options.restart, options.max_iterations);
    x = g.x;
    out.iterations = g.iterations;
    out.residual_history = g.history;
    out.converged = g.converged;
  }
  out.residual = rhs_norm > 0.0 ? (x + kernel * x - rhs).norm() / rhs_norm : (x + kernel * x).norm();
  out.flagged = !out.converged || out.near_singular || !(out.residual <= std::max(options.tolerance, 1e-14) * 10.0);

  const ComplexVector weighted = v.cast<Complex>().cwiseProduct(x);
  out.u = free - resolvent.apply_sparse(support, weighted);
  out.support_solution = std::move(x);
  return out;
}

double hamiltonian_residual(const Field& u, const Field& f, const Potential& potential, Complex z, int m) {
  require_same_grid(u, f);
  const Symbol shifted = Symbol::radial([m, z](double rho) { return std::pow(rho * rho, m) - z; }, "P-z");
  const Field lhs = apply_symbol(shifted, u) + potential.apply(u);
  const double scale = l2_norm(f);
  const double diff = l2_norm(lhs - f);
  return scale > 0.0 ? diff / scale : diff;
}

std::vector<double> rellich_averages(const Field& u, const std::vector<double>& radii) {
  const GridSpec& g = u.grid();
  std::vector<double> out;
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("rellich_averages: radii must be positive");
    double acc = 0.0;
    for (Index k = 0; k < g.size(); ++k)
      if (g.node(k).squaredNorm() <= r * r) acc += std::norm(u.values()[k]);
    out.push_back(acc * g.cell_volume() / r);
  }
  return out;
}

}  // namespace lap
