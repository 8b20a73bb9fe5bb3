#include "lap/lattice.hpp"

#include "lap/fft.hpp"

#include <cmath>
#include <sstream>

namespace lap {

GridSpec::GridSpec(int dimension, double half_width, int points_per_axis, std::size_t point_budget)
    : dimension_(dimension), half_width_(half_width), points_(points_per_axis), size_(1) {
  if (dimension < 2 || dimension > 4)
    throw std::invalid_argument("grid: dimension must lie in [2, 4]");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("grid: half_width must be positive");
  if (points_per_axis < 16 || points_per_axis % 2 != 0)
    throw std::invalid_argument("grid: points_per_axis must be an even integer >= 16");
  double total = 1.0;
  for (int a = 0; a < dimension; ++a) total *= points_per_axis;
  if (total > static_cast<double>(point_budget)) {
    std::ostringstream msg;
    msg << "grid: " << points_per_axis << "^" << dimension << " points exceed the budget of "
        << point_budget;
    throw std::length_error(msg.str());
  }
  size_ = static_cast<Index>(total);
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dimension_); }

double GridSpec::frequency_cell_volume() const { return std::pow(frequency_step(), dimension_); }

LatticeIndex GridSpec::unflatten(Index flat) const {
  LatticeIndex idx{0, 0, 0, 0};
  for (int a = dimension_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  return idx;
}

Index GridSpec::flatten(const LatticeIndex& idx) const {
  Index flat = 0;
  for (int a = 0; a < dimension_; ++a) flat = flat * points_ + idx[a];
  return flat;
}

Point GridSpec::node(Index flat) const {
  const LatticeIndex idx = unflatten(flat);
  Point x(dimension_);
  for (int a = 0; a < dimension_; ++a) x[a] = coordinate(idx[a]);
  return x;
}

Point GridSpec::frequency_node(Index flat) const {
  const LatticeIndex idx = unflatten(flat);
  Point xi(dimension_);
  for (int a = 0; a < dimension_; ++a) xi[a] = frequency(idx[a]);
  return xi;
}

long long GridSpec::centered_square(Index flat) const {
  const LatticeIndex idx = unflatten(flat);
  long long s = 0;
  for (int a = 0; a < dimension_; ++a) {
    const long long c = idx[a] - points_ / 2;
    s += c * c;
  }
  return s;
}

bool GridSpec::has_mirror(Index flat) const {
  const LatticeIndex idx = unflatten(flat);
  for (int a = 0; a < dimension_; ++a)
    if (idx[a] == 0) return false;
  return true;
}

Index GridSpec::mirror(Index flat) const {
  LatticeIndex idx = unflatten(flat);
  for (int a = 0; a < dimension_; ++a) {
    if (idx[a] == 0) throw std::out_of_range("grid: node at -L has no mirror on the lattice");
    idx[a] = points_ - idx[a];
  }
  return flatten(idx);
}

Field::Field(GridSpec grid, ComplexVector values, Domain domain)
    : grid_(grid), values_(std::move(values)), domain_(domain) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field: value count does not match the grid");
}

Field sample(const PointFunction& fn, const GridSpec& grid) {
  ComplexVector values(grid.size());
  Point x(grid.dimension());
  for_each_node(grid, [&](Index flat, const LatticeIndex& idx) {
    for (int a = 0; a < grid.dimension(); ++a) x[a] = grid.coordinate(idx[a]);
    const Complex v = fn(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "sample: non-finite value at x = (";
      for (int a = 0; a < grid.dimension(); ++a) msg << (a ? ", " : "") << x[a];
      msg << ")";
      throw std::domain_error(msg.str());
    }
    values[flat] = v;
  });
  return Field(grid, std::move(values), Domain::physical);
}

Field zero_field(const GridSpec& grid, Domain domain) {
  return Field(grid, ComplexVector::Zero(grid.size()), domain);
}

namespace {

// (-1)^(sum of lattice indices) applied in place.
void checkerboard(const GridSpec& grid, ComplexVector& v) {
  for_each_node(grid, [&](Index flat, const LatticeIndex& idx) {
    int parity = 0;
    for (int a = 0; a < grid.dimension(); ++a) parity += idx[a];
    if (parity & 1) v[flat] = -v[flat];
  });
}

std::array<int, 4> shape_of(const GridSpec& grid) {
  std::array<int, 4> shape{};
  for (int a = 0; a < grid.dimension(); ++a) shape[a] = grid.points_per_axis();
  return shape;
}

}  // namespace

// With centred indices the +i kernel factorises as
// exp(i xi_k x_j) = (-1)^(n/2) (-1)^k (-1)^j exp(2 pi i kj/n) per axis.
Field forward_transform(const Field& f) {
  if (f.domain() != Domain::physical)
    throw std::invalid_argument("forward_transform: field is not in the physical domain");
  const GridSpec& grid = f.grid();
  ComplexVector v = f.values();
  checkerboard(grid, v);
  const auto shape = shape_of(grid);
  fft::transform(v, std::span<const int>(shape.data(), grid.dimension()), fft::Sign::positive);
  checkerboard(grid, v);
  double scale = grid.cell_volume();
  if ((grid.dimension() * (grid.points_per_axis() / 2)) % 2 != 0) scale = -scale;
  v *= scale;
  return Field(grid, std::move(v), Domain::spectral);
}

Field inverse_transform(const Field& spectrum) {
  if (spectrum.domain() != Domain::spectral)
    throw std::invalid_argument("inverse_transform: field is not in the spectral domain");
  const GridSpec& grid = spectrum.grid();
  ComplexVector v = spectrum.values();
  checkerboard(grid, v);
  const auto shape = shape_of(grid);
  fft::transform(v, std::span<const int>(shape.data(), grid.dimension()), fft::Sign::negative);
  checkerboard(grid, v);
  double scale = grid.frequency_cell_volume() / std::pow(2.0 * kPi, grid.dimension());
  if ((grid.dimension() * (grid.points_per_axis() / 2)) % 2 != 0) scale = -scale;
  v *= scale;
  return Field(grid, std::move(v), Domain::physical);
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
  if (a.domain() != b.domain()) throw std::invalid_argument("fields live in different domains");
}

Complex inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  const double weight = f.domain() == Domain::physical
                            ? f.grid().cell_volume()
                            : f.grid().frequency_cell_volume() /
                                  std::pow(2.0 * kPi, f.grid().dimension());
  return weight * g.values().dot(f.values());
}

double l2_norm(const Field& f) {
  const double weight = f.domain() == Domain::physical
                            ? f.grid().cell_volume()
                            : f.grid().frequency_cell_volume() /
                                  std::pow(2.0 * kPi, f.grid().dimension());
  return std::sqrt(weight) * f.values().norm();
}

double edge_to_peak_ratio(const Field& f) {
  const GridSpec& grid = f.grid();
  const int n = grid.points_per_axis();
  double peak = 0.0, edge = 0.0;
  for_each_node(grid, [&](Index flat, const LatticeIndex& idx) {
    const double a = std::abs(f.values()[flat]);
    peak = std::max(peak, a);
    for (int k = 0; k < grid.dimension(); ++k) {
      if (idx[k] == 0 || idx[k] == n - 1) {
        edge = std::max(edge, a);
        break;
      }
    }
  });
  return peak > 0.0 ? edge / peak : 0.0;
}

bool passes_truncation_check(const Field& f, double threshold) {
  return edge_to_peak_ratio(f) <= threshold;
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return a.with_values(a.values() + b.values());
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return a.with_values(a.values() - b.values());
}

Field operator*(Complex c, const Field& f) { return f.with_values(c * f.values()); }

Field conj(const Field& f) { return f.with_values(f.values().conjugate()); }

Field pointwise(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return a.with_values(a.values().cwiseProduct(b.values()));
}

}  // namespace lap
