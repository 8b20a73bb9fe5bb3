#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace lap {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Point in R^d, d <= 4, stored inline.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using LatticeIndex = std::array<int, 4>;

inline constexpr double kPi = 3.14159265358979323846;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridSpec {
 public:
  static constexpr std::size_t kDefaultPointBudget = std::size_t{1} << 24;

  GridSpec(int dimension, double half_width, int points_per_axis,
           std::size_t point_budget = kDefaultPointBudget);

  int dimension() const { return dimension_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return points_; }
  Index size() const { return size_; }

  double spacing() const { return 2.0 * half_width_ / points_; }
  double frequency_step() const { return kPi / half_width_; }
  double nyquist() const { return kPi / spacing(); }
  double cell_volume() const;
  double frequency_cell_volume() const;

  double coordinate(int k) const { return (k - points_ / 2) * spacing(); }
  double frequency(int k) const { return (k - points_ / 2) * frequency_step(); }

  LatticeIndex unflatten(Index flat) const;
  Index flatten(const LatticeIndex& idx) const;
  Point node(Index flat) const;
  Point frequency_node(Index flat) const;
  // Squared integer radius sum_a (k_a - n/2)^2 of a node.
  long long centered_square(Index flat) const;
  // Flat index of the node at -x (frequency -xi), where it exists on the lattice.
  Index mirror(Index flat) const;
  bool has_mirror(Index flat) const;

  bool operator==(const GridSpec& other) const = default;

 private:
  int dimension_;
  double half_width_;
  int points_;
  Index size_;
};

enum class Domain { physical, spectral };

class Field {
 public:
  Field(GridSpec grid, ComplexVector values, Domain domain = Domain::physical);

  const GridSpec& grid() const { return grid_; }
  const ComplexVector& values() const { return values_; }
  Domain domain() const { return domain_; }

  Field with_values(ComplexVector values) const { return Field(grid_, std::move(values), domain_); }

 private:
  GridSpec grid_;
  ComplexVector values_;
  Domain domain_;
};

using PointFunction = std::function<Complex(const Point&)>;

Field sample(const PointFunction& fn, const GridSpec& grid);
Field zero_field(const GridSpec& grid, Domain domain = Domain::physical);

Field forward_transform(const Field& f);
Field inverse_transform(const Field& spectrum);

// L^2 inner product h^d sum f conj(g) of two physical fields.
Complex inner(const Field& f, const Field& g);
double l2_norm(const Field& f);

// Largest |f| on the box faces relative to the peak.
double edge_to_peak_ratio(const Field& f);
bool passes_truncation_check(const Field& f, double threshold = 1e-10);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(Complex c, const Field& f);
Field conj(const Field& f);
// Pointwise product of two fields on the same grid.
Field pointwise(const Field& a, const Field& b);

void require_same_grid(const Field& a, const Field& b);

// Visits every node as (flat index, lattice index) in row-major order.
template <typename Visitor>
void for_each_node(const GridSpec& grid, Visitor&& visit) {
  const int d = grid.dimension();
  const int n = grid.points_per_axis();
  LatticeIndex idx{0, 0, 0, 0};
  for (Index flat = 0; flat < grid.size(); ++flat) {
    visit(flat, static_cast<const LatticeIndex&>(idx));
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
  }
}

}  // namespace lap
