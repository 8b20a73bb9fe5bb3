#pragma once

#include "lap/lattice.hpp"
#include "lap/spaces.hpp"
#include "lap/test_family.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lap {

enum class PotentialClass { weak_lorentz, bounded_compact, custom };
std::string to_string(PotentialClass c);

// Real, finite multiplication operator on a grid.
class Potential {
 public:
  Potential(Field values, PotentialClass kind, std::optional<double> exponent = std::nullopt, std::string name = "");

  static Potential zero(const GridSpec& grid);

  const Field& field() const { return values_; }
  const GridSpec& grid() const { return values_.grid(); }
  PotentialClass kind() const { return kind_; }
  std::optional<double> exponent() const { return exponent_; }
  const std::string& name() const { return name_; }
  double support_radius() const { return support_radius_; }
  double sup_norm() const;
  // Flat indices with V != 0, ascending.
  const std::vector<Index>& support() const { return support_; }
  Eigen::VectorXd support_values() const;

  Field apply(const Field& f) const;

 private:
  Field values_;
  PotentialClass kind_;
  std::optional<double> exponent_;
  std::string name_;
  std::vector<Index> support_;
  double support_radius_ = 0.0;
};

// Admissible Lorentz exponents q for L^{q,inf} potentials: [q_m, (d+1)/2] with q_m = d/(2m) when d > 2m,
// otherwise the lower end is open at 1.
struct ExponentRange {
  double lower = 1.0;
  bool lower_inclusive = true;
  double upper = 1.0;
  bool contains(double q) const;
};
ExponentRange admissible_exponents(int m, int d);

// -depth on the closed ball of the given radius.
Potential square_well(const GridSpec& grid, double depth, double radius);

// Sum_{j <= terms} j^(-1/q) 1_{E_j} with disjoint concentric shells E_j of measure 1/ln(1+j), ordered outward.
Potential example_potential(double q, int terms, const GridSpec& grid);

// Grid measure of each shell of example_potential and its relative deviation from 1/ln(1+j).
struct ShellMeasure {
  int index = 0;
  double target = 0.0;
  double measure = 0.0;
  double relative_error = 0.0;
};
std::vector<ShellMeasure> example_shell_measures(double q, int terms, const GridSpec& grid);

// Weak L^q norm of sum_{first <= j <= last} j^(-1/q) 1_{E_j}, computed exactly from the plateaus.
double example_tail_norm(double q, int first, int last);
// sup over lambda in (0, N^(-1/q)] of lambda floor(lambda^-q)^(1/q) / ln(2+N)^(1/q).
double example_tail_bound(double q, int first);

struct SmallnessRow {
  double order = 0.0;   // N
  double gamma = 1.0;
  double epsilon = 0.0;
  double constant = 0.0;  // A
  double radius = 0.0;    // R
  bool satisfiable = false;
  // max over the family of ||mu V u||_X / ||mu u||_X*: the epsilon that needs no local term.
  double pure_ratio = 0.0;
};

struct AdmissibilityConfig {
  int m = 1;
  std::vector<double> orders{0.0, 1.0};
  std::vector<double> gammas{1.0, 0.1};
  std::vector<double> epsilons{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0};
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  double constant_cap = 100.0;
  double lambda_ref = 1.0;
};

struct AdmissibilityReport {
  double symmetry_defect = 0.0;
  bool symmetric = false;
  std::string factorization;  // descriptor of (A_1, B_1)
  double factorization_defect = 0.0;
  bool factorization_holds = false;
  std::vector<SmallnessRow> smallness;  // for each (N, gamma): the smallest epsilon with A <= cap
  bool smallness_holds = false;
  std::optional<bool> exponent_admissible;
  std::vector<std::string> family;  // tested fields
};

AdmissibilityReport admissibility_check(const Potential& potential, const std::vector<NamedField>& family,
                                        const AdmissibilityConfig& config);

}  // namespace lap
