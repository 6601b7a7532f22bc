#pragma once

/// \file grid.hpp
/// Dyadic grids restricted to a bounded window, dyadic cubes with exact
/// integer coordinates, step functions on the finest cells and weighted norms.

#include <cstdint>
#include <compare>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dyadic {

using Vector = Eigen::VectorXd;
using Coords = std::vector<std::int64_t>;

/// Raised when an operation is called outside its documented domain
/// (level underflow, cube outside the window, grid mismatch, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dyadic cube: side 2^level, lower corner shift + 2^level * coords.
/// Coordinates are relative to the grid shift, so containment and equality
/// are pure integer arithmetic.
struct DyadicCube {
  int level = 0;
  Coords coords;

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
  friend auto operator<=>(const DyadicCube&, const DyadicCube&) = default;

  DyadicCube parent() const;
  /// True iff this cube contains (or equals) `other`.
  bool contains(const DyadicCube& other) const;
  bool intersects(const DyadicCube& other) const {
    return contains(other) || other.contains(*this);
  }
  std::string to_string() const;
};

/// The translated standard dyadic grid shift + D, restricted to the window
/// cube of side 2^top_level whose lower corner is the shift. Finest cells
/// have side 2^finest_level.
class DyadicGrid {
 public:
  DyadicGrid(int dim, int top_level, int finest_level,
             std::vector<double> shift = {});

  int dim() const { return dim_; }
  int top_level() const { return top_; }
  int finest_level() const { return finest_; }
  int depth() const { return top_ - finest_; }
  const std::vector<double>& shift() const { return shift_; }

  std::int64_t cells_per_side(int level) const;
  std::int64_t cube_count(int level) const;
  std::int64_t cell_count() const { return cube_count(finest_); }
  double cube_measure(int level) const;
  double cell_measure() const { return cube_measure(finest_); }
  double side(int level) const;

  DyadicCube top_cube() const;
  bool in_window(const DyadicCube& q) const;
  /// Window cubes and ancestors of the window top cube.
  bool admissible(const DyadicCube& q) const;

  /// Linear index of a window cube among the cubes of its level.
  std::int64_t index_of(const DyadicCube& q) const;
  DyadicCube cube(int level, std::int64_t index) const;
  std::vector<DyadicCube> cubes(int level) const;
  /// Every window cube, coarsest level first.
  std::vector<DyadicCube> all_cubes() const;

  /// Lower corner coordinate of `q` along `axis`.
  double lower(const DyadicCube& q, int axis) const;
  /// Finest cell containing the point, or -1 if the point is outside.
  std::int64_t cell_at(std::span<const double> point) const;
  /// Cell-midpoint coordinates of a finest cell.
  std::vector<double> cell_center(std::int64_t cell) const;

  /// Finest-cell linear indices covered by a window cube.
  std::vector<std::int64_t> cells_of(const DyadicCube& q) const;

  friend bool operator==(const DyadicGrid&, const DyadicGrid&) = default;

 private:
  int dim_;
  int top_;
  int finest_;
  std::vector<double> shift_;
};

/// descendants(Q, m): the 2^{m n} subcubes of side 2^{level-m}.
std::vector<DyadicCube> descendants(const DyadicGrid& grid, const DyadicCube& q,
                                    int generations);
/// ancestors(R, j): [R, R_1, ..., R_j] with side(R_k) = 2^k side(R).
std::vector<DyadicCube> ancestors(const DyadicGrid& grid, const DyadicCube& r,
                                  int generations);

/// Real-valued function, constant on each finest cell of the window and zero
/// outside it.
class StepFunction {
 public:
  explicit StepFunction(DyadicGrid grid);
  StepFunction(DyadicGrid grid, Vector values);

  static StepFunction constant(const DyadicGrid& grid, double value);
  static StepFunction indicator(const DyadicGrid& grid, const DyadicCube& q);
  /// Cell-averaged indicator of the box [lo, hi); exact whenever the box
  /// edges fall on cell boundaries.
  static StepFunction box(const DyadicGrid& grid, std::span<const double> lo,
                          std::span<const double> hi);
  static StepFunction interval(const DyadicGrid& grid, double lo, double hi) {
    return box(grid, std::span<const double>(&lo, 1),
               std::span<const double>(&hi, 1));
  }

  const DyadicGrid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  std::int64_t size() const { return values_.size(); }
  double operator[](std::int64_t cell) const { return values_[cell]; }
  void set(std::int64_t cell, double value);

  StepFunction abs() const;
  StepFunction operator-() const;
  StepFunction& operator+=(const StepFunction& other);
  StepFunction& operator-=(const StepFunction& other);
  StepFunction& operator*=(double s);

  friend StepFunction operator+(StepFunction a, const StepFunction& b) { return a += b; }
  friend StepFunction operator-(StepFunction a, const StepFunction& b) { return a -= b; }
  friend StepFunction operator*(StepFunction a, double s) { return a *= s; }
  friend StepFunction operator*(double s, StepFunction a) { return a *= s; }
  /// Pointwise product.
  friend StepFunction operator*(const StepFunction& a, const StepFunction& b);

  /// Restriction f * chi_Q.
  StepFunction restricted(const DyadicCube& q) const;
  bool nonnegative() const { return (values_.array() >= 0.0).all(); }

 private:
  DyadicGrid grid_;
  Vector values_;
};

/// Outcome of a structural check: empty list of violations means valid.
struct ValidationReport {
  std::vector<std::string> violations;
  bool valid() const { return violations.empty(); }
  explicit operator bool() const { return valid(); }
};

void require_same_grid(const StepFunction& a, const StepFunction& b,
                       const char* what);

/// A non-negative step function.
class Weight {
 public:
  explicit Weight(StepFunction w);
  static Weight lebesgue(const DyadicGrid& grid) {
    return Weight(StepFunction::constant(grid, 1.0));
  }
  const StepFunction& function() const { return w_; }
  const DyadicGrid& grid() const { return w_.grid(); }
  double operator[](std::int64_t cell) const { return w_[cell]; }
  bool is_zero() const { return (w_.values().array() == 0.0).all(); }

 private:
  StepFunction w_;
};

/// Exponents 1 < p < q < infinity.
class ExponentPair {
 public:
  ExponentPair(double p, double q);
  double p() const { return p_; }
  double q() const { return q_; }
  double p_dual() const { return p_ / (p_ - 1.0); }
  double q_dual() const { return q_ / (q_ - 1.0); }

 private:
  double p_;
  double q_;
};

/// (p', q').
std::pair<double, double> dual_exponents(const ExponentPair& e);
/// Exponents of the dual inequality L^{q'} -> L^{p'}, i.e. (q', p').
ExponentPair dual_pair(const ExponentPair& e);

/// Target weight u, dual source weight sigma = v^{1-p'}, and exponents.
/// Regions where v is infinite are encoded as sigma = 0.
struct WeightPair {
  Weight u;
  Weight sigma;
  ExponentPair exponents;
};

/// Integrals of a step function over every window cube, one vector per level
/// (index 0 is the finest level).
class CubeSums {
 public:
  explicit CubeSums(const StepFunction& f);

  const DyadicGrid& grid() const { return grid_; }
  const Vector& level(int level) const;
  double integral(const DyadicCube& q) const;
  double average(const DyadicCube& q) const;

 private:
  DyadicGrid grid_;
  std::vector<Vector> sums_;
};

/// Parent index at level+1 of every cube index at `level`.
std::vector<std::int64_t> parent_map(const DyadicGrid& grid, int level);

double integral(const StepFunction& f);
double integral(const StepFunction& f, const Weight& w);
/// |Q|^{-1} times the integral of f over Q; Q may be an ancestor of the window.
double average(const StepFunction& f, const DyadicCube& q);
double lp_norm(const StepFunction& f, const Weight& w, double p);
/// sup over lambda of lambda * u(|g| > lambda)^{1/q}.
double weak_lq_norm(const StepFunction& g, const Weight& u, double q);

}  // namespace dyadic
