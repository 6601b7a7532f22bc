#pragma once

/// \file maximal.hpp
/// Dyadic and Hardy-Littlewood maximal operators on step functions, and the
/// Sawyer testing quantities of a weight pair.

#include <span>
#include <utility>
#include <vector>

#include "dyadic/grid.hpp"

namespace dyadic {

/// Forward tests against sigma(Q)^{1/p}; Dual against u(Q)^{1/q'}.
enum class SawyerDirection { Forward, Dual };

/// Which maximal operator drives a testing quantity.
enum class MaximalKind { HardyLittlewood, Dyadic };

/// M_D f on the window grid. Exact: ancestors above the window only shrink
/// the averages, so cubes from the finest cell up to the window cube suffice.
StepFunction dyadic_maximal(const StepFunction& f);

/// Exact Hardy-Littlewood maximal function of a one-dimensional step function.
///
/// The average of |f| over [a, b] is linear-fractional in each endpoint, so
/// the supremum over intervals containing x is attained with a and b among
/// the cell boundaries and x itself. The optimal pair lies on the lower convex
/// hull of the cumulative integral to the left of x and on its upper hull to
/// the right, which keeps each evaluation linear in the support size.
class IntervalMaximal {
 public:
  explicit IntervalMaximal(const StepFunction& f);
  double operator()(double x) const;

 private:
  double cumulative(double x) const;

  std::vector<double> breaks_;      // cell boundaries spanning the support of f
  std::vector<double> cumulative_;  // integral of |f| up to each boundary
  std::vector<double> density_;     // |f| on each support cell
};

/// Hardy-Littlewood maximal function at a point. Exact for n = 1. For n >= 2
/// this is the shifted-grid surrogate of shifted_grid_maximal_at.
double hl_maximal_at(const StepFunction& f, std::span<const double> x);
double hl_maximal_at(const StepFunction& f, double x);

/// max over the 2^n one-third-shifted dyadic grids of the dyadic maximal
/// function at x, evaluated with exact box averages. With M' this quantity,
/// M' <= M <= shifted_grid_comparability(n) * M' pointwise.
double shifted_grid_maximal_at(const StepFunction& f, std::span<const double> x);
double shifted_grid_comparability(int dim);

struct SawyerOptions {
  /// Midpoint samples per axis in each finest cell.
  int resolution = 16;
  MaximalKind kind = MaximalKind::HardyLittlewood;
};

/// A testing ratio with a quadrature error estimate (zero when exact).
struct TestingValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Sawyer testing ratio on Q. Forward: (int_Q M(sigma chi_Q)^q u)^{1/q} /
/// sigma(Q)^{1/p}. Dual: (int_Q M(u chi_Q)^{p'} sigma)^{1/p'} / u(Q)^{1/q'}.
/// 0/0 is 0; a positive numerator over a zero denominator is +infinity.
TestingValue sawyer_test(const WeightPair& pair, const DyadicCube& q,
                         SawyerDirection dir, const SawyerOptions& opts = {});

/// (sup Forward, sup Dual) over the cubes.
std::pair<double, double> sawyer_constants(const WeightPair& pair,
                                           std::span<const DyadicCube> cubes,
                                           const SawyerOptions& opts = {});

}  // namespace dyadic
