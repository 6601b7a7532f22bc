#pragma once

/// \file normest.hpp
/// Certified lower bounds for two-weight operator norms L^p(v) -> L^q(u) and
/// L^p(v) -> L^{q,infinity}(u), and testing-versus-norm reports.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dyadic/grid.hpp"
#include "dyadic/sparse.hpp"

namespace dyadic {

enum class NormMode { Strong, Weak };
enum class StepRule { Fixed, Backtracking };

/// A linear operator on step functions of one grid. `positive` operators map
/// non-negative functions to non-negative functions, which lets the search
/// restrict itself to non-negative test functions.
struct LinearOperator {
  std::function<StepFunction(const StepFunction&)> apply;
  bool positive = false;
};

struct AscentConfig {
  int restarts = 8;
  int max_iterations = 200;
  StepRule step_rule = StepRule::Backtracking;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  double step = 0.5;
  /// Random perturbations tried per iteration by the weak-norm direct search.
  int probes = 4;
};

struct NormEstimate {
  /// Achieved ratio of the witness; a lower bound for the operator norm.
  double value = 0.0;
  /// Test function f = sigma * h.
  StepFunction witness;
  /// The density h; the source norm is (int |h|^p sigma)^{1/p}.
  StepFunction density;
  std::int64_t trials = 0;
  bool converged = false;
  NormMode mode = NormMode::Strong;
};

/// Matrix of the operator on the finest-cell indicator basis.
Eigen::MatrixXd operator_matrix(const LinearOperator& op, const DyadicGrid& grid);

/// ||op(sigma h)||_{target} / ||h||_{L^p(sigma)}, with target L^q(u) or
/// L^{q,infinity}(u). Zero when the source norm vanishes.
double norm_ratio(const LinearOperator& op, const WeightPair& pair, NormMode mode,
                  const StepFunction& density);

/// Multi-restart search over sigma-form test functions. Every restart follows
/// a normalized gradient ascent of the strong ratio (with the Boyd power step
/// as an extra candidate) next to a direct search of the weak ratio; both
/// objectives are recorded at every candidate, so for one configuration the
/// weak value never exceeds the strong value.
NormEstimate norm_estimate(const LinearOperator& op, const WeightPair& pair, NormMode mode,
                           const AscentConfig& cfg);

/// T_alpha as a positive linear operator.
LinearOperator talpha_operator(const CoefficientMap& alpha);

struct TestingReportRow {
  std::string instance;
  double c1 = 0.0;
  double c2 = 0.0;
  double strong = 0.0;
  double weak = 0.0;
  /// strong / max(c1, c2).
  double strong_ratio = 0.0;
  /// weak / c2.
  double weak_ratio = 0.0;
  std::uint64_t seed = 0;
  /// Set when a testing constant is infinite.
  bool flagged = false;
};

TestingReportRow testing_vs_norm_report(const CoefficientMap& alpha, const WeightPair& pair,
                                        const AscentConfig& cfg, std::string instance = {});

/// Report rows as CSV with header
/// instance,c1,c2,strong,weak,strong_ratio,weak_ratio,seed,flagged.
std::string rows_to_csv(std::span<const TestingReportRow> rows);
/// The same rows as a JSON array of objects with the CSV column names as keys.
std::string rows_to_json(std::span<const TestingReportRow> rows);

}  // namespace dyadic
