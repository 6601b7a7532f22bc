#pragma once

/// \file sparse.hpp
/// Sparse families, the positive dyadic operator, coefficient operators
/// T_alpha with their outer truncations, and the associated testing ratios.

#include <functional>
#include <map>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/maximal.hpp"

namespace dyadic {

/// Generations {Q_j^k}_j of window cubes; Omega_k is the union of generation k.
struct SparseFamily {
  DyadicGrid grid;
  std::vector<std::vector<DyadicCube>> generations;

  std::size_t cube_count() const;
};

/// Non-negative coefficients alpha_Q on window cubes (absent cubes are 0).
class CoefficientMap {
 public:
  explicit CoefficientMap(DyadicGrid grid) : grid_(std::move(grid)) {}

  /// alpha_Q = 1 on the cubes of the family, 0 elsewhere.
  static CoefficientMap indicator(const SparseFamily& family);

  const DyadicGrid& grid() const { return grid_; }
  void set(const DyadicCube& q, double alpha);
  double operator()(const DyadicCube& q) const;
  const std::map<DyadicCube, double>& entries() const { return values_; }
  bool empty() const { return values_.empty(); }

  CoefficientMap scaled(double c) const;
  /// Keeps only the cubes containing r.
  CoefficientMap restricted_to_ancestors(const DyadicCube& r) const;

 private:
  DyadicGrid grid_;
  std::map<DyadicCube, double> values_;
};

/// Pairwise disjoint generations, nested unions, and
/// |Omega_{k+1} cap Q| <= |Q| / 2 for every Q in generation k.
ValidationReport sparse_validate(const SparseFamily& family);

/// Calderon-Zygmund stopping cubes: generation k+1 holds the maximal strict
/// subcubes Q' of each generation-k cube Q with f_{Q'} > factor * f_Q.
/// Throws if the resulting family is not sparse (possible for factor < 2).
SparseFamily sparse_from_stopping(const StepFunction& f, const DyadicCube& top,
                                  double factor = 2.0);

StepFunction sparse_apply(const SparseFamily& family, const StepFunction& f);
StepFunction talpha_apply(const CoefficientMap& alpha, const StepFunction& f);
/// Sum restricted to the window cubes Q containing r.
StepFunction talpha_outer(const CoefficientMap& alpha, const DyadicCube& r,
                          const StepFunction& f);

/// 1 / (1 - 2^{-n}): the geometric-sum bound of A^R(f chi_R) by M_D(f chi_R).
double am_bound(int dim);
/// sup_x A^R(f chi_R)(x) / M_D(f chi_R)(x), with A^R the outer truncation of
/// the family's indicator coefficients.
double am_ratio(const SparseFamily& family, const DyadicCube& r, const StepFunction& f);

/// LSU testing ratio on R. Forward: (int T^R(sigma chi_R)^q u)^{1/q} / sigma(R)^{1/p};
/// Dual: (int T^R(u chi_R)^{p'} sigma)^{1/p'} / u(R)^{1/q'}. Exact sums.
double lsu_test(const CoefficientMap& alpha, const WeightPair& pair, const DyadicCube& r,
                SawyerDirection dir);

/// (sup Forward, sup Dual) of lsu_test over every window cube.
std::pair<double, double> lsu_constants(const CoefficientMap& alpha, const WeightPair& pair);

using Operator = std::function<StepFunction(const StepFunction&)>;

/// sup_x |op f|(x) / A|f|(x), where A is the positive dyadic operator of the family.
double pointwise_domination_constant(const Operator& op, const StepFunction& f,
                                     const SparseFamily& family);

}  // namespace dyadic
