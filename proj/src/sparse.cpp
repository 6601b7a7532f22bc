#include "dyadic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dyadic/parallel.hpp"

namespace dyadic {

namespace {

double ratio_of(double numerator, double denominator) {
  if (numerator <= 0.0) return 0.0;
  if (denominator <= 0.0) return std::numeric_limits<double>::infinity();
  return numerator / denominator;
}

double sup_ratio(const Vector& top, const Vector& bottom) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < top.size(); ++i) best = std::max(best, ratio_of(top[i], bottom[i]));
  return best;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace

std::size_t SparseFamily::cube_count() const {
  std::size_t n = 0;
  for (const auto& g : generations) n += g.size();
  return n;
}

CoefficientMap CoefficientMap::indicator(const SparseFamily& family) {
  CoefficientMap out(family.grid);
  for (const auto& generation : family.generations)
    for (const auto& q : generation) out.set(q, 1.0);
  return out;
}

void CoefficientMap::set(const DyadicCube& q, double alpha) {
  if (!grid_.in_window(q))
    throw PreconditionError("CoefficientMap: cube " + q.to_string() + " is outside the window");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw PreconditionError("CoefficientMap: coefficients must be finite and non-negative");
  if (alpha == 0.0) values_.erase(q);
  else values_[q] = alpha;
}

double CoefficientMap::operator()(const DyadicCube& q) const {
  const auto it = values_.find(q);
  return it == values_.end() ? 0.0 : it->second;
}

CoefficientMap CoefficientMap::scaled(double c) const {
  CoefficientMap out(grid_);
  for (const auto& [q, a] : values_) out.set(q, c * a);
  return out;
}

CoefficientMap CoefficientMap::restricted_to_ancestors(const DyadicCube& r) const {
  CoefficientMap out(grid_);
  for (const auto& [q, a] : values_)
    if (q.contains(r)) out.values_[q] = a;
  return out;
}

ValidationReport sparse_validate(const SparseFamily& family) {
  ValidationReport report;
  auto& v = report.violations;
  const DyadicGrid& grid = family.grid;
  std::vector<std::vector<char>> masks;
  for (std::size_t k = 0; k < family.generations.size(); ++k) {
    const auto& gen = family.generations[k];
    const std::string where = "generation " + std::to_string(k) + ": ";
    std::vector<char> mask(static_cast<std::size_t>(grid.cell_count()), 0);
    bool disjoint = true;
    for (const auto& q : gen) {
      if (!grid.in_window(q)) {
        v.push_back(where + "cube " + q.to_string() + " is outside the window");
        return report;
      }
      for (std::int64_t c : grid.cells_of(q)) {
        if (mask[static_cast<std::size_t>(c)]) disjoint = false;
        mask[static_cast<std::size_t>(c)] = 1;
      }
    }
    if (!disjoint) {
      for (std::size_t a = 0; a < gen.size(); ++a)
        for (std::size_t b = a + 1; b < gen.size(); ++b)
          if (gen[a].intersects(gen[b])) {
            v.push_back(where + "cubes " + gen[a].to_string() + " and " + gen[b].to_string() +
                        " overlap");
            a = gen.size();
            break;
          }
    }
    masks.push_back(std::move(mask));
  }
  for (std::size_t k = 0; k + 1 < masks.size(); ++k) {
    const auto& outer = masks[k];
    const auto& inner = masks[k + 1];
    for (std::size_t c = 0; c < inner.size(); ++c) {
      if (inner[c] && !outer[c]) {
        v.push_back("generation " + std::to_string(k + 1) + ": union is not contained in generation " +
                    std::to_string(k));
        break;
      }
    }
    for (const auto& q : family.generations[k]) {
      const auto cells = grid.cells_of(q);
      const auto covered = std::count_if(cells.begin(), cells.end(), [&](std::int64_t c) {
        return inner[static_cast<std::size_t>(c)] != 0;
      });
      if (2 * static_cast<std::size_t>(covered) > cells.size())
        v.push_back("generation " + std::to_string(k) + ": next generation covers more than half of " +
                    q.to_string());
    }
  }
  return report;
}

SparseFamily sparse_from_stopping(const StepFunction& f, const DyadicCube& top, double factor) {
  const DyadicGrid& grid = f.grid();
  if (!f.nonnegative()) throw PreconditionError("sparse_from_stopping: f must be non-negative");
  if (!(factor > 1.0)) throw PreconditionError("sparse_from_stopping: factor must exceed 1");
  if (!grid.in_window(top)) throw PreconditionError("sparse_from_stopping: top cube outside the window");
  const CubeSums sums(f);
  SparseFamily family{grid, {{top}}};
  while (true) {
    std::vector<DyadicCube> next;
    for (const DyadicCube& q : family.generations.back()) {
      const double threshold = factor * sums.average(q);
      std::vector<DyadicCube> stack;
      if (q.level > grid.finest_level()) stack = descendants(grid, q, 1);
      while (!stack.empty()) {
        DyadicCube c = std::move(stack.back());
        stack.pop_back();
        if (sums.average(c) > threshold) {
          next.push_back(std::move(c));
        } else if (c.level > grid.finest_level()) {
          for (auto& child : descendants(grid, c, 1)) stack.push_back(std::move(child));
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    family.generations.push_back(std::move(next));
  }
  if (const auto report = sparse_validate(family); !report)
    throw std::runtime_error("sparse_from_stopping: stopping family is not sparse: " +
                             join(report.violations));
  return family;
}

StepFunction sparse_apply(const SparseFamily& family, const StepFunction& f) {
  if (!(family.grid == f.grid())) throw PreconditionError("sparse_apply: grid mismatch");
  if (const auto report = sparse_validate(family); !report)
    throw PreconditionError("sparse_apply: invalid sparse family: " + join(report.violations));
  const CubeSums sums(f);
  Vector out = Vector::Zero(f.size());
  for (const auto& generation : family.generations) {
    for (const auto& q : generation) {
      const double avg = sums.average(q);
      for (std::int64_t c : f.grid().cells_of(q)) out[c] += avg;
    }
  }
  return StepFunction(f.grid(), std::move(out));
}

StepFunction talpha_apply(const CoefficientMap& alpha, const StepFunction& f) {
  const DyadicGrid& grid = f.grid();
  if (!(alpha.grid() == grid)) throw PreconditionError("talpha_apply: grid mismatch");
  const CubeSums sums(f);
  std::vector<Vector> coef;
  for (int level = grid.finest_level(); level <= grid.top_level(); ++level)
    coef.push_back(Vector::Zero(grid.cube_count(level)));
  for (const auto& [q, a] : alpha.entries())
    coef[static_cast<std::size_t>(q.level - grid.finest_level())][grid.index_of(q)] = a;

  const int top = grid.top_level();
  Vector acc = Vector::Zero(1);
  acc[0] = 0.0 + coef.back()[0] * sums.average(grid.top_cube());
  for (int level = top - 1; level >= grid.finest_level(); --level) {
    const auto parents = parent_map(grid, level);
    const Vector& c = coef[static_cast<std::size_t>(level - grid.finest_level())];
    const Vector& integrals = sums.level(level);
    const double measure = grid.cube_measure(level);
    Vector next(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      next[i] = acc[parents[static_cast<std::size_t>(i)]] + c[i] * (integrals[i] / measure);
    acc = std::move(next);
  }
  return StepFunction(grid, std::move(acc));
}

StepFunction talpha_outer(const CoefficientMap& alpha, const DyadicCube& r, const StepFunction& f) {
  const DyadicGrid& grid = f.grid();
  if (!(alpha.grid() == grid)) throw PreconditionError("talpha_outer: grid mismatch");
  if (!grid.in_window(r)) throw PreconditionError("talpha_outer: R is outside the window");
  const CubeSums sums(f);
  const auto chain = ancestors(grid, r, grid.top_level() - r.level);
  Vector out = Vector::Zero(f.size());
  std::vector<char> done(static_cast<std::size_t>(f.size()), 0);
  // Accumulate from the window cube down so that each cell sums its
  // ancestors coarse to fine, in the same order as talpha_apply.
  std::vector<double> partial(chain.size());
  double acc = 0.0;
  for (std::size_t j = chain.size(); j-- > 0;) {
    acc = acc + alpha(chain[j]) * sums.average(chain[j]);
    partial[j] = acc;
  }
  for (std::size_t j = 0; j < chain.size(); ++j) {
    for (std::int64_t c : grid.cells_of(chain[j])) {
      if (done[static_cast<std::size_t>(c)]) continue;
      done[static_cast<std::size_t>(c)] = 1;
      out[c] = partial[j];
    }
  }
  return StepFunction(grid, std::move(out));
}

double am_bound(int dim) { return 1.0 / (1.0 - std::ldexp(1.0, -dim)); }

double am_ratio(const SparseFamily& family, const DyadicCube& r, const StepFunction& f) {
  if (!f.nonnegative()) throw PreconditionError("am_ratio: f must be non-negative");
  if (const auto report = sparse_validate(family); !report)
    throw PreconditionError("am_ratio: invalid sparse family: " + join(report.violations));
  const StepFunction g = f.restricted(r);
  const StepFunction a = talpha_outer(CoefficientMap::indicator(family), r, g);
  const StepFunction m = dyadic_maximal(g);
  return sup_ratio(a.values(), m.values());
}

double lsu_test(const CoefficientMap& alpha, const WeightPair& pair, const DyadicCube& r,
                SawyerDirection dir) {
  require_same_grid(pair.u.function(), pair.sigma.function(), "lsu_test");
  const bool forward = dir == SawyerDirection::Forward;
  const Weight& source = forward ? pair.sigma : pair.u;
  const Weight& target = forward ? pair.u : pair.sigma;
  const double exponent = forward ? pair.exponents.q() : pair.exponents.p_dual();
  const double den_exponent = forward ? pair.exponents.p() : pair.exponents.q_dual();
  const StepFunction g = source.function().restricted(r);
  const StepFunction t = talpha_outer(alpha, r, g);
  const double num = (t.values().array().pow(exponent) * target.function().values().array()).sum() *
                     t.grid().cell_measure();
  if (num <= 0.0) return 0.0;
  return ratio_of(std::pow(num, 1.0 / exponent), std::pow(integral(g), 1.0 / den_exponent));
}

std::pair<double, double> lsu_constants(const CoefficientMap& alpha, const WeightPair& pair) {
  const auto cubes = alpha.grid().all_cubes();
  std::vector<double> forward(cubes.size()), dual(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    forward[i] = lsu_test(alpha, pair, cubes[i], SawyerDirection::Forward);
    dual[i] = lsu_test(alpha, pair, cubes[i], SawyerDirection::Dual);
  });
  return {*std::max_element(forward.begin(), forward.end()),
          *std::max_element(dual.begin(), dual.end())};
}

double pointwise_domination_constant(const Operator& op, const StepFunction& f,
                                     const SparseFamily& family) {
  const StepFunction bound = sparse_apply(family, f.abs());
  const StepFunction value = op(f).abs();
  return sup_ratio(value.values(), bound.values());
}

}  // namespace dyadic
