#include "dyadic/instances.hpp"

#include <algorithm>
#include <cmath>

namespace dyadic {

DyadicCube random_cube(const DyadicGrid& grid, Rng& rng, int min_level, int max_level) {
  min_level = std::max(min_level, grid.finest_level());
  max_level = std::min(max_level, grid.top_level());
  if (min_level > max_level) throw PreconditionError("random_cube: empty level range");
  const int level = rng.integer(min_level, max_level);
  const auto index = static_cast<std::int64_t>(rng.index(static_cast<std::uint64_t>(grid.cube_count(level))));
  return grid.cube(level, index);
}

DyadicCube random_cube(const DyadicGrid& grid, Rng& rng) {
  return random_cube(grid, rng, grid.finest_level(), grid.top_level());
}

StepFunction random_step(const DyadicGrid& grid, Rng& rng, const StepOptions& opts) {
  Vector v = Vector::Zero(grid.cell_count());
  auto amplitude = [&] {
    const double a = std::exp(rng.uniform(-2.0, 3.0));
    return opts.nonnegative || rng.bernoulli(0.5) ? a : -a;
  };
  for (int b = 0; b < opts.bumps; ++b) {
    const DyadicCube q = random_cube(grid, rng);
    const double a = amplitude();
    for (std::int64_t c : grid.cells_of(q)) v[c] += a;
  }
  for (Eigen::Index c = 0; c < v.size(); ++c)
    if (rng.bernoulli(opts.noise)) v[c] += amplitude();
  return StepFunction(grid, std::move(v));
}

Weight random_weight(const DyadicGrid& grid, Rng& rng, int holes) {
  StepFunction w = random_step(grid, rng, {.nonnegative = true, .bumps = 6, .noise = 0.2});
  Vector v = w.values();
  for (int h = 0; h < holes; ++h) {
    const DyadicCube q = random_cube(grid, rng, grid.finest_level(), grid.top_level() - 1);
    for (std::int64_t c : grid.cells_of(q)) v[c] = 0.0;
  }
  if ((v.array() == 0.0).all()) v.setOnes();
  return Weight(StepFunction(grid, std::move(v)));
}

WeightPair random_pair(const DyadicGrid& grid, const ExponentPair& exponents, Rng& rng) {
  Weight u = random_weight(grid, rng);
  Weight sigma = random_weight(grid, rng);
  return WeightPair{std::move(u), std::move(sigma), exponents};
}

CoefficientMap random_coefficients(const DyadicGrid& grid, Rng& rng, double density) {
  CoefficientMap alpha(grid);
  for (const DyadicCube& q : grid.all_cubes())
    if (rng.bernoulli(density)) alpha.set(q, 1.0 - rng.uniform());
  return alpha;
}

}  // namespace dyadic
