#pragma once

/// \file instances.hpp
/// Random instance generators for experiments and tests. All of them draw
/// from a caller-owned Rng, so an instance is a pure function of its seed.

#include "dyadic/grid.hpp"
#include "dyadic/random.hpp"
#include "dyadic/sparse.hpp"

namespace dyadic {

struct StepOptions {
  bool nonnegative = true;
  /// Number of random cube indicators summed.
  int bumps = 8;
  /// Probability that a cell receives an extra independent value.
  double noise = 0.1;
};

/// Uniformly random level in [min_level, max_level] (clamped to the window),
/// then a uniformly random cube of that level.
DyadicCube random_cube(const DyadicGrid& grid, Rng& rng, int min_level, int max_level);
DyadicCube random_cube(const DyadicGrid& grid, Rng& rng);

/// Sum of indicators of random cubes with log-uniform amplitudes in
/// [e^-2, e^3] (random signs unless non-negative), plus sparse cell noise.
StepFunction random_step(const DyadicGrid& grid, Rng& rng, const StepOptions& opts = {});

/// A random step weight vanishing on a few random cubes; never identically 0.
Weight random_weight(const DyadicGrid& grid, Rng& rng, int holes = 2);

WeightPair random_pair(const DyadicGrid& grid, const ExponentPair& exponents, Rng& rng);

/// Each window cube independently receives a coefficient with probability
/// `density`, uniform in (0, 1].
CoefficientMap random_coefficients(const DyadicGrid& grid, Rng& rng, double density = 0.5);

}  // namespace dyadic
