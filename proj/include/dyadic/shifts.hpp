#pragma once

/// \file shifts.hpp
/// Generalized Haar functions and Haar shift operators of complexity (m, k),
/// their truncations, the dyadic Hilbert transform and the truncated maximal
/// operator of the one-dimensional Hilbert kernel 1/(x - y).
///
/// Every sum over the dyadic grid is restricted to cubes of the window.

#include <cstdint>
#include <vector>

#include "dyadic/grid.hpp"

namespace dyadic {

/// Function supported on `cube`, given by one value per subcube of
/// descendants(cube, depth) (in that order).
struct HaarFunction {
  DyadicCube cube;
  int depth = 0;
  Vector values;

  StepFunction to_step(const DyadicGrid& grid) const;
};

/// Checks support, constancy on the children of the cube and sup-norm <= 1.
ValidationReport haar_validate(const DyadicGrid& grid, const HaarFunction& g);
ValidationReport haar_validate(const StepFunction& g, const DyadicCube& q);

/// One (Q, Q', Q'') term: `input` lives on Q' in D_m(Q), `output` on Q'' in
/// D_k(Q).
struct ShiftTerm {
  DyadicCube cube;
  HaarFunction input;
  HaarFunction output;
};

/// scale * sum_Q sum_{Q',Q''} <f, input> / |Q| * output. Pairs without a
/// stored term contribute zero.
struct HaarShiftSpec {
  DyadicGrid grid;
  int m = 0;
  int k = 0;
  double scale = 1.0;
  std::vector<ShiftTerm> terms;

  int complexity() const { return m > k ? m : k; }
};

ValidationReport shift_validate(const HaarShiftSpec& spec);

/// Levels ell(Q) with lo_level <= level <= hi_level.
struct TruncationWindow {
  int lo_level;
  int hi_level;
};

StepFunction shift_apply(const HaarShiftSpec& spec, const StepFunction& f);
/// Contribution of every cube level, index 0 being the finest level.
std::vector<StepFunction> shift_level_parts(const HaarShiftSpec& spec, const StepFunction& f);
StepFunction shift_partial(const HaarShiftSpec& spec, const StepFunction& f,
                           const TruncationWindow& window);
/// Pointwise sup over all truncation windows of |partial sum|.
StepFunction shift_truncated(const HaarShiftSpec& spec, const StepFunction& f);

/// H^d f = sum_I <f, h_I> (h_{I-} - h_{I+}) with h_I = |I|^{-1/2}(chi_{I-} - chi_{I+}),
/// over window intervals I whose grandchildren are finest cells or coarser.
StepFunction dyadic_hilbert(const StepFunction& f);

struct HilbertShift {
  HaarShiftSpec spec;
  /// gamma * shift_apply(spec, f) == dyadic_hilbert(f).
  double gamma;
};

/// H^d as a shift of complexity type (0, 1) with unit sup-norm Haar functions;
/// the normalization factor sqrt(2) is returned separately.
HilbertShift hilbert_as_shift(const DyadicGrid& grid);

struct RandomShiftOptions {
  bool mean_zero = false;
  /// Probability that a given (Q, Q', Q'') pair is stored.
  double density = 1.0;
};

/// Deterministic in the seed. Haar functions take uniform values in [-1, 1] on
/// the children of their cube.
HaarShiftSpec random_shift(const DyadicGrid& grid, int m, int k, std::uint64_t seed,
                           const RandomShiftOptions& opts = {});

/// Truncated maximal operator of the kernel 1/(x - y) at a point (n = 1).
/// Returns +infinity when f jumps at x, where the truncated integrals diverge.
double czo_star_at(const StepFunction& f, double x);
/// czo_star_at sampled at every finest-cell midpoint.
StepFunction czo_star(const StepFunction& f);

}  // namespace dyadic
