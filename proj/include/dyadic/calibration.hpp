#pragma once

/// \file calibration.hpp
/// Empirical constants frozen from a run of tools/calibrate (see README.md).
/// Each value is the largest ratio the calibration search found, times a
/// safety margin. Calibration seeds are disjoint from the seeds used by the
/// experiments and the acceptance suite.

namespace dyadic::calibration {

inline constexpr double kMargin = 1.5;

/// sup_x |T f|(x) / A|f|(x) with A the stopping family of |f| (factor 2),
/// over H^d and random shifts of complexity <= 3 on windows of <= 64 cells.
inline constexpr double kSparseDomination = 11.95;
// raw 7.965177 (hill climbing, 64 cells, seed 20240601)

/// strong norm estimate / max(C1, C2) for T_alpha at p = 2, q = 3.
inline constexpr double kStrongTesting = 2.19;
// raw 1.455780

/// weak norm estimate / C2 for T_alpha at p = 2, q = 3.
inline constexpr double kWeakTesting = 1.91;
// raw 1.267812

}  // namespace dyadic::calibration
