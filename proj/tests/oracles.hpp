#pragma once

// Brute-force reference implementations. They work directly from cell
// coordinates and explicit function vectors and share no code paths with
// the library beyond the grid geometry accessors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/sparse.hpp"

namespace oracle {

using dyadic::DyadicCube;
using dyadic::DyadicGrid;
using dyadic::StepFunction;
using dyadic::Vector;
using dyadic::Weight;

inline std::vector<std::int64_t> cell_coords(const DyadicGrid& g, std::int64_t cell) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(g.dim()));
  const std::int64_t side = std::int64_t{1} << g.depth();
  for (int a = 0; a < g.dim(); ++a) {
    c[static_cast<std::size_t>(a)] = cell % side;
    cell /= side;
  }
  return c;
}

// Cells of the window cube at `level` with window-relative coords `q`.
inline bool cell_in(const DyadicGrid& g, std::int64_t cell, int level, const std::vector<std::int64_t>& q) {
  const auto c = cell_coords(g, cell);
  const int shift = level - g.finest_level();
  for (std::size_t a = 0; a < c.size(); ++a)
    if ((c[a] >> shift) != q[a]) return false;
  return true;
}

inline Vector indicator(const DyadicGrid& g, int level, const std::vector<std::int64_t>& q) {
  Vector v = Vector::Zero(g.cell_count());
  for (std::int64_t c = 0; c < g.cell_count(); ++c)
    if (cell_in(g, c, level, q)) v[c] = 1.0;
  return v;
}

// Every window cube as (level, coords).
inline std::vector<DyadicCube> all_cubes(const DyadicGrid& g) {
  std::vector<DyadicCube> out;
  for (int level = g.finest_level(); level <= g.top_level(); ++level) {
    const std::int64_t per_side = std::int64_t{1} << (g.top_level() - level);
    std::int64_t total = 1;
    for (int a = 0; a < g.dim(); ++a) total *= per_side;
    for (std::int64_t i = 0; i < total; ++i) {
      DyadicCube q{level, {}};
      std::int64_t rest = i;
      for (int a = 0; a < g.dim(); ++a) {
        q.coords.push_back(rest % per_side);
        rest /= per_side;
      }
      out.push_back(q);
    }
  }
  return out;
}

inline double cube_average(const StepFunction& f, const DyadicCube& q, bool absolute = false) {
  const DyadicGrid& g = f.grid();
  double sum = 0.0;
  for (std::int64_t c = 0; c < g.cell_count(); ++c)
    if (cell_in(g, c, q.level, q.coords)) sum += (absolute ? std::abs(f[c]) : f[c]) * g.cell_measure();
  return sum / std::pow(2.0, q.level * g.dim());
}

inline Vector dyadic_maximal(const StepFunction& f) {
  const DyadicGrid& g = f.grid();
  Vector out = Vector::Zero(g.cell_count());
  for (const auto& q : all_cubes(g)) {
    const double avg = cube_average(f, q, true);
    for (std::int64_t c = 0; c < g.cell_count(); ++c)
      if (cell_in(g, c, q.level, q.coords)) out[c] = std::max(out[c], avg);
  }
  return out;
}

// sup over lambda of lambda * u({|g| > lambda})^{1/q}, sweeping lambda just
// below each distinct value.
inline double weak_norm(const StepFunction& g, const Weight& u, double q) {
  double best = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const double t = std::abs(g[i]);
    double mass = 0.0;
    for (std::int64_t j = 0; j < g.size(); ++j)
      if (std::abs(g[j]) >= t) mass += u[j] * g.grid().cell_measure();
    best = std::max(best, t * std::pow(mass, 1.0 / q));
  }
  return best;
}

inline double lp_norm(const StepFunction& f, const Weight& w, double p) {
  double s = 0.0;
  for (std::int64_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * w[i] * f.grid().cell_measure();
  return std::pow(s, 1.0 / p);
}

// Exact 1-D Hardy-Littlewood maximal function at x by enumerating every
// interval [a, b] with endpoints among the cell boundaries and x.
inline double hl_maximal_1d(const StepFunction& f, double x) {
  const DyadicGrid& g = f.grid();
  const double h = g.cell_measure();
  const double left = g.shift()[0];
  std::vector<double> pts;
  for (std::int64_t i = 0; i <= g.cell_count(); ++i) pts.push_back(left + h * static_cast<double>(i));
  pts.push_back(x);
  auto integral = [&](double a, double b) {
    double s = 0.0;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      const double lo = std::max(a, left + h * static_cast<double>(i));
      const double hi = std::min(b, left + h * static_cast<double>(i + 1));
      if (hi > lo) s += std::abs(f[i]) * (hi - lo);
    }
    return s;
  };
  double best = 0.0;
  for (double a : pts)
    for (double b : pts)
      if (a <= x && x <= b && b > a) best = std::max(best, integral(a, b) / (b - a));
  // Degenerate intervals shrinking to x inside a cell give |f(x)|.
  const std::int64_t cell = static_cast<std::int64_t>(std::floor((x - left) / h));
  if (cell >= 0 && cell < g.cell_count() && x > left + h * static_cast<double>(cell))
    best = std::max(best, std::abs(f[cell]));
  return best;
}

// H^d from explicit Haar vectors h_I = |I|^{-1/2}(chi_{I-} - chi_{I+}).
inline Vector dyadic_hilbert(const StepFunction& f) {
  const DyadicGrid& g = f.grid();
  Vector out = Vector::Zero(g.cell_count());
  auto haar = [&](int level, std::int64_t j) {
    Vector v = indicator(g, level - 1, {2 * j}) - indicator(g, level - 1, {2 * j + 1});
    return Vector(v / std::sqrt(std::ldexp(1.0, level)));
  };
  for (int level = g.finest_level() + 2; level <= g.top_level(); ++level) {
    for (std::int64_t j = 0; j < (std::int64_t{1} << (g.top_level() - level)); ++j) {
      const double coef = haar(level, j).dot(f.values()) * g.cell_measure();
      out += coef * (haar(level - 1, 2 * j) - haar(level - 1, 2 * j + 1));
    }
  }
  return out;
}

// T_alpha f by summing alpha_Q f_Q chi_Q over explicit indicator vectors.
inline Vector talpha(const dyadic::CoefficientMap& alpha, const StepFunction& f) {
  Vector out = Vector::Zero(f.size());
  for (const auto& [q, a] : alpha.entries())
    out += a * cube_average(f, q) * indicator(f.grid(), q.level, q.coords);
  return out;
}

// sup over truncation radii of |int_{eps<|x-y|<eps'} f(y)/(x-y) dy| (n = 1),
// with eps, eps' ranging over every distance from x to a cell boundary.
inline double czo_star_at(const StepFunction& f, double x) {
  const DyadicGrid& g = f.grid();
  const double h = g.cell_measure();
  const double left = g.shift()[0];
  std::vector<double> radii{0.0};
  for (std::int64_t i = 0; i <= g.cell_count(); ++i) radii.push_back(std::abs(x - (left + h * static_cast<double>(i))));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  // int over y in [a, b] of 1/(x - y) = ln|x - a| - ln|x - b| for x outside (a, b).
  auto piece = [&](double a, double b) { return std::log(std::abs(x - a)) - std::log(std::abs(x - b)); };
  auto truncated = [&](double e0, double e1) {
    double s = 0.0;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
      const double a = left + h * static_cast<double>(i), b = a + h;
      // right side: y in [x + e0, x + e1]; left side: y in [x - e1, x - e0].
      double lo = std::max(a, x + e0), hi = std::min(b, x + e1);
      if (hi > lo) s += f[i] * piece(lo, hi);
      lo = std::max(a, x - e1);
      hi = std::min(b, x - e0);
      if (hi > lo) s += f[i] * piece(lo, hi);
    }
    return s;
  };
  double best = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t j = i + 1; j < radii.size(); ++j) {
      if (radii[i] == 0.0) continue;
      best = std::max(best, std::abs(truncated(radii[i], radii[j])));
    }
  return best;
}

// sum over family cubes Q containing r of <f chi_r>_Q chi_Q.
inline Vector sparse_outer(const dyadic::SparseFamily& family, const DyadicCube& r, const StepFunction& f) {
  const DyadicGrid& g = f.grid();
  Vector fr = Vector::Zero(f.size());
  for (std::int64_t c = 0; c < g.cell_count(); ++c)
    if (cell_in(g, c, r.level, r.coords)) fr[c] = f[c];
  const StepFunction restricted(g, fr);
  Vector out = Vector::Zero(f.size());
  for (const auto& gen : family.generations)
    for (const auto& q : gen)
      if (q.contains(r)) out += cube_average(restricted, q) * indicator(g, q.level, q.coords);
  return out;
}

// sup over cells of a / b; a positive value over zero is infinite.
inline double sup_ratio(const Vector& a, const Vector& b) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (b[i] == 0.0) return std::numeric_limits<double>::infinity();
    best = std::max(best, std::abs(a[i]) / b[i]);
  }
  return best;
}

// (sup forward, sup dual) testing constants of T_alpha, from explicit sums
// over the cubes containing each R.
inline std::pair<double, double> lsu_constants(const dyadic::CoefficientMap& alpha, const dyadic::WeightPair& pair) {
  const DyadicGrid& g = alpha.grid();
  const double h = g.cell_measure();
  auto side = [&](const Weight& src, const Weight& tgt, double e, double den_e, const DyadicCube& r) {
    Vector s = Vector::Zero(g.cell_count());
    for (std::int64_t c = 0; c < g.cell_count(); ++c)
      if (cell_in(g, c, r.level, r.coords)) s[c] = src[c];
    const StepFunction sr(g, s);
    Vector t = Vector::Zero(g.cell_count());
    for (const auto& [q, a] : alpha.entries())
      if (q.contains(r)) t += a * cube_average(sr, q) * indicator(g, q.level, q.coords);
    double num = 0.0;
    for (std::int64_t c = 0; c < g.cell_count(); ++c) num += std::pow(t[c], e) * tgt[c] * h;
    if (num <= 0.0) return 0.0;
    const double den = s.sum() * h;
    if (den <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(num, 1.0 / e) / std::pow(den, 1.0 / den_e);
  };
  const auto& x = pair.exponents;
  double c1 = 0.0, c2 = 0.0;
  for (const auto& r : all_cubes(g)) {
    c1 = std::max(c1, side(pair.sigma, pair.u, x.q(), x.p(), r));
    c2 = std::max(c2, side(pair.u, pair.sigma, x.p_dual(), x.q_dual(), r));
  }
  return {c1, c2};
}

}  // namespace oracle
