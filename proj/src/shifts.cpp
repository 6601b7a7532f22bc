#include "dyadic/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dyadic/random.hpp"

namespace dyadic {

StepFunction HaarFunction::to_step(const DyadicGrid& grid) const {
  StepFunction out(grid);
  const auto subs = descendants(grid, cube, depth);
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::int64_t c : grid.cells_of(subs[i])) out.set(c, values[static_cast<Eigen::Index>(i)]);
  return out;
}

ValidationReport haar_validate(const DyadicGrid& grid, const HaarFunction& g) {
  ValidationReport report;
  auto& v = report.violations;
  if (!grid.in_window(g.cube)) {
    v.push_back("support: cube " + g.cube.to_string() + " is outside the window");
    return report;
  }
  if (g.depth < 0 || g.cube.level - g.depth < grid.finest_level()) {
    v.push_back("support: depth " + std::to_string(g.depth) + " is not resolvable on the grid");
    return report;
  }
  const auto subs = descendants(grid, g.cube, g.depth);
  if (static_cast<std::size_t>(g.values.size()) != subs.size()) {
    v.push_back("support: expected " + std::to_string(subs.size()) + " values");
    return report;
  }
  if (!g.values.allFinite()) v.push_back("sup-norm: non-finite value");
  if (g.depth >= 2) {
    std::map<Coords, double> child_value;
    bool constant = true;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      Coords child = subs[i].coords;
      for (auto& c : child) c >>= (g.depth - 1);
      const double value = g.values[static_cast<Eigen::Index>(i)];
      auto [it, inserted] = child_value.emplace(std::move(child), value);
      if (!inserted && it->second != value) constant = false;
    }
    if (!constant) v.push_back("constancy: not constant on the children of " + g.cube.to_string());
  }
  if (g.values.size() > 0 && g.values.cwiseAbs().maxCoeff() > 1.0)
    v.push_back("sup-norm: |g| exceeds 1");
  return report;
}

ValidationReport haar_validate(const StepFunction& g, const DyadicCube& q) {
  ValidationReport report;
  auto& v = report.violations;
  const DyadicGrid& grid = g.grid();
  if (!grid.in_window(q)) {
    v.push_back("support: cube " + q.to_string() + " is outside the window");
    return report;
  }
  const auto inside = grid.cells_of(q);
  std::vector<char> in_q(static_cast<std::size_t>(g.size()), 0);
  for (std::int64_t c : inside) in_q[static_cast<std::size_t>(c)] = 1;
  for (std::int64_t c = 0; c < g.size(); ++c) {
    if (!in_q[static_cast<std::size_t>(c)] && g[c] != 0.0) {
      v.push_back("support: nonzero outside " + q.to_string());
      break;
    }
  }
  if (q.level > grid.finest_level()) {
    for (const auto& child : descendants(grid, q, 1)) {
      const auto cells = grid.cells_of(child);
      const double first = g[cells.front()];
      if (std::any_of(cells.begin(), cells.end(), [&](std::int64_t c) { return g[c] != first; })) {
        v.push_back("constancy: not constant on child " + child.to_string());
        break;
      }
    }
  }
  if (g.values().cwiseAbs().maxCoeff() > 1.0) v.push_back("sup-norm: |g| exceeds 1");
  return report;
}

ValidationReport shift_validate(const HaarShiftSpec& spec) {
  ValidationReport report;
  auto& v = report.violations;
  if (spec.m < 0 || spec.k < 0) v.push_back("complexity type must be non-negative");
  if (!std::isfinite(spec.scale)) v.push_back("scale must be finite");
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const ShiftTerm& term = spec.terms[t];
    const std::string where = "term " + std::to_string(t) + ": ";
    if (!spec.grid.in_window(term.cube)) {
      v.push_back(where + "cube outside the window");
      continue;
    }
    if (term.input.cube.level != term.cube.level - spec.m || !term.cube.contains(term.input.cube))
      v.push_back(where + "input cube is not in D_m(Q)");
    if (term.output.cube.level != term.cube.level - spec.k || !term.cube.contains(term.output.cube))
      v.push_back(where + "output cube is not in D_k(Q)");
    for (const auto& msg : haar_validate(spec.grid, term.input).violations)
      v.push_back(where + "input " + msg);
    for (const auto& msg : haar_validate(spec.grid, term.output).violations)
      v.push_back(where + "output " + msg);
  }
  return report;
}

std::vector<StepFunction> shift_level_parts(const HaarShiftSpec& spec, const StepFunction& f) {
  const DyadicGrid& grid = spec.grid;
  if (!(f.grid() == grid)) throw PreconditionError("shift_apply: grid mismatch");
  const CubeSums sums(f);
  std::vector<Vector> parts(static_cast<std::size_t>(grid.depth() + 1),
                            Vector::Zero(grid.cell_count()));
  for (const ShiftTerm& term : spec.terms) {
    const auto in_subs = descendants(grid, term.input.cube, term.input.depth);
    double pairing = 0.0;
    for (std::size_t i = 0; i < in_subs.size(); ++i)
      pairing += term.input.values[static_cast<Eigen::Index>(i)] * sums.integral(in_subs[i]);
    if (pairing == 0.0) continue;
    const double coef = spec.scale * pairing / grid.cube_measure(term.cube.level);
    Vector& part = parts[static_cast<std::size_t>(term.cube.level - grid.finest_level())];
    const auto out_subs = descendants(grid, term.output.cube, term.output.depth);
    for (std::size_t i = 0; i < out_subs.size(); ++i) {
      const double value = coef * term.output.values[static_cast<Eigen::Index>(i)];
      for (std::int64_t c : grid.cells_of(out_subs[i])) part[c] += value;
    }
  }
  std::vector<StepFunction> out;
  out.reserve(parts.size());
  for (auto& p : parts) out.emplace_back(grid, std::move(p));
  return out;
}

StepFunction shift_apply(const HaarShiftSpec& spec, const StepFunction& f) {
  const auto parts = shift_level_parts(spec, f);
  StepFunction out(spec.grid);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += *it;
  return out;
}

StepFunction shift_partial(const HaarShiftSpec& spec, const StepFunction& f,
                           const TruncationWindow& window) {
  const DyadicGrid& grid = spec.grid;
  if (window.lo_level > window.hi_level || window.lo_level < grid.finest_level() ||
      window.hi_level > grid.top_level())
    throw PreconditionError("shift_partial: invalid truncation window");
  // Difference of the prefix sums used by shift_truncated, so that
  // |shift_partial| <= shift_truncated holds exactly in floating point.
  const auto parts = shift_level_parts(spec, f);
  Vector prefix = Vector::Zero(grid.cell_count());
  Vector below = prefix;
  for (int level = grid.finest_level(); level <= window.hi_level; ++level) {
    if (level == window.lo_level) below = prefix;
    prefix += parts[static_cast<std::size_t>(level - grid.finest_level())].values();
  }
  return StepFunction(grid, prefix - below);
}

StepFunction shift_truncated(const HaarShiftSpec& spec, const StepFunction& f) {
  // Partial sums over [lo, hi] are differences of prefix sums, so the
  // supremum of their absolute values is max minus min of the prefix sums.
  const auto parts = shift_level_parts(spec, f);
  Vector prefix = Vector::Zero(spec.grid.cell_count());
  Vector hi = prefix, lo = prefix;
  for (const auto& part : parts) {
    prefix += part.values();
    hi = hi.cwiseMax(prefix);
    lo = lo.cwiseMin(prefix);
  }
  return StepFunction(spec.grid, hi - lo);
}

StepFunction dyadic_hilbert(const StepFunction& f) {
  const DyadicGrid& grid = f.grid();
  if (grid.dim() != 1) throw PreconditionError("dyadic_hilbert: dimension must be 1");
  const CubeSums sums(f);
  Vector out = Vector::Zero(grid.cell_count());
  for (int level = grid.finest_level() + 2; level <= grid.top_level(); ++level) {
    const Vector& halves = sums.level(level - 1);
    const double measure = grid.cube_measure(level);
    const std::int64_t width = std::int64_t{1} << (level - grid.finest_level());
    const std::int64_t quarter = width / 4;
    for (std::int64_t j = 0; j < grid.cube_count(level); ++j) {
      const double coef = (halves[2 * j] - halves[2 * j + 1]) / std::sqrt(measure);
      if (coef == 0.0) continue;
      const double amp = coef / std::sqrt(measure / 2.0);
      const std::int64_t start = j * width;
      out.segment(start, quarter).array() += amp;
      out.segment(start + quarter, quarter).array() -= amp;
      out.segment(start + 2 * quarter, quarter).array() -= amp;
      out.segment(start + 3 * quarter, quarter).array() += amp;
    }
  }
  return StepFunction(grid, std::move(out));
}

HilbertShift hilbert_as_shift(const DyadicGrid& grid) {
  if (grid.dim() != 1) throw PreconditionError("hilbert_as_shift: dimension must be 1");
  HilbertShift out{HaarShiftSpec{grid, 0, 1, 1.0, {}}, std::sqrt(2.0)};
  const Vector down = (Vector(2) << 1.0, -1.0).finished();
  for (int level = grid.top_level(); level >= grid.finest_level() + 2; --level) {
    for (const DyadicCube& interval : grid.cubes(level)) {
      const auto halves = descendants(grid, interval, 1);
      const HaarFunction input{interval, 1, down};
      out.spec.terms.push_back({interval, input, HaarFunction{halves[0], 1, down}});
      out.spec.terms.push_back({interval, input, HaarFunction{halves[1], 1, -down}});
    }
  }
  return out;
}

namespace {

HaarFunction random_haar(const DyadicGrid& grid, const DyadicCube& q, Rng& rng, bool mean_zero) {
  Vector values(std::int64_t{1} << grid.dim());
  for (auto& v : values) v = rng.uniform(-1.0, 1.0);
  if (mean_zero) {
    values.array() -= values.mean();
    const double sup = values.cwiseAbs().maxCoeff();
    if (sup > 1.0) values /= sup;
  }
  return HaarFunction{q, 1, std::move(values)};
}

}  // namespace

HaarShiftSpec random_shift(const DyadicGrid& grid, int m, int k, std::uint64_t seed,
                           const RandomShiftOptions& opts) {
  if (m < 0 || k < 0) throw PreconditionError("random_shift: complexity type must be non-negative");
  const int kappa = std::max(m, k);
  if (grid.finest_level() + kappa + 1 > grid.top_level())
    throw PreconditionError("random_shift: window too shallow for complexity " + std::to_string(kappa));
  Rng rng(seed);
  HaarShiftSpec spec{grid, m, k, 1.0, {}};
  for (int level = grid.top_level(); level >= grid.finest_level() + kappa + 1; --level) {
    for (const DyadicCube& q : grid.cubes(level)) {
      const auto inputs = descendants(grid, q, m);
      const auto outputs = descendants(grid, q, k);
      for (const auto& qi : inputs) {
        for (const auto& qo : outputs) {
          if (opts.density < 1.0 && !rng.bernoulli(opts.density)) continue;
          HaarFunction in = random_haar(grid, qi, rng, opts.mean_zero);
          HaarFunction out = random_haar(grid, qo, rng, opts.mean_zero);
          spec.terms.push_back({q, std::move(in), std::move(out)});
        }
      }
    }
  }
  return spec;
}

double czo_star_at(const StepFunction& f, double x) {
  const DyadicGrid& grid = f.grid();
  if (grid.dim() != 1) throw PreconditionError("czo_star: dimension must be 1");
  const double h = grid.side(grid.finest_level());
  const double t = grid.shift()[0];
  const std::int64_t n = grid.cell_count();
  auto value = [&](double y) {
    const std::int64_t c = grid.cell_at(std::span<const double>(&y, 1));
    return c < 0 ? 0.0 : f[c];
  };
  std::vector<double> left, right;
  for (std::int64_t i = n; i >= 0; --i) {
    const double b = t + h * static_cast<double>(i);
    if (b < x) left.push_back(x - b);
  }
  for (std::int64_t i = 0; i <= n; ++i) {
    const double b = t + h * static_cast<double>(i);
    if (b > x) right.push_back(b - x);
  }
  std::vector<double> radii;
  radii.reserve(left.size() + right.size());
  std::merge(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(radii));
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.empty()) return 0.0;
  if (value(x - radii[0] / 2) != value(x + radii[0] / 2))
    return std::numeric_limits<double>::infinity();
  // On each annulus between consecutive radii f is constant on both sides,
  // so the truncated integral is monotone in the radius there.
  double g = 0.0, g_max = 0.0, g_min = 0.0;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const double mid = 0.5 * (radii[i] + radii[i + 1]);
    const double jump = value(x - mid) - value(x + mid);
    if (jump == 0.0) continue;
    g += jump * std::log(radii[i + 1] / radii[i]);
    g_max = std::max(g_max, g);
    g_min = std::min(g_min, g);
  }
  return g_max - g_min;
}

StepFunction czo_star(const StepFunction& f) {
  const DyadicGrid& grid = f.grid();
  if (grid.dim() != 1) throw PreconditionError("czo_star: dimension must be 1");
  Vector out(grid.cell_count());
  for (std::int64_t c = 0; c < grid.cell_count(); ++c) out[c] = czo_star_at(f, grid.cell_center(c)[0]);
  return StepFunction(grid, std::move(out));
}

}  // namespace dyadic
