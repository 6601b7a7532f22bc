#include "dyadic/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dyadic/parallel.hpp"

namespace dyadic {

namespace {

struct Point {
  double x;
  double y;
};

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Max slope from p to the concave chain hull[first..], all strictly right of p.
double tangent_slope(const Point& p, const std::vector<Point>& hull, std::size_t first) {
  auto rises = [&](std::size_t i) {
    const Point& a = hull[i];
    const Point& b = hull[i + 1];
    return (b.y - p.y) * (a.x - p.x) > (a.y - p.y) * (b.x - p.x);
  };
  std::size_t lo = first, hi = hull.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (rises(mid)) lo = mid + 1;
    else hi = mid;
  }
  return (hull[lo].y - p.y) / (hull[lo].x - p.x);
}

double box_integral(const StepFunction& f, std::span<const double> lo,
                    std::span<const double> hi) {
  const DyadicGrid& g = f.grid();
  const int n = g.dim();
  const double h = g.side(g.finest_level());
  const std::int64_t s = g.cells_per_side(g.finest_level());
  std::vector<std::int64_t> first(n), last(n);
  for (int axis = 0; axis < n; ++axis) {
    const double a = (lo[axis] - g.shift()[axis]) / h;
    const double b = (hi[axis] - g.shift()[axis]) / h;
    first[axis] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(a)), 0, s);
    last[axis] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(b)), 0, s);
    if (first[axis] >= last[axis]) return 0.0;
  }
  auto overlap = [&](int axis, std::int64_t c) {
    const double a = g.shift()[axis] + h * static_cast<double>(c);
    return std::max(0.0, std::min(a + h, hi[axis]) - std::max(a, lo[axis]));
  };
  std::vector<std::int64_t> idx(first);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    std::int64_t cell = 0;
    for (int axis = n - 1; axis >= 0; --axis) {
      weight *= overlap(axis, idx[axis]);
      cell = cell * s + idx[axis];
    }
    total += weight * f[cell];
    int axis = 0;
    while (axis < n && ++idx[axis] == last[axis]) {
      idx[axis] = first[axis];
      ++axis;
    }
    if (axis == n) break;
  }
  return total;
}

}  // namespace

StepFunction dyadic_maximal(const StepFunction& f) {
  const DyadicGrid& g = f.grid();
  const CubeSums sums(f.abs());
  Vector current = sums.level(g.top_level()) / g.cube_measure(g.top_level());
  for (int level = g.top_level() - 1; level >= g.finest_level(); --level) {
    const auto parents = parent_map(g, level);
    Vector next = sums.level(level) / g.cube_measure(level);
    for (Eigen::Index i = 0; i < next.size(); ++i)
      next[i] = std::max(next[i], current[parents[static_cast<std::size_t>(i)]]);
    current = std::move(next);
  }
  return StepFunction(g, std::move(current));
}

IntervalMaximal::IntervalMaximal(const StepFunction& f) {
  const DyadicGrid& g = f.grid();
  if (g.dim() != 1)
    throw PreconditionError("IntervalMaximal: exact path requires dimension 1");
  std::int64_t lo = -1, hi = -1;
  for (std::int64_t i = 0; i < f.size(); ++i) {
    if (f[i] != 0.0) {
      if (lo < 0) lo = i;
      hi = i;
    }
  }
  if (lo < 0) return;
  const double h = g.side(g.finest_level());
  const double t = g.shift()[0];
  double acc = 0.0;
  for (std::int64_t i = lo; i <= hi + 1; ++i) {
    breaks_.push_back(t + h * static_cast<double>(i));
    cumulative_.push_back(acc);
    if (i <= hi) {
      density_.push_back(std::abs(f[i]));
      acc += density_.back() * h;
    }
  }
}

double IntervalMaximal::cumulative(double x) const {
  if (x <= breaks_.front()) return 0.0;
  if (x >= breaks_.back()) return cumulative_.back();
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const auto i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return cumulative_[i] + density_[i] * (x - breaks_[i]);
}

double IntervalMaximal::operator()(double x) const {
  if (breaks_.empty()) return 0.0;
  const Point px{x, cumulative(x)};
  const auto split = std::lower_bound(breaks_.begin(), breaks_.end(), x);
  const auto first_right = std::upper_bound(breaks_.begin(), breaks_.end(), x);

  std::vector<Point> left;
  for (auto it = breaks_.begin(); it != split; ++it) {
    const Point p{*it, cumulative_[static_cast<std::size_t>(it - breaks_.begin())]};
    while (left.size() >= 2 && cross(left[left.size() - 2], left.back(), p) <= 0.0)
      left.pop_back();
    left.push_back(p);
  }
  while (left.size() >= 2 && cross(left[left.size() - 2], left.back(), px) <= 0.0)
    left.pop_back();
  left.push_back(px);

  std::vector<Point> right{px};
  for (auto it = first_right; it != breaks_.end(); ++it) {
    const Point p{*it, cumulative_[static_cast<std::size_t>(it - breaks_.begin())]};
    while (right.size() >= 2 && cross(right[right.size() - 2], right.back(), p) >= 0.0)
      right.pop_back();
    right.push_back(p);
  }

  double best = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    const bool at_x = i + 1 == left.size();
    // right.front() is x itself; an interval needs b > a.
    const std::size_t first = at_x ? 1 : 0;
    if (first >= right.size()) continue;
    best = std::max(best, tangent_slope(left[i], right, first));
  }
  return best;
}

double hl_maximal_at(const StepFunction& f, std::span<const double> x) {
  if (f.grid().dim() == 1) return IntervalMaximal(f)(x[0]);
  return shifted_grid_maximal_at(f, x);
}

double hl_maximal_at(const StepFunction& f, double x) {
  return hl_maximal_at(f, std::span<const double>(&x, 1));
}

double shifted_grid_comparability(int dim) { return std::pow(6.0, dim); }

double shifted_grid_maximal_at(const StepFunction& f, std::span<const double> x) {
  const DyadicGrid& g = f.grid();
  const int n = g.dim();
  if (x.size() != static_cast<std::size_t>(n))
    throw PreconditionError("shifted_grid_maximal_at: point dimension mismatch");
  const StepFunction a = f.abs();
  double best = 0.0;
  if (const std::int64_t cell = g.cell_at(x); cell >= 0) best = a[cell];
  std::vector<double> lo(n), hi(n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    for (int level = g.finest_level(); level <= g.top_level() + 2; ++level) {
      const double side = g.side(level);
      const double sign = (level % 2 == 0) ? 1.0 : -1.0;
      for (int axis = 0; axis < n; ++axis) {
        const double offset = ((mask >> axis) & 1u) ? sign * side / 3.0 : 0.0;
        const double origin = g.shift()[axis] + offset;
        lo[axis] = origin + side * std::floor((x[axis] - origin) / side);
        hi[axis] = lo[axis] + side;
      }
      best = std::max(best, box_integral(a, lo, hi) / std::pow(side, n));
    }
  }
  return best;
}

namespace {

double sampled_integral(const StepFunction& g, const Weight& w, const DyadicCube& q,
                        double exponent, int resolution) {
  const DyadicGrid& grid = g.grid();
  const int n = grid.dim();
  const double h = grid.side(grid.finest_level());
  const double sample_measure = grid.cell_measure() / std::pow(resolution, n);
  double total = 0.0;
  if (n == 1) {
    const IntervalMaximal m(g);
    for (std::int64_t c : grid.cells_of(q)) {
      if (w[c] == 0.0) continue;
      const double a = grid.lower(grid.cube(grid.finest_level(), c), 0);
      double s = 0.0;
      for (int k = 0; k < resolution; ++k) s += std::pow(m(a + h * (k + 0.5) / resolution), exponent);
      total += w[c] * s * sample_measure;
    }
    return total;
  }
  std::vector<double> x(n);
  const std::int64_t samples = static_cast<std::int64_t>(std::pow(resolution, n));
  for (std::int64_t c : grid.cells_of(q)) {
    if (w[c] == 0.0) continue;
    const DyadicCube cell = grid.cube(grid.finest_level(), c);
    double s = 0.0;
    for (std::int64_t k = 0; k < samples; ++k) {
      std::int64_t rest = k;
      for (int axis = 0; axis < n; ++axis) {
        x[axis] = grid.lower(cell, axis) + h * (static_cast<double>(rest % resolution) + 0.5) / resolution;
        rest /= resolution;
      }
      s += std::pow(shifted_grid_maximal_at(g, x), exponent);
    }
    total += w[c] * s * sample_measure;
  }
  return total;
}

double ratio(double numerator_integral, double exponent, double denominator) {
  if (numerator_integral <= 0.0) return 0.0;
  if (denominator <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(numerator_integral, 1.0 / exponent) / denominator;
}

}  // namespace

TestingValue sawyer_test(const WeightPair& pair, const DyadicCube& q,
                         SawyerDirection dir, const SawyerOptions& opts) {
  require_same_grid(pair.u.function(), pair.sigma.function(), "sawyer_test");
  const DyadicGrid& grid = pair.u.grid();
  if (!grid.in_window(q)) throw PreconditionError("sawyer_test: cube outside the window");
  if (opts.resolution < 1) throw PreconditionError("sawyer_test: resolution must be positive");
  const bool forward = dir == SawyerDirection::Forward;
  const Weight& source = forward ? pair.sigma : pair.u;
  const Weight& target = forward ? pair.u : pair.sigma;
  const double exponent = forward ? pair.exponents.q() : pair.exponents.p_dual();
  const double den_exponent = forward ? pair.exponents.p() : pair.exponents.q_dual();

  const StepFunction g = source.function().restricted(q);
  const double denominator = std::pow(integral(g), 1.0 / den_exponent);

  if (opts.kind == MaximalKind::Dyadic) {
    const StepFunction md = dyadic_maximal(g);
    double total = 0.0;
    for (std::int64_t c : grid.cells_of(q)) total += std::pow(md[c], exponent) * target[c];
    return {ratio(total * grid.cell_measure(), exponent, denominator), 0.0};
  }

  const double full = sampled_integral(g, target, q, exponent, opts.resolution);
  TestingValue out{ratio(full, exponent, denominator), 0.0};
  const int half = opts.resolution / 2;
  if (half >= 1 && std::isfinite(out.value)) {
    const double coarse =
        ratio(sampled_integral(g, target, q, exponent, half), exponent, denominator);
    out.error_estimate = std::abs(out.value - coarse) / 3.0;
  }
  return out;
}

std::pair<double, double> sawyer_constants(const WeightPair& pair,
                                           std::span<const DyadicCube> cubes,
                                           const SawyerOptions& opts) {
  if (cubes.empty()) throw PreconditionError("sawyer_constants: empty cube collection");
  std::vector<double> forward(cubes.size()), dual(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    forward[i] = sawyer_test(pair, cubes[i], SawyerDirection::Forward, opts).value;
    dual[i] = sawyer_test(pair, cubes[i], SawyerDirection::Dual, opts).value;
  });
  return {*std::max_element(forward.begin(), forward.end()),
          *std::max_element(dual.begin(), dual.end())};
}

}  // namespace dyadic
