#include "dyadic/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dyadic {

namespace {

constexpr int kMaxCellBits = 26;

std::int64_t ipow2(int e) { return std::int64_t{1} << e; }

std::int64_t shift_down(std::int64_t v, int bits) {
  return v >> std::min(bits, 62);
}

}  // namespace

DyadicCube DyadicCube::parent() const {
  DyadicCube p{level + 1, coords};
  for (auto& c : p.coords) c >>= 1;
  return p;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.level > level || other.coords.size() != coords.size()) return false;
  const int diff = level - other.level;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (shift_down(other.coords[i], diff) != coords[i]) return false;
  }
  return true;
}

std::string DyadicCube::to_string() const {
  std::ostringstream os;
  os << "L" << level << "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) os << ",";
    os << coords[i];
  }
  os << ")";
  return os.str();
}

DyadicGrid::DyadicGrid(int dim, int top_level, int finest_level,
                       std::vector<double> shift)
    : dim_(dim), top_(top_level), finest_(finest_level), shift_(std::move(shift)) {
  if (dim_ < 1) throw PreconditionError("DyadicGrid: dimension must be positive");
  if (finest_ > top_)
    throw PreconditionError("DyadicGrid: finest level must not exceed top level");
  if (std::abs(top_) > 500 || std::abs(finest_) > 500)
    throw PreconditionError("DyadicGrid: levels out of floating-point range");
  if (static_cast<long>(dim_) * depth() > kMaxCellBits)
    throw PreconditionError("DyadicGrid: window has too many cells");
  if (shift_.empty()) shift_.assign(static_cast<std::size_t>(dim_), 0.0);
  if (shift_.size() != static_cast<std::size_t>(dim_))
    throw PreconditionError("DyadicGrid: shift must have one entry per axis");
  for (double t : shift_)
    if (!std::isfinite(t)) throw PreconditionError("DyadicGrid: shift must be finite");
}

std::int64_t DyadicGrid::cells_per_side(int level) const {
  if (level < finest_ || level > top_)
    throw PreconditionError("DyadicGrid: level outside window");
  return ipow2(top_ - level);
}

std::int64_t DyadicGrid::cube_count(int level) const {
  const std::int64_t s = cells_per_side(level);
  std::int64_t count = 1;
  for (int axis = 0; axis < dim_; ++axis) count *= s;
  return count;
}

double DyadicGrid::side(int level) const { return std::ldexp(1.0, level); }

double DyadicGrid::cube_measure(int level) const {
  return std::ldexp(1.0, level * dim_);
}

DyadicCube DyadicGrid::top_cube() const {
  return DyadicCube{top_, Coords(static_cast<std::size_t>(dim_), 0)};
}

bool DyadicGrid::in_window(const DyadicCube& q) const {
  if (q.coords.size() != static_cast<std::size_t>(dim_)) return false;
  if (q.level < finest_ || q.level > top_) return false;
  const std::int64_t s = ipow2(top_ - q.level);
  return std::all_of(q.coords.begin(), q.coords.end(),
                     [s](std::int64_t c) { return c >= 0 && c < s; });
}

bool DyadicGrid::admissible(const DyadicCube& q) const {
  if (in_window(q)) return true;
  return q.coords.size() == static_cast<std::size_t>(dim_) && q.level > top_ &&
         std::all_of(q.coords.begin(), q.coords.end(),
                     [](std::int64_t c) { return c == 0; });
}

std::int64_t DyadicGrid::index_of(const DyadicCube& q) const {
  if (!in_window(q))
    throw PreconditionError("cube " + q.to_string() + " is outside the window");
  const std::int64_t s = ipow2(top_ - q.level);
  std::int64_t idx = 0;
  for (int axis = dim_ - 1; axis >= 0; --axis) idx = idx * s + q.coords[axis];
  return idx;
}

DyadicCube DyadicGrid::cube(int level, std::int64_t index) const {
  const std::int64_t s = cells_per_side(level);
  if (index < 0 || index >= cube_count(level))
    throw PreconditionError("DyadicGrid: cube index out of range");
  DyadicCube q{level, Coords(static_cast<std::size_t>(dim_))};
  for (int axis = 0; axis < dim_; ++axis) {
    q.coords[axis] = index % s;
    index /= s;
  }
  return q;
}

std::vector<DyadicCube> DyadicGrid::cubes(int level) const {
  std::vector<DyadicCube> out;
  const std::int64_t count = cube_count(level);
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(cube(level, i));
  return out;
}

std::vector<DyadicCube> DyadicGrid::all_cubes() const {
  std::vector<DyadicCube> out;
  for (int level = top_; level >= finest_; --level) {
    auto layer = cubes(level);
    out.insert(out.end(), std::make_move_iterator(layer.begin()),
               std::make_move_iterator(layer.end()));
  }
  return out;
}

double DyadicGrid::lower(const DyadicCube& q, int axis) const {
  return shift_[axis] + std::ldexp(static_cast<double>(q.coords[axis]), q.level);
}

std::int64_t DyadicGrid::cell_at(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(dim_))
    throw PreconditionError("cell_at: point dimension mismatch");
  const std::int64_t s = ipow2(depth());
  std::int64_t idx = 0;
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    const double c = std::floor(std::ldexp(point[axis] - shift_[axis], -finest_));
    if (!(c >= 0.0) || c >= static_cast<double>(s)) return -1;
    idx = idx * s + static_cast<std::int64_t>(c);
  }
  return idx;
}

std::vector<double> DyadicGrid::cell_center(std::int64_t cell) const {
  const DyadicCube c = cube(finest_, cell);
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (int axis = 0; axis < dim_; ++axis)
    x[axis] = lower(c, axis) + 0.5 * side(finest_);
  return x;
}

std::vector<std::int64_t> DyadicGrid::cells_of(const DyadicCube& q) const {
  if (!in_window(q))
    throw PreconditionError("cells_of: cube " + q.to_string() + " is outside the window");
  const std::int64_t r = ipow2(q.level - finest_);
  const std::int64_t s = ipow2(depth());
  std::vector<std::int64_t> out{0};
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    std::vector<std::int64_t> next;
    next.reserve(out.size() * static_cast<std::size_t>(r));
    for (std::int64_t base : out)
      for (std::int64_t c = q.coords[axis] * r; c < (q.coords[axis] + 1) * r; ++c)
        next.push_back(base * s + c);
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<DyadicCube> descendants(const DyadicGrid& grid, const DyadicCube& q,
                                    int generations) {
  if (generations < 0) throw PreconditionError("descendants: negative depth");
  if (q.level - generations < grid.finest_level())
    throw PreconditionError("descendants: level underflow below the finest level");
  const int n = grid.dim();
  const std::int64_t per_axis = ipow2(generations);
  const std::int64_t total = ipow2(generations * n);
  std::vector<DyadicCube> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) {
    DyadicCube c{q.level - generations, Coords(static_cast<std::size_t>(n))};
    std::int64_t rest = i;
    for (int axis = 0; axis < n; ++axis) {
      c.coords[axis] = q.coords[axis] * per_axis + rest % per_axis;
      rest /= per_axis;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<DyadicCube> ancestors(const DyadicGrid& grid, const DyadicCube& r,
                                  int generations) {
  if (generations < 0) throw PreconditionError("ancestors: negative count");
  if (r.level + generations > grid.top_level())
    throw PreconditionError("ancestors: level overflow above the window top");
  std::vector<DyadicCube> out{r};
  for (int k = 0; k < generations; ++k) out.push_back(out.back().parent());
  return out;
}

std::vector<std::int64_t> parent_map(const DyadicGrid& grid, int level) {
  const int n = grid.dim();
  const std::int64_t s = grid.cells_per_side(level);
  const std::int64_t sp = s / 2;
  const std::int64_t count = grid.cube_count(level);
  std::vector<std::int64_t> out(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    std::int64_t rest = i, pidx = 0, mult = 1;
    for (int axis = 0; axis < n; ++axis) {
      pidx += ((rest % s) >> 1) * mult;
      rest /= s;
      mult *= sp;
    }
    out[static_cast<std::size_t>(i)] = pidx;
  }
  return out;
}

StepFunction::StepFunction(DyadicGrid grid)
    : grid_(std::move(grid)), values_(Vector::Zero(grid_.cell_count())) {}

StepFunction::StepFunction(DyadicGrid grid, Vector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count())
    throw PreconditionError("StepFunction: expected one value per finest cell");
  if (!values_.allFinite())
    throw PreconditionError("StepFunction: values must be finite");
}

StepFunction StepFunction::constant(const DyadicGrid& grid, double value) {
  return StepFunction(grid, Vector::Constant(grid.cell_count(), value));
}

StepFunction StepFunction::indicator(const DyadicGrid& grid, const DyadicCube& q) {
  StepFunction f(grid);
  if (grid.admissible(q) && !grid.in_window(q)) return constant(grid, 1.0);
  for (std::int64_t c : grid.cells_of(q)) f.values_[c] = 1.0;
  return f;
}

StepFunction StepFunction::box(const DyadicGrid& grid, std::span<const double> lo,
                               std::span<const double> hi) {
  const int n = grid.dim();
  if (lo.size() != static_cast<std::size_t>(n) || hi.size() != static_cast<std::size_t>(n))
    throw PreconditionError("StepFunction::box: corner dimension mismatch");
  StepFunction f(grid);
  const double h = grid.side(grid.finest_level());
  for (std::int64_t cell = 0; cell < grid.cell_count(); ++cell) {
    const DyadicCube c = grid.cube(grid.finest_level(), cell);
    double frac = 1.0;
    for (int axis = 0; axis < n && frac > 0.0; ++axis) {
      const double a = grid.lower(c, axis);
      const double overlap = std::min(a + h, hi[axis]) - std::max(a, lo[axis]);
      frac *= std::max(0.0, overlap) / h;
    }
    f.values_[cell] = frac;
  }
  return f;
}

void StepFunction::set(std::int64_t cell, double value) {
  if (!std::isfinite(value)) throw PreconditionError("StepFunction: non-finite value");
  values_[cell] = value;
}

StepFunction StepFunction::abs() const {
  return StepFunction(grid_, values_.cwiseAbs());
}

StepFunction StepFunction::operator-() const { return StepFunction(grid_, -values_); }

StepFunction& StepFunction::operator+=(const StepFunction& other) {
  require_same_grid(*this, other, "StepFunction +");
  values_ += other.values_;
  return *this;
}

StepFunction& StepFunction::operator-=(const StepFunction& other) {
  require_same_grid(*this, other, "StepFunction -");
  values_ -= other.values_;
  return *this;
}

StepFunction& StepFunction::operator*=(double s) {
  values_ *= s;
  return *this;
}

StepFunction operator*(const StepFunction& a, const StepFunction& b) {
  require_same_grid(a, b, "StepFunction *");
  return StepFunction(a.grid(), a.values().cwiseProduct(b.values()));
}

StepFunction StepFunction::restricted(const DyadicCube& q) const {
  return *this * indicator(grid_, q);
}

void require_same_grid(const StepFunction& a, const StepFunction& b, const char* what) {
  if (!(a.grid() == b.grid()))
    throw PreconditionError(std::string(what) + ": grid mismatch");
}

Weight::Weight(StepFunction w) : w_(std::move(w)) {
  if (!w_.nonnegative()) throw PreconditionError("Weight: values must be non-negative");
}

ExponentPair::ExponentPair(double p, double q) : p_(p), q_(q) {
  if (!(p > 1.0 && p < q && std::isfinite(q)))
    throw PreconditionError("ExponentPair requires 1 < p < q < infinity");
}

std::pair<double, double> dual_exponents(const ExponentPair& e) {
  return {e.p_dual(), e.q_dual()};
}

ExponentPair dual_pair(const ExponentPair& e) { return ExponentPair(e.q_dual(), e.p_dual()); }

CubeSums::CubeSums(const StepFunction& f) : grid_(f.grid()) {
  sums_.reserve(static_cast<std::size_t>(grid_.depth() + 1));
  sums_.push_back(f.values() * grid_.cell_measure());
  for (int level = grid_.finest_level(); level < grid_.top_level(); ++level) {
    const auto parents = parent_map(grid_, level);
    const Vector& child = sums_.back();
    Vector up = Vector::Zero(grid_.cube_count(level + 1));
    for (Eigen::Index i = 0; i < child.size(); ++i) up[parents[static_cast<std::size_t>(i)]] += child[i];
    sums_.push_back(std::move(up));
  }
}

const Vector& CubeSums::level(int level) const {
  if (level < grid_.finest_level() || level > grid_.top_level())
    throw PreconditionError("CubeSums: level outside window");
  return sums_[static_cast<std::size_t>(level - grid_.finest_level())];
}

double CubeSums::integral(const DyadicCube& q) const {
  if (grid_.in_window(q)) return level(q.level)[grid_.index_of(q)];
  if (grid_.admissible(q)) return sums_.back()[0];
  if (q.level < grid_.finest_level()) {
    DyadicCube cell = q;
    for (auto& c : cell.coords) c = shift_down(c, grid_.finest_level() - q.level);
    cell.level = grid_.finest_level();
    if (!grid_.in_window(cell)) return 0.0;
    return sums_.front()[grid_.index_of(cell)] *
           std::ldexp(1.0, (q.level - grid_.finest_level()) * grid_.dim());
  }
  return 0.0;
}

double CubeSums::average(const DyadicCube& q) const {
  return integral(q) / grid_.cube_measure(q.level);
}

double integral(const StepFunction& f) {
  return f.values().sum() * f.grid().cell_measure();
}

double integral(const StepFunction& f, const Weight& w) {
  require_same_grid(f, w.function(), "integral");
  return f.values().dot(w.function().values()) * f.grid().cell_measure();
}

double average(const StepFunction& f, const DyadicCube& q) {
  const DyadicGrid& g = f.grid();
  if (q.coords.size() != static_cast<std::size_t>(g.dim()))
    throw PreconditionError("average: cube dimension mismatch");
  if (g.in_window(q)) {
    double s = 0.0;
    for (std::int64_t c : g.cells_of(q)) s += f[c];
    return s * g.cell_measure() / g.cube_measure(q.level);
  }
  if (g.admissible(q)) return integral(f) / g.cube_measure(q.level);
  if (q.level < g.finest_level()) {
    DyadicCube cell{g.finest_level(), q.coords};
    for (auto& c : cell.coords) c = shift_down(c, g.finest_level() - q.level);
    return g.in_window(cell) ? f[g.index_of(cell)] : 0.0;
  }
  return 0.0;
}

double lp_norm(const StepFunction& f, const Weight& w, double p) {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm: p must be at least 1");
  require_same_grid(f, w.function(), "lp_norm");
  const double s = (f.values().array().abs().pow(p) * w.function().values().array()).sum();
  return std::pow(s * f.grid().cell_measure(), 1.0 / p);
}

double weak_lq_norm(const StepFunction& g, const Weight& u, double q) {
  if (!(q > 1.0)) throw PreconditionError("weak_lq_norm: q must exceed 1");
  require_same_grid(g, u.function(), "weak_lq_norm");
  const double cell = g.grid().cell_measure();
  std::vector<std::pair<double, double>> level_mass;
  level_mass.reserve(static_cast<std::size_t>(g.size()));
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const double t = std::abs(g[i]);
    if (t > 0.0) level_mass.emplace_back(t, u[i] * cell);
  }
  std::sort(level_mass.begin(), level_mass.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < level_mass.size(); ++i) {
    mass += level_mass[i].second;
    const bool last_of_value =
        i + 1 == level_mass.size() || level_mass[i + 1].first != level_mass[i].first;
    if (last_of_value) best = std::max(best, level_mass[i].first * std::pow(mass, 1.0 / q));
  }
  return best;
}

}  // namespace dyadic
