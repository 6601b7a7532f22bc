#include "dyadic/normest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "dyadic/io.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

namespace {

// The search works in coordinates y_j = h_j (sigma_j |cell|)^{1/p} on the
// support of sigma, so that the source norm is the plain l^p norm of y and
// the output restricted to the support of u is z = A y.
class RatioProblem {
 public:
  RatioProblem(const LinearOperator& op, const WeightPair& pair)
      : grid_(pair.u.grid()), p_(pair.exponents.p()), q_(pair.exponents.q()), positive_(op.positive) {
    require_same_grid(pair.u.function(), pair.sigma.function(), "norm_estimate");
    const double cell = grid_.cell_measure();
    for (std::int64_t i = 0; i < grid_.cell_count(); ++i) {
      if (pair.sigma[i] > 0.0) cols_.push_back(i);
      if (pair.u[i] > 0.0) rows_.push_back(i);
    }
    mass_.resize(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r) mass_[static_cast<Eigen::Index>(r)] = pair.u[rows_[r]] * cell;
    to_density_.resize(static_cast<Eigen::Index>(cols_.size()));
    matrix_.resize(static_cast<Eigen::Index>(rows_.size()), static_cast<Eigen::Index>(cols_.size()));
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      const double s = pair.sigma[cols_[c]];
      to_density_[static_cast<Eigen::Index>(c)] = std::pow(s * cell, -1.0 / p_);
      StepFunction e(grid_);
      e.set(cols_[c], s * to_density_[static_cast<Eigen::Index>(c)]);
      const StepFunction image = op.apply(e);
      for (std::size_t r = 0; r < rows_.size(); ++r)
        matrix_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = image[rows_[r]];
    }
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(cols_.size()); }
  bool degenerate() const { return cols_.empty(); }
  bool positive() const { return positive_; }
  double p() const { return p_; }

  double source_norm(const Vector& y) const {
    return std::pow(y.array().abs().pow(p_).sum(), 1.0 / p_);
  }

  std::pair<double, double> ratios(const Vector& y) const {
    const double src = source_norm(y);
    if (src == 0.0 || rows_.empty()) return {0.0, 0.0};
    const Vector z = matrix_ * y;
    const double strong = std::pow((z.array().abs().pow(q_) * mass_.array()).sum(), 1.0 / q_);
    return {strong / src, weak(z) / src};
  }

  /// Gradient of log(strong ratio) at y.
  Vector log_gradient(const Vector& y) const {
    const Vector z = matrix_ * y;
    const Eigen::ArrayXd az = z.array().abs();
    const double s = (az.pow(q_) * mass_.array()).sum();
    const double d = y.array().abs().pow(p_).sum();
    Vector out = Vector::Zero(y.size());
    if (s > 0.0) {
      const Vector w = (mass_.array() * az.pow(q_ - 1.0) * z.array().sign()).matrix();
      out = matrix_.transpose() * w / s;
    }
    if (d > 0.0) out.array() -= y.array().abs().pow(p_ - 1.0) * y.array().sign() / d;
    return out;
  }

  /// Fixed-point step y <- psi_{p'}(A^T (mass * psi_q(A y))).
  Vector power_step(const Vector& y) const {
    const Vector z = matrix_ * y;
    const Vector w = (mass_.array() * z.array().abs().pow(q_ - 1.0) * z.array().sign()).matrix();
    const Vector back = matrix_.transpose() * w;
    return (back.array().abs().pow(1.0 / (p_ - 1.0)) * back.array().sign()).matrix();
  }

  /// Projects onto the admissible cone and the unit l^p sphere; empty on failure.
  bool normalize(Vector& y) const {
    if (positive_) y = y.cwiseMax(0.0);
    const double n = source_norm(y);
    if (!(n > 0.0) || !std::isfinite(n)) return false;
    y /= n;
    return true;
  }

  StepFunction density(const Vector& y) const {
    StepFunction h(grid_);
    for (std::size_t c = 0; c < cols_.size(); ++c)
      h.set(cols_[c], y[static_cast<Eigen::Index>(c)] * to_density_[static_cast<Eigen::Index>(c)]);
    return h;
  }

  const DyadicGrid& grid() const { return grid_; }

 private:
  double weak(const Vector& z) const {
    std::vector<std::pair<double, double>> level_mass;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (z[i] != 0.0) level_mass.emplace_back(std::abs(z[i]), mass_[i]);
    std::sort(level_mass.begin(), level_mass.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double best = 0.0, m = 0.0;
    for (std::size_t i = 0; i < level_mass.size(); ++i) {
      m += level_mass[i].second;
      if (i + 1 == level_mass.size() || level_mass[i + 1].first != level_mass[i].first)
        best = std::max(best, level_mass[i].first * std::pow(m, 1.0 / q_));
    }
    return best;
  }

  DyadicGrid grid_;
  double p_;
  double q_;
  bool positive_;
  std::vector<std::int64_t> cols_;
  std::vector<std::int64_t> rows_;
  Vector mass_;
  Vector to_density_;
  Eigen::MatrixXd matrix_;
};

struct Best {
  double value = -1.0;
  Vector y;
};

struct RestartResult {
  Best strong;
  Best weak;
  std::int64_t trials = 0;
  bool converged = false;
};

struct SearchResult {
  Best strong;
  Best weak;
  std::int64_t trials = 0;
  bool strong_converged = false;
  bool weak_converged = false;
};

Vector random_start(const RatioProblem& problem, Rng& rng) {
  Vector y(problem.size());
  for (auto& v : y) v = problem.positive() ? rng.uniform() : rng.uniform(-1.0, 1.0);
  // Sparse starts reach concentrated extremizers that dense starts miss.
  if (rng.bernoulli(0.5)) {
    for (auto& v : y)
      if (rng.bernoulli(0.7)) v = 0.0;
  }
  return y;
}

RestartResult run_restart(const RatioProblem& problem, const AscentConfig& cfg, int restart) {
  Rng rng(derive_seed(cfg.seed, "norm-restart", static_cast<std::uint64_t>(restart)));
  RestartResult out;
  auto record = [&](const Vector& y) {
    const auto [s, w] = problem.ratios(y);
    ++out.trials;
    if (s > out.strong.value) out.strong = {s, y};
    if (w > out.weak.value) out.weak = {w, y};
    return std::pair{s, w};
  };

  Vector ys = restart == 0 ? Vector::Ones(problem.size()) : random_start(problem, rng);
  if (!problem.normalize(ys)) {
    ys = Vector::Ones(problem.size());
    problem.normalize(ys);
  }
  double fs = record(ys).first;
  Vector yw = ys;
  double fw = problem.ratios(yw).second;
  double eta = cfg.step;
  double rho = 0.5;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double before = fs;

    Vector yp = problem.power_step(ys);
    double fp = -1.0;
    if (problem.normalize(yp)) fp = record(yp).first;

    const Vector grad = problem.log_gradient(ys);
    Vector next = ys;
    double fnext = fs;
    if (cfg.step_rule == StepRule::Backtracking) {
      for (double e = eta; e > 1e-12; e *= 0.5) {
        Vector yc = ys + e * grad;
        if (!problem.normalize(yc)) continue;
        const double fc = record(yc).first;
        if (fc > fs) {
          next = std::move(yc);
          fnext = fc;
          eta = std::min(2.0 * e, 64.0);
          break;
        }
      }
    } else {
      Vector yc = ys + eta * grad;
      if (problem.normalize(yc)) {
        fnext = record(yc).first;
        next = std::move(yc);
      }
    }
    if (fp > fnext) {
      next = std::move(yp);
      fnext = fp;
    }
    ys = std::move(next);
    fs = fnext;

    // Direct search on the weak ratio, which is not differentiable.
    for (int k = 0; k < cfg.probes; ++k) {
      Vector d(problem.size());
      if (rng.bernoulli(0.5)) {
        d.setZero();
        d[static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(problem.size())))] =
            rng.uniform(-1.0, 1.0);
      } else {
        for (auto& v : d) v = rng.uniform(-1.0, 1.0);
      }
      Vector yc = yw + rho * d;
      if (!problem.normalize(yc)) continue;
      const double fc = record(yc).second;
      if (fc > fw) {
        yw = std::move(yc);
        fw = fc;
        rho = std::min(1.0, rho * 1.5);
      } else {
        rho = std::max(1e-6, rho * 0.8);
      }
    }
    if (const double w = problem.ratios(ys).second; w > fw) {
      yw = ys;
      fw = w;
    }

    const bool stalled = fs - before <= cfg.tolerance * std::max(1.0, std::abs(before));
    out.converged = stalled;
    if (stalled && rho <= 1e-6) break;
  }
  return out;
}

SearchResult search(const RatioProblem& problem, const AscentConfig& cfg) {
  if (cfg.restarts < 1) throw PreconditionError("AscentConfig: restarts must be at least 1");
  if (!(cfg.tolerance > 0.0)) throw PreconditionError("AscentConfig: tolerance must be positive");
  std::vector<RestartResult> runs(static_cast<std::size_t>(cfg.restarts));
  parallel_for(runs.size(), [&](std::size_t r) { runs[r] = run_restart(problem, cfg, static_cast<int>(r)); });
  SearchResult out;
  for (const auto& run : runs) {
    out.trials += run.trials;
    if (run.strong.value > out.strong.value) {
      out.strong = run.strong;
      out.strong_converged = run.converged;
    }
    if (run.weak.value > out.weak.value) {
      out.weak = run.weak;
      out.weak_converged = run.converged;
    }
  }
  return out;
}

NormEstimate make_estimate(const LinearOperator& op, const WeightPair& pair, NormMode mode,
                           const RatioProblem& problem, const SearchResult& result) {
  const Best& best = mode == NormMode::Strong ? result.strong : result.weak;
  StepFunction density = problem.density(best.y);
  NormEstimate est{0.0, pair.sigma.function() * density, density, result.trials,
                   mode == NormMode::Strong ? result.strong_converged : result.weak_converged, mode};
  est.value = norm_ratio(op, pair, mode, est.density);
  return est;
}

double safe_ratio(double num, double den) {
  if (num <= 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

Eigen::MatrixXd operator_matrix(const LinearOperator& op, const DyadicGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.cell_count());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    StepFunction e(grid);
    e.set(j, 1.0);
    a.col(j) = op.apply(e).values();
  }
  return a;
}

double norm_ratio(const LinearOperator& op, const WeightPair& pair, NormMode mode,
                  const StepFunction& density) {
  const double src = lp_norm(density, pair.sigma, pair.exponents.p());
  if (src == 0.0) return 0.0;
  const StepFunction image = op.apply(pair.sigma.function() * density);
  const double tgt = mode == NormMode::Strong ? lp_norm(image, pair.u, pair.exponents.q())
                                              : weak_lq_norm(image, pair.u, pair.exponents.q());
  return tgt / src;
}

NormEstimate norm_estimate(const LinearOperator& op, const WeightPair& pair, NormMode mode,
                           const AscentConfig& cfg) {
  const RatioProblem problem(op, pair);
  if (problem.degenerate()) {
    StepFunction zero(pair.u.grid());
    return NormEstimate{0.0, zero, zero, 0, true, mode};
  }
  return make_estimate(op, pair, mode, problem, search(problem, cfg));
}

LinearOperator talpha_operator(const CoefficientMap& alpha) {
  return LinearOperator{[alpha](const StepFunction& f) { return talpha_apply(alpha, f); }, true};
}

TestingReportRow testing_vs_norm_report(const CoefficientMap& alpha, const WeightPair& pair,
                                        const AscentConfig& cfg, std::string instance) {
  TestingReportRow row;
  row.instance = std::move(instance);
  row.seed = cfg.seed;
  std::tie(row.c1, row.c2) = lsu_constants(alpha, pair);
  const LinearOperator op = talpha_operator(alpha);
  const RatioProblem problem(op, pair);
  if (!problem.degenerate()) {
    const SearchResult result = search(problem, cfg);
    row.strong = make_estimate(op, pair, NormMode::Strong, problem, result).value;
    row.weak = make_estimate(op, pair, NormMode::Weak, problem, result).value;
  }
  row.strong_ratio = safe_ratio(row.strong, std::max(row.c1, row.c2));
  row.weak_ratio = safe_ratio(row.weak, row.c2);
  row.flagged = !std::isfinite(row.c1) || !std::isfinite(row.c2);
  return row;
}

std::string rows_to_csv(std::span<const TestingReportRow> rows) {
  std::ostringstream os;
  os << "instance,c1,c2,strong,weak,strong_ratio,weak_ratio,seed,flagged\n";
  for (const auto& r : rows) {
    os << r.instance << ',' << format_double(r.c1) << ',' << format_double(r.c2) << ','
       << format_double(r.strong) << ',' << format_double(r.weak) << ','
       << format_double(r.strong_ratio) << ',' << format_double(r.weak_ratio) << ',' << r.seed
       << ',' << (r.flagged ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string rows_to_json(std::span<const TestingReportRow> rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  for (const auto& r : rows) {
    out.push_back({{"instance", r.instance},
                   {"c1", num(r.c1)},
                   {"c2", num(r.c2)},
                   {"strong", num(r.strong)},
                   {"weak", num(r.weak)},
                   {"strong_ratio", num(r.strong_ratio)},
                   {"weak_ratio", num(r.weak_ratio)},
                   {"seed", r.seed},
                   {"flagged", r.flagged}});
  }
  return out.dump(2);
}

}  // namespace dyadic
