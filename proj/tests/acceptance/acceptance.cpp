// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Seeds come from the "acceptance/..." streams.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dyadic/calibration.hpp"
#include "dyadic/experiments.hpp"
#include "dyadic/instances.hpp"
#include "dyadic/maximal.hpp"
#include "dyadic/normest.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/shifts.hpp"
#include "dyadic/sparse.hpp"
#include "../oracles.hpp"

using namespace dyadic;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool close_rel(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// 1. A^R(f chi_R) <= 2 M_D(f chi_R) in n = 1 and <= 4/3 M_D(f chi_R) in n = 2.
Outcome am_constant() {
  Outcome out;
  struct Part {
    DyadicGrid grid;
    int triples;
    double bound;
    const char* stream;
  };
  for (const Part& part : {Part{DyadicGrid(1, 3, -7), 200, 2.0, "acceptance/am/n1"},
                           Part{DyadicGrid(2, 0, -5), 50, 4.0 / 3.0, "acceptance/am/n2"}}) {
    std::vector<double> ratio(static_cast<std::size_t>(part.triples));
    std::vector<char> agrees(ratio.size(), 1);
    parallel_for(ratio.size(), [&](std::size_t i) {
      Rng rng(derive_seed(kSeed, part.stream, i));
      const auto fs = random_step(part.grid, rng, {.nonnegative = true, .bumps = 12, .noise = 0.05});
      const SparseFamily family = sparse_from_stopping(fs, part.grid.top_cube());
      DyadicCube r = random_cube(part.grid, rng);
      if (rng.bernoulli(0.5)) {
        const auto& last = family.generations.back();
        r = last[rng.index(last.size())];
      }
      const StepFunction f = rng.bernoulli(0.5) ? fs : random_step(part.grid, rng);
      ratio[i] = am_ratio(family, r, f);
      // Oracle cross-check on every tenth triple.
      if (i % 10 == 0) {
        StepFunction fr(part.grid, f.values().cwiseProduct(oracle::indicator(part.grid, r.level, r.coords)));
        const double expect = oracle::sup_ratio(oracle::sparse_outer(family, r, f), oracle::dyadic_maximal(fr));
        agrees[i] = close_rel(ratio[i], expect, 1e-12);
      }
    });
    double worst = 0.0;
    for (double v : ratio) worst = std::max(worst, v);
    out.require(worst <= part.bound + 1e-9, std::string(part.stream) + " max " + num(worst));
    out.require(std::all_of(agrees.begin(), agrees.end(), [](char c) { return c; }),
                std::string(part.stream) + " oracle mismatch");
    out.detail += (out.detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(part.grid.dim()) +
                  " max " + num(worst);
  }
  return out;
}

// 2. Sawyer testing for u = chi_[0,1], sigma = chi_[2,3], p = 2, q = 3 on [0,4).
Outcome example_pair() {
  Outcome out;
  const DyadicGrid grid(1, 3, 0);
  const WeightPair pair{Weight(StepFunction::interval(grid, 0.0, 1.0)),
                        Weight(StepFunction::interval(grid, 2.0, 3.0)), ExponentPair(2.0, 3.0)};
  const DyadicCube q{2, {0}};
  // int_0^1 (3 - x)^{-q} dx and int_2^3 x^{-p'} dx.
  auto closed = [](double e) { return std::pow((std::pow(2.0, 1.0 - e) - std::pow(3.0, 1.0 - e)) / (e - 1.0), 1.0 / e); };
  const double fwd_exact = closed(3.0), dual_exact = closed(2.0);

  double prev_f = std::numeric_limits<double>::infinity(), prev_d = prev_f;
  for (int res = 16; res <= 64; res *= 2) {
    const double f = sawyer_test(pair, q, SawyerDirection::Forward, {res, MaximalKind::HardyLittlewood}).value;
    const double d = sawyer_test(pair, q, SawyerDirection::Dual, {res, MaximalKind::HardyLittlewood}).value;
    if (res == 16) {
      out.require(std::abs(f - 0.41135) <= 1e-2, "forward " + num(f));
      out.require(std::abs(d - 0.40825) <= 1e-2, "dual " + num(d));
      out.detail = "forward " + num(f) + " dual " + num(d);
    }
    out.require(std::abs(f - fwd_exact) <= prev_f, "forward error grows at " + std::to_string(res));
    out.require(std::abs(d - dual_exact) <= prev_d, "dual error grows at " + std::to_string(res));
    prev_f = std::abs(f - fwd_exact);
    prev_d = std::abs(d - dual_exact);
  }
  const auto [c1, c2] = sawyer_constants(pair, grid.all_cubes(), {16, MaximalKind::HardyLittlewood});
  out.require(std::isfinite(c1) && std::isfinite(c2), "sup over cubes not finite");

  // M(chi_{[2,3] cap Q})(x) <= |[2,3] cap Q| on [0,1] cap Q, with M from the oracle.
  for (const DyadicCube& cube : grid.all_cubes()) {
    const StepFunction target = pair.sigma.function().restricted(cube);
    const double mass = integral(target);
    if (mass <= 0.0) continue;
    for (int s = 0; s < 64; ++s) {
      const double x = (s + 0.5) / 64.0;
      const double lo = grid.lower(cube, 0), hi = lo + grid.side(cube.level);
      if (x < lo || x >= hi) continue;
      out.require(oracle::hl_maximal_1d(target, x) <= mass, "pointwise bound at " + num(x));
    }
  }
  return out;
}

// 3. gamma * shift_apply(spec, f) == H^d f with gamma = sqrt 2 and complexity 1.
Outcome hilbert_shift() {
  Outcome out;
  const DyadicGrid grid(1, 3, -10);
  const HilbertShift hs = hilbert_as_shift(grid);
  out.require(hs.gamma == std::sqrt(2.0), "gamma " + num(hs.gamma));
  out.require(hs.spec.complexity() == 1, "complexity " + std::to_string(hs.spec.complexity()));
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(derive_seed(kSeed, "acceptance/hilbert", i));
    const StepFunction f = random_step(grid, rng, {.nonnegative = false, .bumps = 16, .noise = 0.1});
    worst = std::max(worst, (dyadic_hilbert(f).values() - hs.gamma * shift_apply(hs.spec, f).values()).cwiseAbs().maxCoeff());
  }
  out.require(worst <= 1e-12, "max discrepancy " + num(worst));
  // H^d itself against explicit Haar vectors on a smaller window.
  const DyadicGrid small(1, 0, -8);
  double oracle_gap = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    Rng rng(derive_seed(kSeed, "acceptance/hilbert-oracle", i));
    const StepFunction f = random_step(small, rng, {.nonnegative = false});
    oracle_gap = std::max(oracle_gap, (dyadic_hilbert(f).values() - oracle::dyadic_hilbert(f)).cwiseAbs().maxCoeff());
  }
  out.require(oracle_gap <= 1e-12, "oracle gap " + num(oracle_gap));
  out.detail = (out.detail.empty() ? "" : out.detail + "; ") + "max discrepancy " + num(worst);
  return out;
}

// 4. M_D and the weak norm against enumeration on every window shape up to 2^8 cells.
Outcome oracle_equivalence() {
  Outcome out;
  std::vector<std::pair<int, int>> shapes;  // (dim, depth)
  for (int depth = 0; depth <= 8; ++depth) shapes.emplace_back(1, depth);
  for (int depth = 0; depth <= 4; ++depth) shapes.emplace_back(2, depth);
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(derive_seed(kSeed, "acceptance/oracle", i));
    const auto [dim, depth] = shapes[i % shapes.size()];
    const int top = rng.integer(-2, 3);
    std::vector<double> shift;
    for (int a = 0; a < dim; ++a) shift.push_back(rng.integer(-8, 8) / 8.0);
    const DyadicGrid g(dim, top, top - depth, shift);
    Vector fv(g.cell_count()), uv(g.cell_count());
    for (auto& v : fv) v = rng.integer(-8, 8);
    for (auto& v : uv) v = rng.integer(0, 4);
    const StepFunction f(g, fv);
    const Weight u(StepFunction(g, uv));
    mismatches += dyadic_maximal(f).values() != oracle::dyadic_maximal(f);
    for (double q : {1.5, 2.0, 3.0})
      mismatches += weak_lq_norm(f, u, q) != oracle::weak_norm(f, u, q);
  }
  out.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  if (out.pass) out.detail = "100 functions, exact";
  return out;
}

// 5. |T f| <= C_cal A|f| for H^d and random shifts of complexity <= 3.
Outcome sparse_domination() {
  Outcome out;
  const DyadicGrid grid(1, 0, -6);
  std::vector<Operator> ops{dyadic_hilbert};
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(derive_seed(kSeed, "acceptance/shift", s));
    const int m = rng.integer(0, 3), k = rng.integer(0, 3);
    auto spec = std::make_shared<HaarShiftSpec>(random_shift(grid, m, k, rng.next()));
    ops.push_back([spec](const StepFunction& f) { return shift_apply(*spec, f); });
  }
  std::vector<double> worst(100, 0.0);
  std::vector<char> agrees(100, 1);
  parallel_for(worst.size(), [&](std::size_t i) {
    Rng rng(derive_seed(kSeed, "acceptance/domination", i));
    const StepFunction f = random_step(grid, rng, {.nonnegative = false, .bumps = 10, .noise = 0.2});
    const SparseFamily family = sparse_from_stopping(f.abs(), grid.top_cube());
    const Vector bound = oracle::talpha(CoefficientMap::indicator(family), f.abs());
    for (std::size_t o = 0; o < ops.size(); ++o) {
      const double c = pointwise_domination_constant(ops[o], f, family);
      worst[i] = std::max(worst[i], c);
      const Vector image = o == 0 ? oracle::dyadic_hilbert(f) : ops[o](f).values();
      agrees[i] &= close_rel(c, oracle::sup_ratio(image, bound), 1e-9);
    }
  });
  std::sort(worst.begin(), worst.end());
  out.require(worst.back() <= calibration::kSparseDomination,
              "max " + num(worst.back()) + " > " + num(calibration::kSparseDomination));
  out.require(std::all_of(agrees.begin(), agrees.end(), [](char c) { return c; }), "oracle mismatch");
  out.detail += (out.detail.empty() ? "" : "; ") + std::string("median ") + num(worst[50]) + " p90 " +
                num(worst[90]) + " max " + num(worst.back()) + " C_cal " + num(calibration::kSparseDomination);
  return out;
}

// 6. Norm estimates of T_alpha against the testing constants at p = 2, q = 3.
Outcome testing_vs_norm() {
  Outcome out;
  const DyadicGrid grid(1, 0, -4);
  const ExponentPair exps(2.0, 3.0);
  constexpr int kInstances = 100;
  std::vector<double> strong(kInstances), weak(kInstances);
  std::vector<char> ok(kInstances, 1);
  parallel_for(strong.size(), [&](std::size_t i) {
    Rng rng(derive_seed(kSeed, "acceptance/testing", i));
    const CoefficientMap alpha = random_coefficients(grid, rng);
    const WeightPair pair = random_pair(grid, exps, rng);
    AscentConfig cfg;
    cfg.seed = derive_seed(kSeed, "acceptance/ascent", i);
    const TestingReportRow row = testing_vs_norm_report(alpha, pair, cfg);
    const auto [c1, c2] = oracle::lsu_constants(alpha, pair);
    ok[i] &= close_rel(row.c1, c1, 1e-12) && close_rel(row.c2, c2, 1e-12);
    strong[i] = row.strong / std::max(c1, c2);
    weak[i] = row.weak / c2;
    if (row.strong == 0.0) strong[i] = 0.0;
    if (row.weak == 0.0) weak[i] = 0.0;
    // The certified value is achieved by a witness, recomputed by the oracle.
    const NormEstimate est = norm_estimate(talpha_operator(alpha), pair, NormMode::Strong, cfg);
    if (est.value > 0.0) {
      const StepFunction image(grid, oracle::talpha(alpha, est.witness));
      const double ratio = oracle::lp_norm(image, pair.u, 3.0) / oracle::lp_norm(est.density, pair.sigma, 2.0);
      ok[i] &= close_rel(ratio, est.value, 1e-9) && close_rel(est.value, row.strong, 1e-12);
    }
  });
  int violations = 0;
  double ws = 0.0, ww = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    violations += !(strong[static_cast<std::size_t>(i)] <= calibration::kStrongTesting);
    violations += !(weak[static_cast<std::size_t>(i)] <= calibration::kWeakTesting);
    ws = std::max(ws, strong[static_cast<std::size_t>(i)]);
    ww = std::max(ww, weak[static_cast<std::size_t>(i)]);
  }
  out.require(violations == 0, std::to_string(violations) + " violations");
  out.require(std::all_of(ok.begin(), ok.end(), [](char c) { return c; }), "oracle mismatch");
  out.detail += (out.detail.empty() ? "" : "; ") + std::string("strong max ") + num(ws) + " (C_emp " +
                num(calibration::kStrongTesting) + "), weak max " + num(ww) + " (C_emp' " +
                num(calibration::kWeakTesting) + ")";
  return out;
}

// 7. Truncated maximal shift dominates every level window; czo_star of chi_[0,1) at 2.
Outcome truncation() {
  Outcome out;
  const DyadicGrid grid(1, 2, -5);
  int failures = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(derive_seed(kSeed, "acceptance/truncation", i));
    const int m = rng.integer(0, 3), k = rng.integer(0, 3);
    const HaarShiftSpec spec = random_shift(grid, m, k, rng.next());
    const StepFunction f = random_step(grid, rng, {.nonnegative = false, .bumps = 10, .noise = 0.2});
    const Vector star = shift_truncated(spec, f).values();
    const auto parts = shift_level_parts(spec, f);
    for (int lo = grid.finest_level(); lo <= grid.top_level(); ++lo)
      for (int hi = lo; hi <= grid.top_level(); ++hi) {
        const Vector part = shift_partial(spec, f, {lo, hi}).values();
        failures += !(part.cwiseAbs().array() <= star.array()).all();
        // Direct sum of the level parts in the window.
        Vector direct = Vector::Zero(part.size());
        for (int l = lo; l <= hi; ++l) direct += parts[static_cast<std::size_t>(l - grid.finest_level())].values();
        failures += (direct - part).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + star.cwiseAbs().maxCoeff());
      }
  }
  out.require(failures == 0, std::to_string(failures) + " window failures");
  const DyadicGrid line(1, 3, -6);
  const StepFunction chi = StepFunction::interval(line, 0.0, 1.0);
  const double value = czo_star_at(chi, 2.0);
  out.require(std::abs(value - std::log(2.0)) <= 1e-6, "czo_star_at(2) = " + num(value));
  out.require(std::abs(oracle::czo_star_at(chi, 2.0) - value) <= 1e-12, "czo oracle mismatch");
  out.detail += (out.detail.empty() ? "" : "; ") + std::string("czo_star_at(2) ") + num(value);
  return out;
}

// 8. Every reference case twice serially and once in parallel.
Outcome determinism() {
  Outcome out;
  for (const auto& id : experiment_ids()) {
    ExperimentConfig cfg;
    cfg.experiment = id;
    const std::string a = report_to_json(run_experiment(cfg), false);
    const std::string b = report_to_json(run_experiment(cfg), false);
    cfg.threads = 4;
    const Report parallel = run_experiment(cfg);
    const std::string c = report_to_json(parallel, false);
    out.require(a == b, id + " differs between serial runs");
    out.require(a == c, id + " differs between serial and parallel runs");
    out.require(report_to_csv(run_experiment(cfg), false) == report_to_csv(parallel, false),
                id + " CSV differs between parallel runs");
  }
  if (out.pass) out.detail = std::to_string(experiment_ids().size()) + " cases identical";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"am-constant", am_constant},         {"example-pair", example_pair},
      {"hilbert-shift", hilbert_shift},     {"oracle-equivalence", oracle_equivalence},
      {"sparse-domination", sparse_domination}, {"testing-vs-norm", testing_vs_norm},
      {"truncation", truncation},           {"determinism", determinism}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all &= o.pass;
  }
  return all ? 0 : 1;
}
