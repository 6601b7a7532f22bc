// calibrate: searches for the largest ratios behind the frozen constants in
// include/dyadic/calibration.hpp and prints them with the margined values.
//
//   sparse domination   every {0,1} and {-1,1} pattern on windows of up to 16
//                       cells, then hill climbing from random starts on 32
//                       and 64 cells, for H^d and random shifts of
//                       complexity <= 3
//   testing vs norm     random instances on 4, 8 and 16 cells, then hill
//                       climbing on the weights and coefficients of the worst
//                       instances
//
// Seeds come from the "calibration/..." streams, which no experiment uses.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dyadic/calibration.hpp"
#include "dyadic/instances.hpp"
#include "dyadic/io.hpp"
#include "dyadic/normest.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/shifts.hpp"
#include "dyadic/sparse.hpp"

using namespace dyadic;

namespace {

struct Op {
  std::string name;
  Operator apply;
};

std::vector<Op> operators(const DyadicGrid& grid, int count, std::uint64_t seed) {
  std::vector<Op> ops{{"hilbert", dyadic_hilbert}};
  const int max_kappa = std::min(3, grid.depth() - 1);
  for (int s = 0; s < count && max_kappa >= 0; ++s) {
    Rng rng(derive_seed(seed, "calibration/shift", static_cast<std::uint64_t>(s)));
    const int m = rng.integer(0, max_kappa), k = rng.integer(0, max_kappa);
    auto spec = std::make_shared<HaarShiftSpec>(random_shift(grid, m, k, rng.next()));
    ops.push_back({"shift(" + std::to_string(m) + "," + std::to_string(k) + ")",
                   [spec](const StepFunction& f) { return shift_apply(*spec, f); }});
  }
  return ops;
}

double domination(const Op& op, const StepFunction& f) {
  if (f.abs().values().sum() == 0.0) return 0.0;
  const SparseFamily family = sparse_from_stopping(f.abs(), f.grid().top_cube());
  return pointwise_domination_constant(op.apply, f, family);
}

double exhaustive_domination(const DyadicGrid& grid, const std::vector<Op>& ops) {
  const std::int64_t n = grid.cell_count();
  std::vector<double> best(ops.size(), 0.0);
  parallel_for(ops.size(), [&](std::size_t o) {
    for (int signed_values = 0; signed_values < 2; ++signed_values)
      for (std::int64_t mask = 1; mask < (std::int64_t{1} << n); ++mask) {
        Vector v(n);
        for (std::int64_t c = 0; c < n; ++c)
          v[c] = (mask >> c) & 1 ? 1.0 : (signed_values ? -1.0 : 0.0);
        best[o] = std::max(best[o], domination(ops[o], StepFunction(grid, v)));
      }
  });
  return *std::max_element(best.begin(), best.end());
}

double climb_domination(const DyadicGrid& grid, const std::vector<Op>& ops, int starts, int steps,
                        std::uint64_t seed) {
  std::vector<double> best(ops.size() * static_cast<std::size_t>(starts), 0.0);
  parallel_for(best.size(), [&](std::size_t job) {
    const Op& op = ops[job / static_cast<std::size_t>(starts)];
    Rng rng(derive_seed(seed, "calibration/climb", job));
    StepFunction f = random_step(grid, rng, {.nonnegative = false, .bumps = 10, .noise = 0.2});
    double value = domination(op, f);
    for (int s = 0; s < steps; ++s) {
      Vector v = f.values();
      const DyadicCube q = random_cube(grid, rng);
      const double a = rng.uniform(-1.0, 1.0) * std::exp(rng.uniform(-2.0, 2.0));
      if (rng.bernoulli(0.5)) {
        for (std::int64_t c : grid.cells_of(q)) v[c] += a;
      } else {
        v[static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(v.size())))] = a;
      }
      StepFunction g(grid, std::move(v));
      const double candidate = domination(op, g);
      if (candidate > value) {
        value = candidate;
        f = std::move(g);
      }
    }
    best[job] = value;
  });
  return *std::max_element(best.begin(), best.end());
}

struct Ratios {
  double strong = 0.0;
  double weak = 0.0;
};

Ratios testing_ratios(const CoefficientMap& alpha, const WeightPair& pair, std::uint64_t seed, int restarts) {
  AscentConfig cfg;
  cfg.seed = seed;
  cfg.restarts = restarts;
  cfg.max_iterations = 400;
  const TestingReportRow row = testing_vs_norm_report(alpha, pair, cfg);
  return {row.strong_ratio, row.weak_ratio};
}

struct Instance {
  CoefficientMap alpha;
  WeightPair pair;
};

Instance perturb(const Instance& in, Rng& rng) {
  const DyadicGrid& grid = in.alpha.grid();
  Instance out = in;
  switch (rng.integer(0, 2)) {
    case 0: {
      const DyadicCube q = random_cube(grid, rng);
      out.alpha.set(q, rng.bernoulli(0.3) ? 0.0 : 1.0 - rng.uniform());
      break;
    }
    default: {
      const bool target = rng.bernoulli(0.5);
      Vector v = (target ? in.pair.u : in.pair.sigma).function().values();
      const DyadicCube q = random_cube(grid, rng);
      const double factor = rng.bernoulli(0.2) ? 0.0 : std::exp(rng.uniform(-1.5, 1.5));
      for (std::int64_t c : grid.cells_of(q)) v[c] *= factor;
      if ((v.array() == 0.0).all()) v.setOnes();
      Weight w(StepFunction(grid, std::move(v)));
      (target ? out.pair.u : out.pair.sigma) = std::move(w);
    }
  }
  return out;
}

Ratios calibrate_testing(int instances, int climbs, int steps, std::uint64_t seed) {
  const ExponentPair exps(2.0, 3.0);
  std::vector<DyadicGrid> grids{DyadicGrid(1, 0, -2), DyadicGrid(1, 0, -3), DyadicGrid(1, 0, -4)};
  std::vector<Instance> pool;
  std::vector<Ratios> ratios(static_cast<std::size_t>(instances));
  for (int i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, "calibration/instance", static_cast<std::uint64_t>(i)));
    const DyadicGrid& grid = grids[static_cast<std::size_t>(i) % grids.size()];
    CoefficientMap alpha = random_coefficients(grid, rng, 0.5);
    WeightPair pair = random_pair(grid, exps, rng);
    pool.push_back({std::move(alpha), std::move(pair)});
  }
  parallel_for(pool.size(), [&](std::size_t i) {
    ratios[i] = testing_ratios(pool[i].alpha, pool[i].pair, derive_seed(seed, "calibration/ascent", i), 16);
  });
  Ratios best;
  for (const auto& r : ratios) {
    best.strong = std::max(best.strong, r.strong);
    best.weak = std::max(best.weak, r.weak);
  }
  std::fprintf(stderr, "  random instances: strong %.6f weak %.6f\n", best.strong, best.weak);

  // Hill climbing from the worst instances of each kind.
  for (int kind = 0; kind < 2; ++kind) {
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return kind == 0 ? ratios[a].strong > ratios[b].strong : ratios[a].weak > ratios[b].weak;
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(climbs)));
    std::vector<Ratios> climbed(order.size());
    parallel_for(order.size(), [&](std::size_t j) {
      Rng rng(derive_seed(seed, kind == 0 ? "calibration/climb-strong" : "calibration/climb-weak", j));
      Instance current = pool[order[j]];
      Ratios value = ratios[order[j]];
      for (int s = 0; s < steps; ++s) {
        Instance next = perturb(current, rng);
        const Ratios r = testing_ratios(next.alpha, next.pair, derive_seed(seed, "calibration/ascent", j), 8);
        if ((kind == 0 ? r.strong > value.strong : r.weak > value.weak)) {
          value = r;
          current = std::move(next);
        }
      }
      // Re-evaluate the final instance with the full search.
      const Ratios r = testing_ratios(current.alpha, current.pair, derive_seed(seed, "calibration/final", j), 32);
      climbed[j] = {std::max(r.strong, value.strong), std::max(r.weak, value.weak)};
    });
    for (const auto& r : climbed) {
      best.strong = std::max(best.strong, r.strong);
      best.weak = std::max(best.weak, r.weak);
    }
    std::fprintf(stderr, "  after %s climbing: strong %.6f weak %.6f\n", kind == 0 ? "strong" : "weak",
                 best.strong, best.weak);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Searches for the calibrated constants"};
  std::uint64_t seed = 20240601;
  int threads = 1, starts = 8, steps = 200, instances = 1500, climbs = 12, climb_steps = 150;
  bool quick = false;
  app.add_option("--seed", seed, "Calibration seed");
  app.add_option("--threads", threads, "Worker threads");
  app.add_option("--starts", starts, "Hill-climbing starts per operator");
  app.add_option("--steps", steps, "Hill-climbing steps per start");
  app.add_option("--instances", instances, "Random testing-vs-norm instances");
  app.add_option("--climbs", climbs, "Testing-vs-norm instances refined by hill climbing");
  app.add_option("--climb-steps", climb_steps, "Hill-climbing steps per refined instance");
  app.add_flag("--quick", quick, "Skip the exhaustive pattern sweep on 16 cells");
  CLI11_PARSE(app, argc, argv);
  set_default_threads(threads);

  std::fprintf(stderr, "sparse domination\n");
  double c_dom = 0.0;
  for (int depth = 1; depth <= (quick ? 3 : 4); ++depth) {
    const DyadicGrid grid(1, 0, -depth);
    const double v = exhaustive_domination(grid, operators(grid, 10, seed));
    std::fprintf(stderr, "  exhaustive, %d cells: %.6f\n", 1 << depth, v);
    c_dom = std::max(c_dom, v);
  }
  for (int depth = 5; depth <= 6; ++depth) {
    const DyadicGrid grid(1, 0, -depth);
    const double v = climb_domination(grid, operators(grid, 40, seed + depth), starts, steps, seed);
    std::fprintf(stderr, "  hill climbing, %d cells: %.6f\n", 1 << depth, v);
    c_dom = std::max(c_dom, v);
  }

  std::fprintf(stderr, "testing vs norm\n");
  const Ratios testing = calibrate_testing(instances, climbs, climb_steps, seed);

  const double m = calibration::kMargin;
  std::cout << "sparse_domination " << format_double(c_dom) << " frozen " << format_double(c_dom * m) << '\n';
  std::cout << "strong_testing " << format_double(testing.strong) << " frozen "
            << format_double(testing.strong * m) << '\n';
  std::cout << "weak_testing " << format_double(testing.weak) << " frozen " << format_double(testing.weak * m)
            << '\n';
  return 0;
}
