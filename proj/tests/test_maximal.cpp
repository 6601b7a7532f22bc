#include "doctest.h"

#include <cmath>
#include <limits>

#include "dyadic/instances.hpp"
#include "dyadic/maximal.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

WeightPair example_pair(const DyadicGrid& g) {
  return {Weight(StepFunction::interval(g, 0.0, 1.0)), Weight(StepFunction::interval(g, 2.0, 3.0)),
          ExponentPair(2.0, 3.0)};
}

}  // namespace

TEST_SUITE("maximal") {

TEST_CASE("dyadic maximal of an indicator") {
  const DyadicGrid g(1, 3, 0);
  const auto m = dyadic_maximal(StepFunction::interval(g, 0.0, 1.0));
  const double expected[] = {1, 0.5, 0.25, 0.25, 0.125, 0.125, 0.125, 0.125};
  for (int c = 0; c < 8; ++c) CHECK(m[c] == expected[c]);
  CHECK(dyadic_maximal(StepFunction(g)).values().isZero());
}

TEST_CASE("dyadic maximal matches cube enumeration exactly") {
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const int dim = 1 + t % 2;
    const int depth = rng.integer(1, dim == 1 ? 8 : 4);
    const int top = rng.integer(-2, 2);
    const DyadicGrid h(dim, top, top - depth);
    Vector v(h.cell_count());
    for (Eigen::Index c = 0; c < v.size(); ++c) v[c] = rng.integer(-9, 9);
    const StepFunction f(h, v);
    CHECK(dyadic_maximal(f).values() == oracle::dyadic_maximal(f));
    const auto r = random_step(h, rng, {.nonnegative = false});
    CHECK(dyadic_maximal(r).values().isApprox(oracle::dyadic_maximal(r), 1e-13));
  }
}

TEST_CASE("dyadic maximal is homogeneous, monotone and dominates |f|") {
  const DyadicGrid g(2, 0, -3);
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_step(g, rng);
    const auto extra = random_step(g, rng);
    const double c = rng.uniform(0.1, 5.0);
    const auto mf = dyadic_maximal(f).values();
    CHECK(dyadic_maximal(f * c).values().isApprox(c * mf, 1e-14));
    CHECK(((dyadic_maximal(f + extra).values() - mf).array() >= -1e-12).all());
    CHECK(((mf - f.abs().values()).array() >= 0.0).all());
  }
}

TEST_CASE("exact Hardy-Littlewood maximal function in one dimension") {
  const DyadicGrid g(1, 3, -2);
  const auto chi = StepFunction::interval(g, 0.0, 1.0);
  CHECK(hl_maximal_at(chi, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(hl_maximal_at(chi, 0.5) == 1.0);
  for (double x : {1.5, 3.0, 5.25, 7.9}) CHECK(hl_maximal_at(chi, x) == doctest::Approx(1.0 / x).epsilon(1e-14));
}

TEST_CASE("Hardy-Littlewood maximal function matches interval enumeration") {
  Rng rng(13);
  for (int t = 0; t < 25; ++t) {
    const int top = rng.integer(-1, 2);
    const DyadicGrid h(1, top, top - rng.integer(1, 5), {rng.uniform(-1, 1)});
    const auto f = random_step(h, rng, {.nonnegative = false, .bumps = 4, .noise = 0.3});
    const IntervalMaximal m(f);
    const auto md = dyadic_maximal(f);
    for (int s = 0; s < 12; ++s) {
      const double x = h.shift()[0] + rng.uniform(-0.5, 1.5) * h.side(h.top_level());
      const double exact = oracle::hl_maximal_1d(f, x);
      CHECK(m(x) == doctest::Approx(exact).epsilon(1e-12));
      const auto cell = h.cell_at(std::span<const double>(&x, 1));
      if (cell >= 0) CHECK(m(x) >= md[cell] * (1 - 1e-12));
    }
  }
}

TEST_CASE("shifted-grid surrogate is comparable to M in one dimension") {
  const DyadicGrid g(1, 2, -4);
  Rng rng(17);
  CHECK(shifted_grid_comparability(1) == 6.0);
  CHECK(shifted_grid_comparability(2) == 36.0);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_step(g, rng);
    const double x = rng.uniform(0.0, 4.0);
    const double m = hl_maximal_at(f, x);
    const double s = shifted_grid_maximal_at(f, std::span<const double>(&x, 1));
    CHECK(s <= m * (1 + 1e-12));
    CHECK(m <= 6.0 * s * (1 + 1e-12));
  }
}

TEST_CASE("Sawyer testing on the example pair") {
  const DyadicGrid g(1, 3, 0);
  const auto pair = example_pair(g);
  const DyadicCube q{2, {0}};
  const double fwd = std::cbrt((0.25 - 1.0 / 9.0) / 2.0);
  const double dual = std::sqrt(0.5 - 1.0 / 3.0);
  const auto f16 = sawyer_test(pair, q, SawyerDirection::Forward);
  const auto d16 = sawyer_test(pair, q, SawyerDirection::Dual);
  CHECK(f16.value == doctest::Approx(fwd).epsilon(1e-3));
  CHECK(d16.value == doctest::Approx(dual).epsilon(1e-3));
  CHECK(std::abs(f16.value - fwd) <= 2 * f16.error_estimate + 1e-12);
  double prev_f = 1, prev_d = 1;
  for (int r : {4, 8, 16, 32, 64}) {
    const double ef = std::abs(sawyer_test(pair, q, SawyerDirection::Forward, {r}).value - fwd);
    const double ed = std::abs(sawyer_test(pair, q, SawyerDirection::Dual, {r}).value - dual);
    CHECK(ef < prev_f);
    CHECK(ed < prev_d);
    prev_f = ef;
    prev_d = ed;
  }
  const auto dyad = SawyerOptions{16, MaximalKind::Dyadic};
  CHECK(sawyer_test(pair, q, SawyerDirection::Forward, dyad).value == doctest::Approx(0.25));
  CHECK(sawyer_test(pair, q, SawyerDirection::Dual, dyad).value == doctest::Approx(0.25));
}

TEST_CASE("Sawyer testing conventions") {
  const DyadicGrid g(1, 3, 0);
  const auto pair = example_pair(g);
  // sigma vanishes on [0,1): 0/0.
  CHECK(sawyer_test(pair, DyadicCube{0, {0}}, SawyerDirection::Forward).value == 0.0);
  // u = 0 where sigma lives and vice versa.
  const WeightPair zero{Weight(StepFunction(g)), Weight(StepFunction(g)), ExponentPair(2, 3)};
  const auto cubes = g.all_cubes();
  const auto [c1, c2] = sawyer_constants(zero, cubes);
  CHECK(c1 == 0.0);
  CHECK(c2 == 0.0);
  const auto [e1, e2] = sawyer_constants(pair, cubes);
  CHECK(std::isfinite(e1));
  CHECK(std::isfinite(e2));
  const std::vector<DyadicCube> one{{2, {0}}};
  CHECK(sawyer_constants(pair, one).first == sawyer_test(pair, one[0], SawyerDirection::Forward).value);
  CHECK_THROWS_AS(sawyer_constants(pair, std::vector<DyadicCube>{}), PreconditionError);
}

TEST_CASE("pointwise bound for the example pair") {
  const DyadicGrid g(1, 3, -2);
  const auto pair = example_pair(g);
  for (const auto& q : g.all_cubes()) {
    const auto target = pair.sigma.function().restricted(q);
    const auto near = pair.u.function().restricted(q);
    if (integral(target) == 0.0 || integral(near) == 0.0) continue;
    for (int s = 0; s < 64; ++s) {
      const double x = (s + 0.5) / 64.0;
      CHECK(hl_maximal_at(target, x) <= integral(target));
    }
  }
}

}
