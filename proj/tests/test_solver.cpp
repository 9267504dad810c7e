#include <doctest.h>

#include <cmath>
#include <random>

#include "pact/error.hpp"
#include "pact/solver.hpp"
#include "random_instances.hpp"

using namespace pact;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;  // root of 1/(1+q) = q
const ValuationSpec kLog{};
const CostCurve kSquare = CostCurve::quadratic(1.0, 0.0, 0.0);

TypeSet ironing_types() { return TypeSet({1.0, 1.1, 5.0}, {0.6, 0.2, 0.2}); }

}  // namespace

TEST_CASE("virtual weights") {
  const auto w3 = virtual_weights(TypeSet::uniform({1.0, 2.0, 3.0}));
  CHECK(w3[0] == doctest::Approx(-1.0 / 3));
  CHECK(w3[1] == doctest::Approx(1.0 / 3));
  CHECK(w3[2] == doctest::Approx(1.0));
  CHECK(virtual_weights(TypeSet({4.2}, {1.0}))[0] == 4.2);
  const auto w2 = virtual_weights(TypeSet::uniform({1.0, 2.0}));
  CHECK(w2[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(w2[1] == 1.0);
  const auto wi = virtual_weights(ironing_types());
  CHECK(wi[0] == doctest::Approx(0.56));
  CHECK(wi[1] == doctest::Approx(-0.56));
  CHECK(wi[2] == doctest::Approx(1.0));
}

TEST_CASE("prices from binding constraints") {
  const ValuationSpec sqrt_v{ValuationFamily::sqrt, 1.0};
  const double qs[] = {0.25, 0.64};
  const auto p = prices_from_binding(qs, TypeSet::uniform({1.0, 2.0}), sqrt_v);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(1.1));

  const double pooled[] = {0.3, 0.3};
  const auto pp = prices_from_binding(pooled, TypeSet::uniform({1.0, 2.0}), kLog);
  CHECK(pp[1] == pp[0]);

  const double single[] = {0.5};
  CHECK(prices_from_binding(single, TypeSet({1.0}, {1.0}), kLog)[0] ==
        doctest::Approx(0.405465108).epsilon(1e-9));

  const double decreasing[] = {0.6, 0.2};
  CHECK_THROWS_AS(prices_from_binding(decreasing, TypeSet::uniform({1.0, 2.0}), kLog),
                  ValidationError);
}

TEST_CASE("second best: two uniform types") {
  const auto r = solve_second_best(TypeSet::uniform({1.0, 2.0}), kLog, kSquare);
  CHECK(r.menu.items[0].q == 0.0);
  CHECK(r.menu.items[0].p == 0.0);
  CHECK(std::abs(r.menu.items[1].q - kGolden) < 1e-6);
  CHECK(std::abs(r.menu.items[1].p - 2.0 * std::log1p(kGolden)) < 1e-6);
  CHECK(std::abs(r.expected_profit - 0.290229) < 1e-6);
  CHECK(r.excluded == 1);
  CHECK(r.ir_bottom_binds);
  CHECK(r.adjacent_ic_binds == std::vector<bool>{true});
}

TEST_CASE("second best: a single type coincides with first best") {
  const TypeSet one({2.0}, {1.0});
  const auto sb = solve_second_best(one, kLog, kSquare);
  const auto fb = solve_first_best(one, kLog, kSquare);
  CHECK(std::abs(sb.menu.items[0].q - kGolden) < 1e-6);
  CHECK(std::abs(sb.menu.items[0].p - 0.962424) < 1e-6);
  CHECK(std::abs(sb.expected_profit - 0.580458) < 1e-6);
  CHECK(std::abs(sb.expected_profit - fb.expected_profit) < 1e-12);
}

TEST_CASE("second best: ironing pools a negative-weight type") {
  const auto r = solve_second_best(ironing_types(), kLog, kSquare);
  CHECK(r.menu.items[0].q == 0.0);
  CHECK(r.menu.items[1].q == 0.0);
  CHECK(r.menu.items[2].q == 1.0);
  CHECK(std::abs(r.menu.items[2].p - 5.0 * std::log(2.0)) < 1e-6);
  CHECK(std::abs(r.expected_profit - 0.493147) < 1e-6);
  REQUIRE(r.ironed_segments.size() == 1);
  CHECK(r.ironed_segments[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(r.per_type[0].block_id == r.per_type[1].block_id);
  CHECK(r.per_type[2].block_id != r.per_type[1].block_id);
  CHECK(r.strictly_increasing == std::vector<bool>{false, true});
}

TEST_CASE("second best: a fixed cost can make exclusion beat ironing") {
  // With C(0) > 0 the surplus at q -> 0+ is negative; the best menu must
  // compare serving against the null contract.
  const auto curve = CostCurve::quadratic(1.0, 0.0, 0.3);
  const auto types = TypeSet::uniform({1.0, 1.5, 4.0});
  const auto r = solve_second_best(types, kLog, curve);
  const auto oracle = brute_force_second_best(types, kLog, curve, 1e-3);
  CHECK(r.expected_profit >= oracle.expected_profit - 1e-9);
  CHECK(std::abs(r.expected_profit - oracle.expected_profit) <= 1e-3 * (1 + r.expected_profit));
}

TEST_CASE("second best: cost curve must be admissible") {
  CHECK_THROWS_AS(solve_second_best(TypeSet::uniform({1.0, 2.0}), kLog,
                                    CostCurve::quadratic(-1.0, 0.0, 1.0)),
                  SolverError);
  SolverOptions bad;
  bad.grid_step = 0.7;
  CHECK_THROWS_AS(solve_second_best(TypeSet::uniform({1.0, 2.0}), kLog, kSquare, bad),
                  ValidationError);
}

TEST_CASE("second best: concave cost uses the grid fallback") {
  // Increasing but concave on [0, 1].
  const auto curve = CostCurve::quadratic(-0.4, 1.0, 0.0);
  REQUIRE_FALSE(curve.convex());
  const auto types = TypeSet::uniform({1.0, 2.0, 3.0});
  const auto r = solve_second_best(types, kLog, curve);
  const auto oracle = brute_force_second_best(types, kLog, curve, 1e-3);
  CHECK(std::abs(r.expected_profit - oracle.expected_profit) <= 1e-3 * (1 + r.expected_profit));
}

TEST_CASE("first best") {
  const auto r = solve_first_best(TypeSet({2.0}, {1.0}), kLog, kSquare);
  CHECK(std::abs(r.menu.items[0].q - 0.618034) < 1e-6);
  CHECK(std::abs(r.menu.items[0].p - 0.962424) < 1e-6);
  CHECK(std::abs(r.per_type[0].margin - 0.580458) < 1e-6);
  CHECK(r.per_type[0].user_utility == 0.0);
  CHECK(r.virtual_weights.empty());

  const auto corner = solve_first_best(TypeSet({10.0}, {1.0}), kLog, kSquare);
  CHECK(corner.menu.items[0].q == 1.0);
  CHECK(corner.menu.items[0].p == doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-12));

  const auto free = solve_first_best(TypeSet({0.3}, {1.0}), kLog, CostCurve::quadratic(0, 0, 0));
  CHECK(free.menu.items[0].q == 1.0);

  // Serving below the fixed cost is not worth it.
  const auto null = solve_first_best(TypeSet({0.1}, {1.0}), kLog, CostCurve::quadratic(1, 0, 1));
  CHECK(null.menu.items[0].q == 0.0);
  CHECK(null.expected_profit == 0.0);
}

TEST_CASE("brute force oracle") {
  const auto worked = brute_force_second_best(TypeSet::uniform({1.0, 2.0}), kLog, kSquare, 1e-3);
  CHECK(std::abs(worked.expected_profit - 0.290229) < 1e-3);

  const TypeSet one({2.0}, {1.0});
  const auto single = brute_force_second_best(one, kLog, kSquare, 1e-3);
  CHECK(std::abs(single.expected_profit - solve_first_best(one, kLog, kSquare).expected_profit) <
        1e-3);

  const auto ironed = brute_force_second_best(ironing_types(), kLog, kSquare, 1e-3);
  CHECK(ironed.menu.items[0].q == 0.0);
  CHECK(ironed.menu.items[1].q == 0.0);
  CHECK(ironed.menu.items[2].q == 1.0);

  CHECK_THROWS_AS(
      brute_force_second_best(TypeSet::uniform({1, 2, 3, 4, 5}), kLog, kSquare, 1e-3),
      ValidationError);
}

TEST_CASE("brute force matches a literal enumeration on a coarse grid") {
  // Literal nested loops over nondecreasing grid pairs/triples.
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = pact::testing::random_instance(rng, 2, 3);
    const double step = 0.02;
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(i == 50 ? 1.0 : i * step);
    double best = -1e300;
    const std::size_t k = inst.types.size();
    std::vector<std::size_t> idx(k, 0);
    // Odometer over nondecreasing index tuples.
    while (true) {
      std::vector<double> qs(k);
      for (std::size_t i = 0; i < k; ++i) qs[i] = grid[idx[i]];
      const auto r = evaluate_allocation(qs, inst.types, inst.valuation, inst.curve);
      best = std::max(best, r.expected_profit);
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == grid.size() - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[pos - 1];
    }
    const auto dp = brute_force_second_best(inst.types, inst.valuation, inst.curve, step);
    CHECK(dp.expected_profit == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("solver invariants on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = pact::testing::random_instance(rng, 1, 6);
    const auto& types = inst.types;
    const auto sb = solve_second_best(types, inst.valuation, inst.curve);
    const auto fb = solve_first_best(types, inst.valuation, inst.curve);

    CHECK(verify_feasibility(sb.menu, types, inst.valuation).feasible);
    CHECK(std::abs(sb.expected_profit - sp_expected_profit(sb.menu, types, inst.curve)) <= 1e-12);

    double welfare = 0.0;
    for (std::size_t k = 0; k < types.size(); ++k)
      welfare += types.prob(k) * (types.theta(k) * inst.valuation(sb.per_type[k].q) -
                                  effective_cost(inst.curve, sb.per_type[k].q));
    CHECK(std::abs(sb.social_welfare - welfare) <= 1e-12 * std::max(1.0, std::abs(welfare)));

    CHECK(std::abs(sb.per_type[0].user_utility) <= kFeasibilityTolerance);
    for (std::size_t k = 1; k < types.size(); ++k) {
      CHECK(sb.menu.items[k].q >= sb.menu.items[k - 1].q);
      CHECK(sb.menu.items[k].p >= sb.menu.items[k - 1].p);
      if (sb.menu.items[k].q > 0.0) CHECK(sb.adjacent_ic_binds[k - 1]);
    }

    for (const auto& t : fb.per_type) CHECK(std::abs(t.user_utility) <= 1e-9);
    CHECK(fb.expected_profit >= sb.expected_profit - 1e-12);
    CHECK(fb.social_welfare >= sb.social_welfare - 1e-12);
  }
}

TEST_CASE("scaling valuation and cost together scales prices and profit") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = pact::testing::random_instance(rng, 1, 5);
    const double lambda = 0.5 + 3.0 * unit(rng);
    auto v = inst.valuation;
    v.scale *= lambda;
    const auto curve = CostCurve::quadratic(inst.curve.a * lambda, inst.curve.b * lambda,
                                            inst.curve.c0 * lambda);
    const auto base = solve_second_best(inst.types, inst.valuation, inst.curve);
    const auto scaled = solve_second_best(inst.types, v, curve);
    CHECK(scaled.expected_profit ==
          doctest::Approx(lambda * base.expected_profit).epsilon(1e-9));
    for (std::size_t k = 0; k < inst.types.size(); ++k) {
      CHECK(std::abs(scaled.menu.items[k].q - base.menu.items[k].q) < 1e-9);
      CHECK(scaled.menu.items[k].p ==
            doctest::Approx(lambda * base.menu.items[k].p).epsilon(1e-7));
    }
  }
}

TEST_CASE("solutions are reproducible bit for bit") {
  std::mt19937_64 rng(9);
  const auto inst = pact::testing::random_instance(rng, 4, 6);
  const auto a = solve_second_best(inst.types, inst.valuation, inst.curve);
  const auto b = solve_second_best(inst.types, inst.valuation, inst.curve);
  for (std::size_t k = 0; k < inst.types.size(); ++k) {
    CHECK(a.menu.items[k].q == b.menu.items[k].q);
    CHECK(a.menu.items[k].p == b.menu.items[k].p);
  }
  CHECK(a.expected_profit == b.expected_profit);
}
