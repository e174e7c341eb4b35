#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "brute_force_oracle.hpp"
#include "foodbank/metrics.hpp"
#include "foodbank/policy.hpp"
#include "foodbank/simulate.hpp"
#include "support.hpp"

using namespace foodbank;
using foodbank::testing::agency;
using foodbank::testing::donor;
using foodbank::testing::empty_scenario;

namespace {

std::vector<int> ids_of(const std::vector<std::size_t>& positions, const auto& items) {
  std::vector<int> ids;
  for (auto p : positions) ids.push_back(items[p].id);
  return ids;
}

std::vector<std::vector<int>> subset_ids(const CombinationSet& set, std::span<const int> ids) {
  std::vector<std::vector<int>> out;
  for (const auto& subset : set.subsets) {
    std::vector<int> s;
    for (auto d : subset) s.push_back(ids[d]);
    out.push_back(s);
  }
  return out;
}

void check_conservation(const AllocationPlan& plan, const Scenario& s) {
  for (std::size_t d = 0; d < s.donors.size(); ++d) {
    for (std::size_t x = 0; x < s.type_count(); ++x) {
      double shipped = 0.0;
      for (std::size_t a = 0; a < s.agencies.size(); ++a) {
        CHECK(plan.shipment(a, d, x) >= 0.0);
        shipped += plan.shipment(a, d, x);
      }
      CHECK(plan.residual_supply[d][x] >= 0.0);
      CHECK(std::abs(shipped + plan.residual_supply[d][x] - s.donors[d].supply[x]) <= 1e-6);
    }
  }
}

CombinationEvaluation candidate(std::vector<int> ids, double combined) {
  CombinationEvaluation e;
  e.donor_subset = std::move(ids);
  e.welfare.combined = combined;
  return e;
}

}  // namespace

TEST_CASE("order_donors sorts by perishability then id") {
  std::vector<Donor> donors{donor(1, {1}, 2), donor(2, {1}, 0), donor(3, {1}, 1)};
  CHECK(ids_of(order_donors(donors), donors) == std::vector<int>{2, 3, 1});
  std::vector<Donor> one{donor(9, {1}, 4)};
  CHECK(ids_of(order_donors(one), one) == std::vector<int>{9});
  std::vector<Donor> tied{donor(5, {1}, 1), donor(4, {1}, 1)};
  CHECK(ids_of(order_donors(tied), tied) == std::vector<int>{4, 5});
}

TEST_CASE("order_agencies_by_poverty sorts by head-count ratio") {
  std::vector<Agency> agencies{agency(1, {1}, 1, 1000, 100), agency(2, {1}, 1, 1000, 400),
                               agency(3, {1}, 1, 400, 100)};
  CHECK(ids_of(order_agencies_by_poverty(agencies), agencies) == std::vector<int>{2, 3, 1});
  CHECK(ids_of(order_agencies_by_poverty(agencies, AgencyOrder::kPovertyAscending), agencies) ==
        std::vector<int>{1, 3, 2});

  std::vector<Agency> equal{agency(7, {1}, 1, 100, 10), agency(3, {1}, 1, 1000, 100)};
  CHECK(ids_of(order_agencies_by_poverty(equal), equal) == std::vector<int>{3, 7});
  std::vector<Agency> one{agency(4, {1}, 1)};
  CHECK(ids_of(order_agencies_by_poverty(one), one) == std::vector<int>{4});

  std::vector<Agency> empty_region{agency(1, {1}, 1, 0, 0)};
  CHECK_THROWS_AS(order_agencies_by_poverty(empty_region), InputError);
}

TEST_CASE("order_agencies_by_distance sorts nearest first") {
  const Point bank{0.0, 0.0};
  std::vector<Agency> agencies{agency(1, {1}, 1, 10, 1, {12.0, 0.0}),
                               agency(2, {1}, 1, 10, 1, {0.0, 3.5}),
                               agency(3, {1}, 1, 10, 1, {7.1, 0.0})};
  CHECK(ids_of(order_agencies_by_distance(agencies, bank), agencies) == std::vector<int>{2, 3, 1});

  agencies.push_back(agency(4, {1}, 1, 10, 1, bank));
  CHECK(order_agencies_by_distance(agencies, bank).front() == 3);

  std::vector<Agency> tied{agency(8, {1}, 1, 10, 1, {3.0, 4.0}),
                           agency(6, {1}, 1, 10, 1, {5.0, 0.0})};
  CHECK(ids_of(order_agencies_by_distance(tied, bank), tied) == std::vector<int>{6, 8});
}

TEST_CASE("enumerate_feasible_combinations") {
  SUBCASE("singletons infeasible, pair feasible") {
    const SupplyTable supply{{800.0, 800.0}, {800.0, 800.0}};
    const std::vector<int> ids{1, 2};
    const auto set = enumerate_feasible_combinations(supply, std::vector<double>{1000, 1000}, ids);
    CHECK_FALSE(set.partial);
    CHECK(subset_ids(set, ids) == std::vector<std::vector<int>>{{1, 2}});
  }
  SUBCASE("zero demand makes every subset feasible") {
    const SupplyTable supply{{1.0}, {2.0}, {0.0}, {4.0}};
    const std::vector<int> ids{1, 2, 3, 4};
    const auto set = enumerate_feasible_combinations(supply, std::vector<double>{0.0}, ids);
    CHECK(set.subsets.size() == 15);
  }
  SUBCASE("single type, brute-force subset sums") {
    // Expected list from an exhaustive subset-sum check: {1,2}, {1,3},
    // {2,3}, {1,2,3}.
    const SupplyTable supply{{700.0}, {500.0}, {900.0}};
    const std::vector<int> ids{1, 2, 3};
    const auto set = enumerate_feasible_combinations(supply, std::vector<double>{1100.0}, ids);
    CHECK(subset_ids(set, ids) ==
          std::vector<std::vector<int>>{{1, 2}, {1, 3}, {2, 3}, {1, 2, 3}});
  }
  SUBCASE("insufficient supply falls back to all donors") {
    const SupplyTable supply{{100.0, 900.0}, {200.0, 900.0}};
    const std::vector<int> ids{4, 2};
    const auto set = enumerate_feasible_combinations(supply, std::vector<double>{500, 10}, ids);
    CHECK(set.partial);
    CHECK(subset_ids(set, ids) == std::vector<std::vector<int>>{{2, 4}});
  }
  SUBCASE("order is by size then donor id, matching an exhaustive check") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 600.0);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + trial % 6;
      SupplyTable supply(n, std::vector<double>(2));
      std::vector<int> ids;
      for (std::size_t d = 0; d < n; ++d) {
        supply[d] = {u(gen), u(gen)};
        ids.push_back(static_cast<int>(100 - 7 * d));
      }
      const std::vector<double> demand{u(gen) * 1.5, u(gen)};
      std::vector<std::vector<int>> expected;
      for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double a = 0, b = 0;
        std::vector<int> s;
        for (std::size_t d = 0; d < n; ++d) {
          if (mask & (1u << d)) {
            a += supply[d][0];
            b += supply[d][1];
            s.push_back(ids[d]);
          }
        }
        std::sort(s.begin(), s.end());
        if (a >= demand[0] && b >= demand[1]) expected.push_back(s);
      }
      std::sort(expected.begin(), expected.end(), [](const auto& l, const auto& r) {
        return l.size() != r.size() ? l.size() < r.size() : l < r;
      });
      const auto set = enumerate_feasible_combinations(supply, demand, ids);
      if (expected.empty()) {
        CHECK(set.partial);
      } else {
        CHECK(subset_ids(set, ids) == expected);
      }
    }
  }
}

TEST_CASE("allocate_from_subset drains in perishability order") {
  const SupplyTable supply{{700.0}, {800.0}, {900.0}};
  const std::vector<std::size_t> drain{0, 1, 2};
  SUBCASE("spills over to the next donor") {
    const std::vector<std::size_t> subset{0, 1};
    const auto out = allocate_from_subset(subset, supply, std::vector<double>{1000.0}, drain);
    CHECK(out.shipments[0][0] == 700.0);
    CHECK(out.shipments[1][0] == 300.0);
    CHECK(out.shipments[2][0] == 0.0);
    CHECK(out.residuals == SupplyTable{{0.0}, {500.0}, {900.0}});
  }
  SUBCASE("zero demand ships nothing") {
    const std::vector<std::size_t> subset{0, 1, 2};
    const auto out = allocate_from_subset(subset, supply, std::vector<double>{0.0}, drain);
    CHECK(out.residuals == supply);
  }
  SUBCASE("partial fill ships everything available in the subset") {
    const SupplyTable small{{250.0}, {350.0}};
    const std::vector<std::size_t> subset{0, 1};
    const std::vector<std::size_t> order{1, 0};
    const auto out = allocate_from_subset(subset, small, std::vector<double>{1000.0}, order);
    CHECK(out.shipments[0][0] + out.shipments[1][0] == 600.0);
    CHECK(out.residuals == SupplyTable{{0.0}, {0.0}});
  }
  SUBCASE("respects the drain order, not the subset order") {
    const std::vector<std::size_t> subset{0, 2};
    const std::vector<std::size_t> order{2, 1, 0};
    const auto out = allocate_from_subset(subset, supply, std::vector<double>{1000.0}, order);
    CHECK(out.shipments[2][0] == 900.0);
    CHECK(out.shipments[0][0] == 100.0);
  }
}

TEST_CASE("select_best_combination") {
  std::vector<CombinationEvaluation> evals{candidate({1}, 3.2), candidate({2}, 7.7),
                                           candidate({3}, 5.0)};
  CHECK(select_best_combination(evals).donor_subset == std::vector<int>{2});
  std::vector<CombinationEvaluation> single{candidate({4, 5}, 1.0)};
  CHECK(select_best_combination(single).donor_subset == std::vector<int>{4, 5});
  std::vector<CombinationEvaluation> tied{candidate({1, 2, 3}, 9.0), candidate({2, 3}, 9.0),
                                          candidate({1, 4}, 9.0)};
  CHECK(select_best_combination(tied).donor_subset == std::vector<int>{1, 4});
  CHECK_THROWS_AS(select_best_combination(std::vector<CombinationEvaluation>{}), InputError);
}

TEST_CASE("run_proposed_policy small cases") {
  SUBCASE("one donor, one agency") {
    Scenario s = empty_scenario(2);
    s.donors.push_back(donor(1, {900.0, 700.0}, 0));
    s.agencies.push_back(agency(1, {400.0, 300.0}, 5000.0));
    const auto plan = run_proposed_policy(s);
    CHECK(plan.delivered(0, 0) == 400.0);
    CHECK(plan.delivered(0, 1) == 300.0);
    CHECK(plan.residual_supply == SupplyTable{{500.0, 400.0}});
    REQUIRE(plan.decisions.size() == 1);
    CHECK(plan.decisions[0].donor_subset == std::vector<int>{1});
  }
  SUBCASE("no supply") {
    Scenario s = empty_scenario(2);
    s.donors.push_back(donor(1, {0.0, 0.0}, 0));
    s.donors.push_back(donor(2, {0.0, 0.0}, 1));
    s.agencies.push_back(agency(1, {400.0, 300.0}, 5000.0));
    s.agencies.push_back(agency(2, {100.0, 300.0}, 5000.0));
    const auto plan = run_proposed_policy(s);
    CHECK(plan.delivered_total(0) == 0.0);
    CHECK(plan.delivered_total(1) == 0.0);
    CHECK(plan.decisions[0].partial);
  }
  SUBCASE("storage capacity caps the delivery, keeping the mix") {
    Scenario s = empty_scenario(2);
    s.donors.push_back(donor(1, {2000.0, 2000.0}, 0));
    s.agencies.push_back(agency(1, {900.0, 300.0}, 600.0));
    const auto plan = run_proposed_policy(s);
    CHECK(plan.delivered(0, 0) == doctest::Approx(450.0));
    CHECK(plan.delivered(0, 1) == doctest::Approx(150.0));
  }
  SUBCASE("prefers the combination that leaves residuals balanced") {
    // Demand 300 from one of two donors holding 1000 and 400: draining the
    // larger donor leaves (700, 400) instead of (1000, 100).
    Scenario s = empty_scenario(1);
    s.params.epsilon = {1.5};
    s.donors.push_back(donor(1, {400.0}, 0));
    s.donors.push_back(donor(2, {1000.0}, 1));
    s.agencies.push_back(agency(1, {300.0}, 5000.0));
    const auto plan = run_proposed_policy(s);
    CHECK(plan.decisions[0].donor_subset == std::vector<int>{2});
    CHECK(plan.residual_supply == SupplyTable{{400.0}, {700.0}});
  }
  SUBCASE("invalid scenarios are rejected") {
    Scenario s = empty_scenario(1);
    s.donors.push_back(donor(1, {-1.0}, 0));
    s.agencies.push_back(agency(1, {1.0}, 5.0));
    CHECK_THROWS_AS(run_proposed_policy(s), ValidationError);
    CHECK_THROWS_AS(run_baseline_policy(s), ValidationError);
  }
}

TEST_CASE("run_proposed_policy matches the exhaustive oracle") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = foodbank::testing::random_small_scenario(gen);
    const auto plan = run_proposed_policy(s);
    const auto oracle = foodbank::testing::oracle_proposed_policy(s, kWelfareTieTolerance);
    CAPTURE(trial);
    CHECK(plan.visit_order == oracle.visit_order);
    for (std::size_t i = 0; i < plan.decisions.size(); ++i) {
      CHECK(plan.decisions[i].donor_subset == oracle.chosen_subsets[i]);
    }
    for (std::size_t a = 0; a < s.agencies.size(); ++a) {
      for (std::size_t d = 0; d < s.donors.size(); ++d) {
        for (std::size_t x = 0; x < s.type_count(); ++x) {
          CHECK(plan.shipment(a, d, x) == doctest::Approx(oracle.shipments[a][d][x]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("run_baseline_policy") {
  SUBCASE("a single agency with room for everything gets everything") {
    Scenario s = empty_scenario(2);
    s.donors.push_back(donor(1, {300.0, 200.0}, 1));
    s.donors.push_back(donor(2, {100.0, 400.0}, 0));
    s.agencies.push_back(agency(1, {10.0, 10.0}, 5000.0));
    const auto plan = run_baseline_policy(s);
    CHECK(plan.delivered(0, 0) == 400.0);
    CHECK(plan.delivered(0, 1) == 600.0);
    CHECK(plan.residual_supply == SupplyTable{{0.0, 0.0}, {0.0, 0.0}});
    CHECK(plan.decisions.empty());
  }
  SUBCASE("equidistant agencies are served in id order") {
    Scenario s = empty_scenario(1);
    s.donors.push_back(donor(1, {1000.0}, 0));
    s.agencies.push_back(agency(9, {100.0}, 700.0, 10, 1, {30.0, 25.0}));
    s.agencies.push_back(agency(4, {100.0}, 700.0, 10, 1, {20.0, 25.0}));
    const auto plan = run_baseline_policy(s);
    CHECK(plan.visit_order == std::vector<int>{4, 9});
    CHECK(plan.delivered_total(1) == 700.0);
    CHECK(plan.delivered_total(0) == 300.0);
  }
  SUBCASE("ships to capacity, not demand") {
    Scenario s = empty_scenario(3);
    for (int d = 1; d <= 3; ++d) s.donors.push_back(donor(d, {1000.0, 1000.0, 1000.0}, d));
    s.agencies.push_back(agency(1, {400.0, 400.0, 400.0}, 1500.0));
    const auto plan = run_baseline_policy(s);
    CHECK(plan.delivered_total(0) == doctest::Approx(1500.0));
    const auto metrics = compute_metrics(plan, s);
    CHECK(metrics.overflow_lbs == doctest::Approx(300.0));
  }
  SUBCASE("food types follow the pooled supply mix") {
    Scenario s = empty_scenario(2);
    s.donors.push_back(donor(1, {300.0, 100.0}, 0));
    s.donors.push_back(donor(2, {300.0, 100.0}, 1));
    s.agencies.push_back(agency(1, {0.0, 0.0}, 400.0));
    const auto plan = run_baseline_policy(s);
    CHECK(plan.delivered(0, 0) == doctest::Approx(300.0));
    CHECK(plan.delivered(0, 1) == doctest::Approx(100.0));
    CHECK(plan.shipment(0, 0, 0) == doctest::Approx(300.0));
    CHECK(plan.shipment(0, 1, 0) == 0.0);
  }
}

TEST_CASE("plan invariants on generated scenarios") {
  GeneratorConfig cfg;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    cfg.seed = seed;
    const Scenario s = generate_scenario(cfg);
    const auto proposed = run_proposed_policy(s);
    const auto baseline = run_baseline_policy(s);
    check_conservation(proposed, s);
    check_conservation(baseline, s);

    std::vector<int> poverty_ids, distance_ids;
    for (auto a : order_agencies_by_poverty(s.agencies)) poverty_ids.push_back(s.agencies[a].id);
    for (auto a : order_agencies_by_distance(s.agencies, s.food_bank_location)) {
      distance_ids.push_back(s.agencies[a].id);
    }
    CHECK(proposed.visit_order == poverty_ids);
    CHECK(baseline.visit_order == distance_ids);

    for (std::size_t a = 0; a < s.agencies.size(); ++a) {
      for (std::size_t x = 0; x < s.type_count(); ++x) {
        CHECK(proposed.delivered(a, x) <= s.agencies[a].demand[x] + 1e-9);
      }
      CHECK(proposed.delivered_total(a) <= s.agencies[a].storage_capacity + 1e-9);
    }
    CHECK(run_proposed_policy(s) == proposed);
    CHECK(run_baseline_policy(s) == baseline);
  }
}

TEST_CASE("combination choices are invariant to scaling all pounds") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 60; ++trial) {
    const Scenario s = foodbank::testing::random_small_scenario(gen, 5, 3, 3);
    const auto base = run_proposed_policy(s);
    for (double c : {0.5, 2.0, 8.0, 3.7}) {
      Scenario scaled = s;
      for (auto& d : scaled.donors) {
        for (auto& v : d.supply) v *= c;
      }
      for (auto& a : scaled.agencies) {
        for (auto& v : a.demand) v *= c;
        a.storage_capacity *= c;
      }
      const auto plan = run_proposed_policy(scaled);
      CAPTURE(trial);
      CAPTURE(c);
      for (std::size_t i = 0; i < plan.decisions.size(); ++i) {
        CHECK(plan.decisions[i].donor_subset == base.decisions[i].donor_subset);
      }
    }
  }
}
