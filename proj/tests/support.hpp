#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "foodbank/model.hpp"

namespace foodbank::testing {

/// Scenario with `types` uniform-weight food types and no donors or agencies.
inline Scenario empty_scenario(std::size_t types) {
  Scenario s;
  s.region_size = 50.0;
  s.food_bank_location = {25.0, 25.0};
  for (std::size_t x = 0; x < types; ++x) {
    const double w = 1.0 / static_cast<double>(types);
    s.food_types.push_back({static_cast<int>(x), "t" + std::to_string(x), w, static_cast<int>(x)});
    s.params.weights.push_back(w);
    s.params.epsilon.push_back(1.5);
  }
  return s;
}

inline Donor donor(int id, std::vector<double> supply, int rank, Point at = {10.0, 10.0}) {
  return {id, "d" + std::to_string(id), at, std::move(supply), rank};
}

inline Agency agency(int id, std::vector<double> demand, double capacity,
                     std::int64_t population = 1000, std::int64_t poor = 100,
                     Point at = {20.0, 20.0}) {
  return {id, "a" + std::to_string(id), at, std::move(demand), capacity, population, poor};
}

/// Small random scenarios that exercise partial fills, zero supplies and
/// binding capacities. Uses std distributions: test-only, not a golden source.
inline Scenario random_small_scenario(std::mt19937_64& gen, std::size_t max_donors = 4,
                                      std::size_t max_agencies = 3, std::size_t max_types = 3) {
  std::uniform_int_distribution<std::size_t> n_donors(1, max_donors);
  std::uniform_int_distribution<std::size_t> n_agencies(1, max_agencies);
  std::uniform_int_distribution<std::size_t> n_types(1, max_types);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double eps_choices[] = {0.0, 0.5, 1.0, 1.5, 2.0};

  const std::size_t p = n_types(gen);
  Scenario s = empty_scenario(p);
  std::vector<double> w(p);
  double sum = 0.0;
  for (auto& v : w) sum += (v = 0.1 + unit(gen));
  for (auto& v : w) v /= sum;
  sum = 0.0;
  for (std::size_t x = 0; x + 1 < p; ++x) sum += w[x];
  w[p - 1] = 1.0 - sum;
  set_weights(s, w);
  for (auto& e : s.params.epsilon) e = eps_choices[gen() % 5];

  const std::size_t nd = n_donors(gen);
  std::vector<int> ranks(nd);
  for (std::size_t d = 0; d < nd; ++d) ranks[d] = static_cast<int>(gen() % 3);
  for (std::size_t d = 0; d < nd; ++d) {
    std::vector<double> supply(p);
    for (auto& v : supply) v = unit(gen) < 0.2 ? 0.0 : 800.0 * unit(gen);
    s.donors.push_back(donor(static_cast<int>(d) * 3 + 2, supply, ranks[d],
                             {50.0 * unit(gen), 50.0 * unit(gen)}));
  }
  const std::size_t na = n_agencies(gen);
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<double> demand(p);
    for (auto& v : demand) v = unit(gen) < 0.1 ? 0.0 : 1200.0 * unit(gen);
    const auto pop = static_cast<std::int64_t>(100 + gen() % 2000);
    s.agencies.push_back(agency(static_cast<int>(na - a) * 5, demand, 500.0 + 2500.0 * unit(gen),
                                pop, static_cast<std::int64_t>(gen() % (pop + 1)),
                                {50.0 * unit(gen), 50.0 * unit(gen)}));
  }
  return s;
}

}  // namespace foodbank::testing
