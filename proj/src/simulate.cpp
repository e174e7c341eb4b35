#include "foodbank/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace foodbank {

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InputError("Rng::below: bound must be > 0");
  // Reject the final partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw InputError("Rng::integer: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(below(span));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index));
}

namespace {

void check_range(std::vector<std::string>& out, const char* name, const Range& r) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo >= 0.0 && r.lo <= r.hi)) {
    out.push_back(fmt::format("{} must satisfy 0 <= lo <= hi, got {}:{}", name, r.lo, r.hi));
  }
}

std::vector<double> resolved_weights(const GeneratorConfig& cfg) {
  if (!cfg.weights.empty()) return cfg.weights;
  return std::vector<double>(cfg.n_food_types, 1.0 / static_cast<double>(cfg.n_food_types));
}

std::vector<double> resolved_epsilon(const GeneratorConfig& cfg) {
  if (cfg.epsilon.size() == 1) {
    return std::vector<double>(cfg.n_food_types, cfg.epsilon.front());
  }
  return cfg.epsilon;
}

}  // namespace

std::vector<std::string> validate_generator_config(const GeneratorConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.n_donors < 1) out.push_back("n_donors must be >= 1");
  if (cfg.n_donors > kMaxEnumeratedDonors) {
    out.push_back(fmt::format("n_donors must be <= {}", kMaxEnumeratedDonors));
  }
  if (cfg.n_agencies < 1) out.push_back("n_agencies must be >= 1");
  if (cfg.n_food_types < 1) out.push_back("n_food_types must be >= 1");
  check_range(out, "supply_range", cfg.supply_range);
  check_range(out, "demand_range", cfg.demand_range);
  check_range(out, "capacity_range", cfg.capacity_range);
  check_range(out, "population_range", cfg.population_range);
  check_range(out, "poverty_ratio_range", cfg.poverty_ratio_range);
  if (cfg.poverty_ratio_range.hi > 1.0) out.push_back("poverty_ratio_range must lie within [0, 1]");
  if (cfg.population_range.hi < 1.0) out.push_back("population_range must allow at least one person");
  if (!(std::isfinite(cfg.region_size) && cfg.region_size > 0.0)) {
    out.push_back("region_size must be > 0");
  }
  if (!(std::isfinite(cfg.pounds_per_person) && cfg.pounds_per_person > 0.0)) {
    out.push_back("pounds_per_person must be > 0");
  }
  if (cfg.epsilon.empty() ||
      (cfg.epsilon.size() != 1 && cfg.epsilon.size() != cfg.n_food_types)) {
    out.push_back(fmt::format("epsilon needs 1 or {} values, got {}", cfg.n_food_types,
                              cfg.epsilon.size()));
  }
  for (double e : cfg.epsilon) {
    if (!(std::isfinite(e) && e >= 0.0)) out.push_back(fmt::format("epsilon must be >= 0, got {}", e));
  }
  if (!cfg.weights.empty()) {
    if (cfg.weights.size() != cfg.n_food_types) {
      out.push_back(fmt::format("weights needs {} values, got {}", cfg.n_food_types,
                                cfg.weights.size()));
    }
    double sum = 0.0;
    for (double w : cfg.weights) {
      if (!(std::isfinite(w) && w >= 0.0 && w <= 1.0)) {
        out.push_back(fmt::format("weight must lie in [0, 1], got {}", w));
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
      out.push_back(fmt::format("weights must sum to 1, found {:.12g}", sum));
    }
  }
  return out;
}

Scenario generate_scenario(const GeneratorConfig& cfg) {
  if (auto problems = validate_generator_config(cfg); !problems.empty()) {
    std::string text = "invalid generator config:";
    for (const auto& p : problems) text += "\n  " + p;
    throw InputError(text);
  }
  Rng rng(cfg.seed);
  const std::size_t p = cfg.n_food_types;
  const auto weights = resolved_weights(cfg);

  Scenario s;
  s.region_size = cfg.region_size;
  for (std::size_t x = 0; x < p; ++x) {
    s.food_types.push_back({static_cast<int>(x), fmt::format("food_{}", x), weights[x],
                            static_cast<int>(x)});
  }
  s.params.weights = weights;
  s.params.epsilon = resolved_epsilon(cfg);
  s.params.pounds_per_person = cfg.pounds_per_person;

  // Draw order is part of the reproducibility contract: food bank, donors,
  // donor perishability permutation, agencies.
  s.food_bank_location = {rng.uniform(0.0, cfg.region_size),
                          rng.uniform(0.0, cfg.region_size)};
  for (std::size_t d = 0; d < cfg.n_donors; ++d) {
    Donor donor;
    donor.id = static_cast<int>(d) + 1;
    donor.name = fmt::format("donor_{}", donor.id);
    donor.location = {rng.uniform(0.0, cfg.region_size), rng.uniform(0.0, cfg.region_size)};
    for (std::size_t x = 0; x < p; ++x) {
      donor.supply.push_back(rng.uniform(cfg.supply_range.lo, cfg.supply_range.hi));
    }
    s.donors.push_back(std::move(donor));
  }
  std::vector<int> ranks(cfg.n_donors);
  std::iota(ranks.begin(), ranks.end(), 0);
  for (std::size_t i = ranks.size(); i > 1; --i) {
    std::swap(ranks[i - 1], ranks[rng.below(i)]);
  }
  for (std::size_t d = 0; d < cfg.n_donors; ++d) s.donors[d].perishability_rank = ranks[d];

  const auto pop_lo = static_cast<std::int64_t>(std::ceil(std::max(1.0, cfg.population_range.lo)));
  const auto pop_hi = std::max(pop_lo, static_cast<std::int64_t>(std::floor(cfg.population_range.hi)));
  for (std::size_t a = 0; a < cfg.n_agencies; ++a) {
    Agency agency;
    agency.id = static_cast<int>(a) + 1;
    agency.name = fmt::format("agency_{}", agency.id);
    agency.location = {rng.uniform(0.0, cfg.region_size), rng.uniform(0.0, cfg.region_size)};
    const double total = rng.uniform(cfg.demand_range.lo, cfg.demand_range.hi);
    for (std::size_t x = 0; x < p; ++x) agency.demand.push_back(total * weights[x]);
    agency.storage_capacity = rng.uniform(cfg.capacity_range.lo, cfg.capacity_range.hi);
    agency.population = rng.integer(pop_lo, pop_hi);
    const double ratio = rng.uniform(cfg.poverty_ratio_range.lo, cfg.poverty_ratio_range.hi);
    agency.poor_population = std::min<std::int64_t>(
        agency.population,
        static_cast<std::int64_t>(std::llround(ratio * static_cast<double>(agency.population))));
    s.agencies.push_back(std::move(agency));
  }
  return s;
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw InputError("summarize: no values");
  const double n = static_cast<double>(values.size());
  Summary out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

ReplicationResult run_replication(const GeneratorConfig& cfg, std::size_t index,
                                  const SimulationOptions& options) {
  GeneratorConfig replica = cfg;
  replica.seed = replication_seed(cfg.seed, index);
  const Scenario s = generate_scenario(replica);
  ReplicationResult r;
  r.total_supply_lbs = s.total_supply();
  r.proposed = compute_metrics(run_proposed_policy(s, options.policy), s, options.metrics);
  r.baseline = compute_metrics(run_baseline_policy(s), s, options.metrics);
  return r;
}

namespace {

std::vector<std::size_t> execution_order(std::size_t n, const SimulationOptions& options) {
  if (options.execution_order.empty()) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
  }
  auto sorted = options.execution_order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i || sorted.size() != n) {
      throw InputError("execution_order must be a permutation of 0..n-1");
    }
  }
  return options.execution_order;
}

PolicyStats policy_stats(const std::vector<ReplicationResult>& results,
                         RunMetrics ReplicationResult::*policy) {
  std::vector<double> overflow, undistributed, people, waste;
  for (const auto& r : results) {
    const RunMetrics& m = r.*policy;
    overflow.push_back(m.overflow_lbs);
    undistributed.push_back(m.undistributed_lbs);
    people.push_back(static_cast<double>(m.people_served));
    waste.push_back(m.total_waste_lbs());
  }
  return {summarize(overflow), summarize(undistributed), summarize(people), summarize(waste)};
}

}  // namespace

ComparisonStats run_replications(const GeneratorConfig& cfg, std::size_t n,
                                 const SimulationOptions& options) {
  if (n < 1) throw InputError("run_replications: need at least one replication");
  const auto order = execution_order(n, options);
  std::vector<ReplicationResult> results(n);

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(n));

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::size_t failed_index = 0;
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      const std::size_t i = order[k];
      try {
        results[i] = run_replication(cfg, i, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure || i < failed_index) {
          failure = std::current_exception();
          failed_index = i;
        }
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw InputError(fmt::format("replication {}: {}", failed_index, e.what()));
    }
  }

  ComparisonStats stats;
  stats.n_replications = n;
  stats.seed = cfg.seed;
  stats.proposed = policy_stats(results, &ReplicationResult::proposed);
  stats.baseline = policy_stats(results, &ReplicationResult::baseline);
  std::vector<double> d_overflow, d_people, d_waste;
  for (const auto& r : results) {
    d_overflow.push_back(r.proposed.overflow_lbs - r.baseline.overflow_lbs);
    d_people.push_back(static_cast<double>(r.proposed.people_served - r.baseline.people_served));
    d_waste.push_back(r.proposed.total_waste_lbs() - r.baseline.total_waste_lbs());
  }
  stats.overflow_difference = summarize(d_overflow);
  stats.people_served_difference = summarize(d_people);
  stats.total_waste_difference = summarize(d_waste);
  return stats;
}

std::vector<SweepPoint> epsilon_sweep(const GeneratorConfig& cfg,
                                      const std::vector<double>& epsilons, std::size_t n,
                                      const SimulationOptions& options) {
  if (epsilons.empty()) throw InputError("epsilon_sweep: no epsilon values");
  for (double e : epsilons) {
    if (!(std::isfinite(e) && e >= 0.0)) {
      throw InputError(fmt::format("epsilon_sweep: epsilon must be >= 0, got {}", e));
    }
  }
  std::vector<SweepPoint> out;
  for (double e : epsilons) {
    GeneratorConfig point = cfg;
    point.epsilon = {e};
    out.push_back({e, run_replications(point, n, options)});
  }
  return out;
}

}  // namespace foodbank
