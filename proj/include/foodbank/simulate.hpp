#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "foodbank/metrics.hpp"
#include "foodbank/model.hpp"
#include "foodbank/policy.hpp"

namespace foodbank {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

/// Parameters for randomly generated single-day scenarios.
struct GeneratorConfig {
  std::size_t n_donors = 10;
  std::size_t n_agencies = 5;
  std::size_t n_food_types = 3;
  Range supply_range{600.0, 800.0};    // pounds per type per donor
  Range demand_range{1000.0, 2000.0};  // total pounds per agency
  double region_size = 50.0;           // km
  std::vector<double> epsilon{1.5};    // one value broadcasts to every type
  std::vector<double> weights;         // empty = uniform 1/n_food_types
  Range capacity_range{1500.0, 3000.0};
  Range population_range{500.0, 5000.0};
  Range poverty_ratio_range{0.05, 0.5};
  double pounds_per_person = 4.0;
  std::uint64_t seed = 42;
};

/// Returns a description of every problem with `cfg`; empty when valid.
std::vector<std::string> validate_generator_config(const GeneratorConfig& cfg);

/// Portable random source. Draws come from std::mt19937_64, whose output
/// sequence is fixed by the standard; the conversions below are our own so
/// results do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double unit();
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer on [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer on [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of replication `index` under `master_seed`.
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index);

/// Deterministic function of cfg (including cfg.seed). Throws InputError when
/// cfg is invalid.
Scenario generate_scenario(const GeneratorConfig& cfg);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator; 0 when n = 1

  friend bool operator==(const Summary&, const Summary&) = default;
};

Summary summarize(const std::vector<double>& values);

struct PolicyStats {
  Summary overflow_lbs;
  Summary undistributed_lbs;
  Summary people_served;
  Summary total_waste_lbs;  // overflow + undistributed

  friend bool operator==(const PolicyStats&, const PolicyStats&) = default;
};

struct ComparisonStats {
  PolicyStats proposed;
  PolicyStats baseline;
  /// Per-replication proposed minus baseline.
  Summary overflow_difference;
  Summary people_served_difference;
  Summary total_waste_difference;
  std::size_t n_replications = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ComparisonStats&, const ComparisonStats&) = default;
};

struct SimulationOptions {
  PolicyOptions policy;
  MetricsOptions metrics;
  /// Worker threads for replications; 0 picks the hardware concurrency.
  unsigned threads = 1;
  /// Order in which replication indices are executed; empty = 0..n-1.
  /// Aggregation is always by index, so this never changes results.
  std::vector<std::size_t> execution_order;
};

struct ReplicationResult {
  double total_supply_lbs = 0.0;
  RunMetrics proposed;
  RunMetrics baseline;
};

/// Generates scenario `index` of the ladder under cfg.seed and runs both
/// policies on it.
ReplicationResult run_replication(const GeneratorConfig& cfg, std::size_t index,
                                  const SimulationOptions& options = {});

ComparisonStats run_replications(const GeneratorConfig& cfg, std::size_t n,
                                 const SimulationOptions& options = {});

struct SweepPoint {
  double epsilon = 0.0;
  ComparisonStats stats;
};

/// run_replications once per epsilon (broadcast to every food type) with the
/// same seed ladder, in input order.
std::vector<SweepPoint> epsilon_sweep(const GeneratorConfig& cfg,
                                      const std::vector<double>& epsilons,
                                      std::size_t n,
                                      const SimulationOptions& options = {});

}  // namespace foodbank
