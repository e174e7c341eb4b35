#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace foodbank {

/// Per-food-type Atkinson welfare values and their weighted combination.
struct WelfareReport {
  std::vector<double> per_type;
  double combined = 0.0;

  friend bool operator==(const WelfareReport&, const WelfareReport&) = default;
};

/// Equally-distributed-equivalent (Atkinson) welfare of the residual pounds
/// left at each donor for one food type:
///
///   W = [ (1/n) * sum_d r_d^(1 - epsilon) ]^(1 / (1 - epsilon))
///
/// epsilon = 0 gives the arithmetic mean and epsilon = 1 the geometric mean.
/// With epsilon >= 1 any zero residual yields 0. Throws InputError on an empty
/// vector, a negative or non-finite residual, or a negative epsilon.
double atkinson_welfare(std::span<const double> residuals, double epsilon);

/// Weighted sum of per-type welfare. Weights must match in length and sum to
/// one within 1e-9.
double combined_welfare(std::span<const double> per_type_welfare,
                        std::span<const double> weights);

/// Evaluates every food type of a residual table (rows = donors, columns =
/// food types) and combines them.
WelfareReport evaluate_welfare(const std::vector<std::vector<double>>& residuals,
                               std::span<const double> epsilon,
                               std::span<const double> weights);

/// Poor / total. Requires total >= 1 and 0 <= poor <= total.
double head_count_ratio(std::int64_t poor, std::int64_t total);

}  // namespace foodbank
