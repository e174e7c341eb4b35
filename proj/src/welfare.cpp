#include "foodbank/welfare.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "foodbank/model.hpp"

namespace foodbank {

double atkinson_welfare(std::span<const double> residuals, double epsilon) {
  if (residuals.empty()) {
    throw InputError("atkinson_welfare: residual vector is empty");
  }
  if (!(std::isfinite(epsilon) && epsilon >= 0.0)) {
    throw InputError(
        fmt::format("atkinson_welfare: epsilon must be >= 0, got {}", epsilon));
  }
  double largest = 0.0;
  bool has_zero = false;
  for (double r : residuals) {
    if (!(std::isfinite(r) && r >= 0.0)) {
      throw InputError(
          fmt::format("atkinson_welfare: residual must be >= 0, got {}", r));
    }
    largest = std::max(largest, r);
    has_zero = has_zero || r == 0.0;
  }
  if (largest == 0.0) return 0.0;
  if (has_zero && epsilon >= 1.0) return 0.0;

  // Work on r / max so that every log is <= 0; the mean is then evaluated as
  // 1 + mean(expm1(t log x)) to stay accurate as epsilon approaches 1.
  const double n = static_cast<double>(residuals.size());
  if (epsilon == 1.0) {
    double log_sum = 0.0;
    for (double r : residuals) log_sum += std::log(r / largest);
    return largest * std::exp(log_sum / n);
  }
  const double t = 1.0 - epsilon;
  double excess = 0.0;
  for (double r : residuals) {
    if (r == 0.0) {
      excess += -1.0;  // 0^t = 0 for t > 0
    } else {
      excess += std::expm1(t * std::log(r / largest));
    }
  }
  const double mean_excess = excess / n;
  if (mean_excess <= -1.0) return 0.0;
  return largest * std::exp(std::log1p(mean_excess) / t);
}

double combined_welfare(std::span<const double> per_type_welfare,
                        std::span<const double> weights) {
  if (per_type_welfare.empty() || per_type_welfare.size() != weights.size()) {
    throw InputError(fmt::format(
        "combined_welfare: {} welfare values but {} weights",
        per_type_welfare.size(), weights.size()));
  }
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (std::abs(weight_sum - 1.0) > kWeightSumTolerance) {
    throw InputError(fmt::format(
        "combined_welfare: weights must sum to 1, found {:.12g}", weight_sum));
  }
  double total = 0.0;
  for (std::size_t x = 0; x < weights.size(); ++x) {
    total += weights[x] * per_type_welfare[x];
  }
  return total;
}

WelfareReport evaluate_welfare(const std::vector<std::vector<double>>& residuals,
                               std::span<const double> epsilon,
                               std::span<const double> weights) {
  const std::size_t types = weights.size();
  if (epsilon.size() != types) {
    throw InputError("evaluate_welfare: epsilon and weights differ in length");
  }
  WelfareReport report;
  report.per_type.reserve(types);
  std::vector<double> column(residuals.size());
  for (std::size_t x = 0; x < types; ++x) {
    for (std::size_t d = 0; d < residuals.size(); ++d) {
      column[d] = residuals[d].at(x);
    }
    report.per_type.push_back(atkinson_welfare(column, epsilon[x]));
  }
  report.combined = combined_welfare(report.per_type, weights);
  return report;
}

double head_count_ratio(std::int64_t poor, std::int64_t total) {
  if (total < 1) {
    throw InputError(fmt::format(
        "head_count_ratio: population must be >= 1, got {}", total));
  }
  if (poor < 0 || poor > total) {
    throw InputError(fmt::format(
        "head_count_ratio: poor count {} outside [0, {}]", poor, total));
  }
  return static_cast<double>(poor) / static_cast<double>(total);
}

}  // namespace foodbank
