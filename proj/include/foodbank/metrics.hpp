#pragma once

#include <cstdint>
#include <vector>

#include "foodbank/model.hpp"
#include "foodbank/policy.hpp"
#include "foodbank/welfare.hpp"

namespace foodbank {

/// How delivered pounds translate into people served.
enum class PeopleServedRule {
  /// A person needs pounds_per_person split by the nutrition weights; the
  /// scarcest food type limits the count.
  kNutritionBalanced,
  /// Total pounds divided by pounds_per_person, ignoring the type mix.
  kPoundsOnly,
};

struct MetricsOptions {
  PeopleServedRule people_rule = PeopleServedRule::kNutritionBalanced;
};

/// Excess deliveries below this many pounds are treated as rounding noise.
inline constexpr double kOverflowNoiseLbs = 1e-9;

struct AgencyMetrics {
  int agency_id = 0;
  std::vector<double> delivered;  // per food type
  double demand_lbs = 0.0;
  double delivered_lbs = 0.0;
  double consumed_lbs = 0.0;  // delivered pounds that met demand
  double overflow_lbs = 0.0;
  std::int64_t people_served = 0;
};

struct RunMetrics {
  double overflow_lbs = 0.0;
  double undistributed_lbs = 0.0;
  double consumed_lbs = 0.0;
  std::int64_t people_served = 0;
  std::vector<AgencyMetrics> per_agency;  // scenario order
  std::vector<WelfareReport> welfare_trace;

  double total_waste_lbs() const { return overflow_lbs + undistributed_lbs; }
};

struct OverflowSummary {
  double overflow_lbs = 0.0;
  double undistributed_lbs = 0.0;
};

/// Overflow is delivery beyond per-type demand; undistributed is the residual
/// supply never shipped.
OverflowSummary compute_overflow(const AllocationPlan& plan, const Scenario& s);

/// People fed at each agency, capped at the agency's population. Only pounds
/// that meet demand count; overflow feeds nobody.
std::int64_t compute_people_served(const AllocationPlan& plan, const Scenario& s,
                                   const MetricsOptions& options = {});

RunMetrics compute_metrics(const AllocationPlan& plan, const Scenario& s,
                           const MetricsOptions& options = {});

}  // namespace foodbank
