#include "foodbank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace foodbank {
namespace {

void check_dimensions(const AllocationPlan& plan, const Scenario& s) {
  if (plan.agency_count() != s.agencies.size() ||
      plan.donor_count() != s.donors.size() || plan.type_count() != s.type_count() ||
      plan.residual_supply.size() != s.donors.size()) {
    throw InputError(fmt::format(
        "plan dimensions {}x{}x{} do not match scenario {}x{}x{}",
        plan.agency_count(), plan.donor_count(), plan.type_count(),
        s.agencies.size(), s.donors.size(), s.type_count()));
  }
  for (const auto& row : plan.residual_supply) {
    if (row.size() != s.type_count()) {
      throw InputError("plan residual supply has the wrong number of food types");
    }
  }
}

double excess(double delivered, double demand) {
  const double over = delivered - demand;
  return over > kOverflowNoiseLbs ? over : 0.0;
}

// Slack absorbs representation error in quotients such as 400 / (4/3).
constexpr double kCountSlack = 1e-9;

std::int64_t people_at(const Scenario& s, const Agency& agency,
                       const std::vector<double>& consumed,
                       const MetricsOptions& options) {
  const auto& weights = s.params.weights;
  const double per_person = s.params.pounds_per_person;
  if (!(per_person > 0.0)) throw InputError("pounds_per_person must be > 0");

  double people = 0.0;
  if (options.people_rule == PeopleServedRule::kPoundsOnly) {
    double total = 0.0;
    for (double v : consumed) total += v;
    people = total / per_person;
  } else {
    people = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < consumed.size(); ++x) {
      if (weights[x] == 0.0) {
        if (agency.demand[x] > 0.0) {
          throw InputError(fmt::format(
              "food type {} has zero weight but agency {} demands it", x, agency.id));
        }
        continue;
      }
      people = std::min(people, consumed[x] / (weights[x] * per_person));
    }
    if (std::isinf(people)) people = 0.0;
  }
  const auto count = static_cast<std::int64_t>(std::floor(people + kCountSlack));
  return std::clamp<std::int64_t>(count, 0, agency.population);
}

}  // namespace

OverflowSummary compute_overflow(const AllocationPlan& plan, const Scenario& s) {
  check_dimensions(plan, s);
  OverflowSummary out;
  for (std::size_t a = 0; a < s.agencies.size(); ++a) {
    for (std::size_t x = 0; x < s.type_count(); ++x) {
      out.overflow_lbs += excess(plan.delivered(a, x), s.agencies[a].demand[x]);
    }
  }
  for (const auto& row : plan.residual_supply) {
    for (double v : row) out.undistributed_lbs += v;
  }
  return out;
}

std::int64_t compute_people_served(const AllocationPlan& plan, const Scenario& s,
                                   const MetricsOptions& options) {
  return compute_metrics(plan, s, options).people_served;
}

RunMetrics compute_metrics(const AllocationPlan& plan, const Scenario& s,
                           const MetricsOptions& options) {
  check_dimensions(plan, s);
  const auto totals = compute_overflow(plan, s);
  RunMetrics m;
  m.undistributed_lbs = totals.undistributed_lbs;
  for (std::size_t a = 0; a < s.agencies.size(); ++a) {
    const Agency& agency = s.agencies[a];
    AgencyMetrics am;
    am.agency_id = agency.id;
    std::vector<double> consumed(s.type_count());
    for (std::size_t x = 0; x < s.type_count(); ++x) {
      const double delivered = plan.delivered(a, x);
      const double over = excess(delivered, agency.demand[x]);
      am.delivered.push_back(delivered);
      am.delivered_lbs += delivered;
      am.demand_lbs += agency.demand[x];
      am.overflow_lbs += over;
      consumed[x] = delivered - over;
      am.consumed_lbs += consumed[x];
    }
    am.people_served = people_at(s, agency, consumed, options);
    m.overflow_lbs += am.overflow_lbs;
    m.consumed_lbs += am.consumed_lbs;
    m.people_served += am.people_served;
    m.per_agency.push_back(std::move(am));
  }
  for (const auto& decision : plan.decisions) m.welfare_trace.push_back(decision.welfare);
  return m;
}

}  // namespace foodbank
