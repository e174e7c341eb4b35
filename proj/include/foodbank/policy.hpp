#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "foodbank/model.hpp"
#include "foodbank/welfare.hpp"

namespace foodbank {

/// Direction in which the proposed policy walks the head-count ratio.
enum class AgencyOrder { kPovertyDescending, kPovertyAscending };

struct PolicyOptions {
  AgencyOrder agency_order = AgencyOrder::kPovertyDescending;
};

/// The donor combination chosen for one agency by the proposed policy.
struct AgencyDecision {
  int agency_id = 0;
  std::vector<int> donor_subset;  // donor ids, ascending
  bool partial = false;           // no subset covered the demand
  WelfareReport welfare;
};

/// Shipped pounds per (agency, donor, food type), indexed by scenario
/// position, plus what is left at each donor.
class AllocationPlan {
 public:
  AllocationPlan() = default;
  AllocationPlan(const Scenario& s);

  double shipment(std::size_t agency, std::size_t donor, std::size_t type) const {
    return shipments_[index(agency, donor, type)];
  }
  double& shipment(std::size_t agency, std::size_t donor, std::size_t type) {
    return shipments_[index(agency, donor, type)];
  }

  /// Pounds of `type` received by the agency at position `agency`.
  double delivered(std::size_t agency, std::size_t type) const;
  double delivered_total(std::size_t agency) const;

  std::size_t agency_count() const { return agencies_; }
  std::size_t donor_count() const { return donors_; }
  std::size_t type_count() const { return types_; }

  SupplyTable residual_supply;
  std::vector<int> visit_order;  // agency ids in processing order
  std::vector<AgencyDecision> decisions;  // proposed policy only

  friend bool operator==(const AllocationPlan& a, const AllocationPlan& b) {
    return a.shipments_ == b.shipments_ && a.residual_supply == b.residual_supply &&
           a.visit_order == b.visit_order;
  }

 private:
  std::size_t index(std::size_t a, std::size_t d, std::size_t x) const {
    return (a * donors_ + d) * types_ + x;
  }

  std::size_t agencies_ = 0;
  std::size_t donors_ = 0;
  std::size_t types_ = 0;
  std::vector<double> shipments_;
};

/// Donor positions sorted by perishability rank ascending, ties by id.
std::vector<std::size_t> order_donors(std::span<const Donor> donors);

/// Agency positions sorted by head-count ratio (descending by default), ties by
/// id. Throws InputError when an agency has no population.
std::vector<std::size_t> order_agencies_by_poverty(
    std::span<const Agency> agencies,
    AgencyOrder order = AgencyOrder::kPovertyDescending);

/// Agency positions sorted by Euclidean distance to the food bank, ties by id.
std::vector<std::size_t> order_agencies_by_distance(std::span<const Agency> agencies,
                                                    const Point& food_bank);

struct CombinationSet {
  /// Donor positions per subset, each subset sorted by donor id. Subsets are
  /// listed by size, then lexicographically by donor id.
  std::vector<std::vector<std::size_t>> subsets;
  bool partial = false;  // fallback to all donors; demand cannot be covered
};

inline constexpr std::size_t kMaxEnumeratedDonors = 24;

/// Every donor subset whose pooled supply covers `demand` in every food type.
/// When none does, returns the single all-donors subset flagged partial.
CombinationSet enumerate_feasible_combinations(const SupplyTable& available,
                                               std::span<const double> demand,
                                               std::span<const int> donor_ids);

struct SubsetAllocation {
  SupplyTable shipments;  // per donor (scenario position) per type
  SupplyTable residuals;  // available - shipments, for every donor
};

/// Ships min(demand, subset supply) of each type, draining subset members in
/// `drain_order` (donor positions, most perishable first).
SubsetAllocation allocate_from_subset(std::span<const std::size_t> subset,
                                      const SupplyTable& available,
                                      std::span<const double> demand,
                                      std::span<const std::size_t> drain_order);

struct CombinationEvaluation {
  std::vector<int> donor_subset;  // donor ids, ascending
  SupplyTable shipments;
  SupplyTable tentative_residuals;
  WelfareReport welfare;
};

/// Combined welfare values within this relative distance of the best are
/// ties. Subsets that ship the same pounds can differ only by rounding (every
/// full fill ties exactly at epsilon = 0), and the tie-break must decide them.
inline constexpr double kWelfareTieTolerance = 1e-10;

/// Highest combined welfare; ties go to the smaller subset, then the
/// lexicographically smaller id list.
const CombinationEvaluation& select_best_combination(
    std::span<const CombinationEvaluation> evaluations);

/// Demand of `a` scaled down proportionally so its total fits the storage
/// capacity.
std::vector<double> capacity_limited_demand(const Agency& a);

/// Welfare-driven allocation: donors by perishability, agencies by poverty,
/// and for each agency the feasible donor combination that leaves the most
/// equitable residual supply.
AllocationPlan run_proposed_policy(const Scenario& s, const PolicyOptions& options = {});

/// Nearest-neighbour baseline: agencies by distance, each filled to storage
/// capacity from the pooled supply.
AllocationPlan run_baseline_policy(const Scenario& s);

}  // namespace foodbank
