#include "foodbank/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace foodbank {

AllocationPlan::AllocationPlan(const Scenario& s)
    : residual_supply(supply_table(s)),
      agencies_(s.agencies.size()),
      donors_(s.donors.size()),
      types_(s.type_count()),
      shipments_(agencies_ * donors_ * types_, 0.0) {}

double AllocationPlan::delivered(std::size_t agency, std::size_t type) const {
  double total = 0.0;
  for (std::size_t d = 0; d < donors_; ++d) total += shipment(agency, d, type);
  return total;
}

double AllocationPlan::delivered_total(std::size_t agency) const {
  double total = 0.0;
  for (std::size_t x = 0; x < types_; ++x) total += delivered(agency, x);
  return total;
}

namespace {

std::vector<std::size_t> positions(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

}  // namespace

std::vector<std::size_t> order_donors(std::span<const Donor> donors) {
  auto order = positions(donors.size());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& da = donors[a];
    const auto& db = donors[b];
    if (da.perishability_rank != db.perishability_rank) {
      return da.perishability_rank < db.perishability_rank;
    }
    return da.id < db.id;
  });
  return order;
}

std::vector<std::size_t> order_agencies_by_poverty(std::span<const Agency> agencies,
                                                   AgencyOrder order) {
  std::vector<double> ratio;
  ratio.reserve(agencies.size());
  for (const auto& a : agencies) {
    ratio.push_back(head_count_ratio(a.poor_population, a.population));
  }
  const bool descending = order == AgencyOrder::kPovertyDescending;
  auto out = positions(agencies.size());
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    if (ratio[a] != ratio[b]) {
      return descending ? ratio[a] > ratio[b] : ratio[a] < ratio[b];
    }
    return agencies[a].id < agencies[b].id;
  });
  return out;
}

std::vector<std::size_t> order_agencies_by_distance(std::span<const Agency> agencies,
                                                    const Point& food_bank) {
  std::vector<double> dist;
  dist.reserve(agencies.size());
  for (const auto& a : agencies) dist.push_back(distance(a.location, food_bank));
  auto out = positions(agencies.size());
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return agencies[a].id < agencies[b].id;
  });
  return out;
}

CombinationSet enumerate_feasible_combinations(const SupplyTable& available,
                                               std::span<const double> demand,
                                               std::span<const int> donor_ids) {
  const std::size_t n = available.size();
  if (n == 0 || donor_ids.size() != n) {
    throw InputError("enumerate_feasible_combinations: need one id per donor row");
  }
  if (n > kMaxEnumeratedDonors) {
    throw InputError(fmt::format(
        "enumerate_feasible_combinations: {} donors exceeds the exhaustive limit of {}",
        n, kMaxEnumeratedDonors));
  }
  auto by_id = positions(n);
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return donor_ids[a] < donor_ids[b]; });

  auto covers = [&](const std::vector<std::size_t>& subset) {
    for (std::size_t x = 0; x < demand.size(); ++x) {
      double pooled = 0.0;
      for (std::size_t d : subset) pooled += available[d].at(x);
      if (pooled < demand[x]) return false;
    }
    return true;
  };

  CombinationSet result;
  std::vector<std::size_t> pick;  // indices into by_id, strictly increasing
  std::vector<std::size_t> subset;
  for (std::size_t k = 1; k <= n; ++k) {
    pick.resize(k);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
      subset.clear();
      for (std::size_t i : pick) subset.push_back(by_id[i]);
      if (covers(subset)) result.subsets.push_back(subset);

      // Advance to the next k-combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  if (result.subsets.empty()) {
    result.subsets.push_back(by_id);
    result.partial = true;
  }
  return result;
}

SubsetAllocation allocate_from_subset(std::span<const std::size_t> subset,
                                      const SupplyTable& available,
                                      std::span<const double> demand,
                                      std::span<const std::size_t> drain_order) {
  if (subset.empty()) throw InputError("allocate_from_subset: empty subset");
  const std::size_t types = demand.size();
  std::vector<bool> member(available.size(), false);
  for (std::size_t d : subset) member.at(d) = true;

  SubsetAllocation out;
  out.shipments.assign(available.size(), std::vector<double>(types, 0.0));
  out.residuals = available;
  for (std::size_t x = 0; x < types; ++x) {
    double pooled = 0.0;
    for (std::size_t d : subset) pooled += available[d].at(x);
    double remaining = std::min(demand[x], pooled);
    for (std::size_t d : drain_order) {
      if (remaining <= 0.0) break;
      if (!member[d]) continue;
      const double take = std::min(remaining, available[d][x]);
      out.shipments[d][x] = take;
      out.residuals[d][x] = available[d][x] - take;
      remaining -= take;
    }
  }
  return out;
}

const CombinationEvaluation& select_best_combination(
    std::span<const CombinationEvaluation> evaluations) {
  if (evaluations.empty()) {
    throw InputError("select_best_combination: no candidates");
  }
  double top = evaluations.front().welfare.combined;
  for (const auto& e : evaluations) top = std::max(top, e.welfare.combined);
  const double floor = top - kWelfareTieTolerance * std::abs(top);

  const CombinationEvaluation* best = nullptr;
  for (const auto& candidate : evaluations) {
    if (candidate.welfare.combined < floor) continue;
    if (best == nullptr) {
      best = &candidate;
      continue;
    }
    const auto& ca = candidate.donor_subset;
    const auto& cb = best->donor_subset;
    if (ca.size() < cb.size() || (ca.size() == cb.size() && ca < cb)) best = &candidate;
  }
  return *best;
}

std::vector<double> capacity_limited_demand(const Agency& a) {
  std::vector<double> demand = a.demand;
  const double total = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (total > a.storage_capacity) {
    const double scale = total > 0.0 ? a.storage_capacity / total : 0.0;
    for (double& v : demand) v *= scale;
  }
  return demand;
}

AllocationPlan run_proposed_policy(const Scenario& s, const PolicyOptions& options) {
  require_valid(s);
  const auto donor_order = order_donors(s.donors);
  const auto agency_order = order_agencies_by_poverty(s.agencies, options.agency_order);
  std::vector<int> donor_ids;
  for (const auto& d : s.donors) donor_ids.push_back(d.id);

  AllocationPlan plan(s);
  SupplyTable available = supply_table(s);
  std::vector<CombinationEvaluation> evaluations;
  for (std::size_t a : agency_order) {
    const Agency& agency = s.agencies[a];
    plan.visit_order.push_back(agency.id);
    const auto demand = capacity_limited_demand(agency);
    const auto combinations = enumerate_feasible_combinations(available, demand, donor_ids);

    evaluations.clear();
    evaluations.reserve(combinations.subsets.size());
    for (const auto& subset : combinations.subsets) {
      auto allocation = allocate_from_subset(subset, available, demand, donor_order);
      CombinationEvaluation eval;
      for (std::size_t d : subset) eval.donor_subset.push_back(donor_ids[d]);
      eval.welfare = evaluate_welfare(allocation.residuals, s.params.epsilon,
                                      s.params.weights);
      eval.shipments = std::move(allocation.shipments);
      eval.tentative_residuals = std::move(allocation.residuals);
      evaluations.push_back(std::move(eval));
    }

    const auto& best = select_best_combination(evaluations);
    for (std::size_t d = 0; d < s.donors.size(); ++d) {
      for (std::size_t x = 0; x < s.type_count(); ++x) {
        plan.shipment(a, d, x) = best.shipments[d][x];
      }
    }
    available = best.tentative_residuals;
    plan.decisions.push_back(
        {agency.id, best.donor_subset, combinations.partial, best.welfare});
  }
  plan.residual_supply = std::move(available);
  return plan;
}

AllocationPlan run_baseline_policy(const Scenario& s) {
  require_valid(s);
  const auto donor_order = order_donors(s.donors);
  const auto agency_order = order_agencies_by_distance(s.agencies, s.food_bank_location);
  const std::size_t types = s.type_count();

  AllocationPlan plan(s);
  SupplyTable& available = plan.residual_supply;
  std::vector<double> pool(types);
  for (std::size_t a : agency_order) {
    plan.visit_order.push_back(s.agencies[a].id);
    double pool_total = 0.0;
    for (std::size_t x = 0; x < types; ++x) {
      pool[x] = 0.0;
      for (const auto& row : available) pool[x] += row[x];
      pool_total += pool[x];
    }
    if (pool_total <= 0.0) continue;
    const double amount = std::min(s.agencies[a].storage_capacity, pool_total);
    const bool take_everything = amount >= pool_total;

    for (std::size_t x = 0; x < types; ++x) {
      double remaining =
          take_everything ? pool[x] : std::min(pool[x], amount * pool[x] / pool_total);
      for (std::size_t d : donor_order) {
        if (remaining <= 0.0) break;
        const double take =
            take_everything ? available[d][x] : std::min(remaining, available[d][x]);
        plan.shipment(a, d, x) += take;
        available[d][x] -= take;
        remaining -= take;
      }
    }
  }
  return plan;
}

}  // namespace foodbank
