#include "foodbank/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include <fmt/format.h>

namespace foodbank {

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double Scenario::total_supply() const {
  double total = 0.0;
  for (const auto& d : donors) {
    total = std::accumulate(d.supply.begin(), d.supply.end(), total);
  }
  return total;
}

SupplyTable supply_table(const Scenario& s) {
  SupplyTable table;
  table.reserve(s.donors.size());
  for (const auto& d : s.donors) table.push_back(d.supply);
  return table;
}

namespace {

class ViolationList {
 public:
  void add(std::string path, std::string rule, std::string message) {
    items_.push_back({std::move(path), std::move(rule), std::move(message)});
  }
  std::vector<Violation> take() { return std::move(items_); }

 private:
  std::vector<Violation> items_;
};

bool nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

void check_pounds_vector(ViolationList& out, const std::string& path,
                         const std::vector<double>& values, std::size_t types,
                         const char* rule) {
  if (values.size() != types) {
    out.add(path, "dimension",
            fmt::format("expected {} entries (one per food type), found {}",
                        types, values.size()));
    return;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!nonnegative(values[i])) {
      out.add(fmt::format("{}[{}]", path, i), rule,
              fmt::format("must be a finite value >= 0, found {}", values[i]));
    }
  }
}

bool inside(const Point& p, double size) {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 &&
         p.y >= 0.0 && p.x <= size && p.y <= size;
}

template <typename Items>
void check_unique_ids(ViolationList& out, const Items& items,
                      const char* collection) {
  std::set<int> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!seen.insert(items[i].id).second) {
      out.add(fmt::format("{}[{}].id", collection, i), "unique_id",
              fmt::format("duplicate id {}", items[i].id));
    }
  }
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
  ViolationList out;
  const std::size_t p = s.food_types.size();

  if (!(std::isfinite(s.region_size) && s.region_size > 0.0)) {
    out.add("region_size_km", "positive", "region size must be > 0");
  }
  if (s.food_types.empty()) {
    out.add("food_types", "nonempty", "at least one food type is required");
  }
  if (s.donors.empty()) {
    out.add("donors", "nonempty", "at least one donor is required");
  }
  if (s.agencies.empty()) {
    out.add("agencies", "nonempty", "at least one agency is required");
  }

  // Food type ids are 0..p-1 and double as column indices, so each type must
  // sit at the position matching its id.
  for (std::size_t i = 0; i < p; ++i) {
    if (s.food_types[i].id != static_cast<int>(i)) {
      out.add("food_types", "food_type_ids",
              fmt::format("ids must be 0..{} in order without gaps or duplicates",
                          p - 1));
      break;
    }
  }

  double weight_sum = 0.0;
  bool weights_in_range = true;
  for (std::size_t i = 0; i < p; ++i) {
    const double w = s.food_types[i].weight;
    if (!(std::isfinite(w) && w >= 0.0 && w <= 1.0)) {
      weights_in_range = false;
      out.add(fmt::format("food_types[{}].weight", i), "weight_range",
              fmt::format("weight must lie in [0, 1], found {}", w));
    }
    weight_sum += w;
  }
  if (p > 0 && weights_in_range &&
      std::abs(weight_sum - 1.0) > kWeightSumTolerance) {
    out.add("food_types.weight", "weight_sum",
            fmt::format("weights must sum to 1, found {:.12g}", weight_sum));
  }

  const auto& params = s.params;
  if (params.weights.size() != p) {
    out.add("params.weights", "dimension",
            fmt::format("expected {} weights, found {}", p,
                        params.weights.size()));
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      if (params.weights[i] != s.food_types[i].weight) {
        out.add("params.weights", "weights_consistent",
                "policy weights must equal the food type weights");
        break;
      }
    }
  }
  if (params.epsilon.size() != p) {
    out.add("params.epsilon", "dimension",
            fmt::format("expected {} entries (one per food type), found {}", p,
                        params.epsilon.size()));
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      if (!nonnegative(params.epsilon[i])) {
        out.add(fmt::format("params.epsilon[{}]", i), "epsilon_nonnegative",
                fmt::format("inequality aversion must be >= 0, found {}",
                            params.epsilon[i]));
      }
    }
  }
  if (!(std::isfinite(params.pounds_per_person) &&
        params.pounds_per_person > 0.0)) {
    out.add("params.pounds_per_person", "positive",
            "pounds per person must be > 0");
  }

  check_unique_ids(out, s.donors, "donors");
  for (std::size_t i = 0; i < s.donors.size(); ++i) {
    const auto& d = s.donors[i];
    const std::string base = fmt::format("donors[{}]", i);
    check_pounds_vector(out, base + ".supply", d.supply, p, "supply_nonnegative");
    if (!inside(d.location, s.region_size)) {
      out.add(base + ".location", "in_region",
              fmt::format("location ({}, {}) outside [0, {}]^2", d.location.x,
                          d.location.y, s.region_size));
    }
  }

  check_unique_ids(out, s.agencies, "agencies");
  for (std::size_t i = 0; i < s.agencies.size(); ++i) {
    const auto& a = s.agencies[i];
    const std::string base = fmt::format("agencies[{}]", i);
    check_pounds_vector(out, base + ".demand", a.demand, p, "demand_nonnegative");
    if (!nonnegative(a.storage_capacity)) {
      out.add(base + ".storage_capacity", "capacity_nonnegative",
              "storage capacity must be >= 0");
    }
    if (a.population < 0) {
      out.add(base + ".population", "count_nonnegative",
              "population must be >= 0");
    }
    if (a.poor_population < 0) {
      out.add(base + ".poor_population", "count_nonnegative",
              "poor population must be >= 0");
    } else if (a.poor_population > a.population) {
      out.add(base + ".poor_population", "poverty_count",
              fmt::format("poor population {} exceeds population {}",
                          a.poor_population, a.population));
    }
  }
  return out.take();
}

std::string format_violations(std::span<const Violation> violations) {
  std::string text;
  for (const auto& v : violations) {
    text += fmt::format("{}: [{}] {}\n", v.path, v.rule, v.message);
  }
  return text;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : InputError("invalid scenario:\n" + format_violations(violations)),
      violations_(std::move(violations)) {}

void require_valid(const Scenario& s) {
  auto violations = validate_scenario(s);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

std::vector<double> myplate_weights(std::string_view scheme) {
  if (scheme == "myplate4") return {0.30, 0.40, 0.10, 0.20};
  if (scheme == "uniform3") return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  throw InputError(fmt::format(
      "unknown weight preset '{}'; valid presets are: myplate4, uniform3",
      scheme));
}

std::vector<std::string> myplate_type_names() {
  return {"grains", "vegetables", "fruits", "protein"};
}

void set_weights(Scenario& s, std::span<const double> weights) {
  if (weights.size() != s.food_types.size()) {
    throw InputError(fmt::format("expected {} weights, got {}",
                                 s.food_types.size(), weights.size()));
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    s.food_types[i].weight = weights[i];
  }
  s.params.weights.assign(weights.begin(), weights.end());
}

}  // namespace foodbank
