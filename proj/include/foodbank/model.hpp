#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foodbank {

/// Thrown when an operation receives arguments outside its domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;  // km
  double y = 0.0;  // km

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct FoodType {
  int id = 0;
  std::string name;
  double weight = 0.0;  // nutrition weight of this type in the combined welfare
  int perishability_rank = 0;

  friend bool operator==(const FoodType&, const FoodType&) = default;
};

struct Donor {
  int id = 0;
  std::string name;
  Point location;
  std::vector<double> supply;  // pounds per food type
  int perishability_rank = 0;  // lower = more perishable, served first

  friend bool operator==(const Donor&, const Donor&) = default;
};

struct Agency {
  int id = 0;
  std::string name;
  Point location;
  std::vector<double> demand;  // pounds per food type
  double storage_capacity = 0.0;
  std::int64_t population = 0;
  std::int64_t poor_population = 0;

  friend bool operator==(const Agency&, const Agency&) = default;
};

struct PolicyParams {
  std::vector<double> epsilon;  // inequality aversion per food type
  std::vector<double> weights;  // authoritative copy of the food type weights
  double pounds_per_person = 4.0;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct Scenario {
  double region_size = 50.0;  // km, square region [0, size] x [0, size]
  std::vector<FoodType> food_types;
  std::vector<Donor> donors;
  std::vector<Agency> agencies;
  Point food_bank_location;
  PolicyParams params;

  std::size_t type_count() const { return food_types.size(); }
  double total_supply() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Per-donor, per-food-type pounds. Rows follow the scenario's donor order.
using SupplyTable = std::vector<std::vector<double>>;

SupplyTable supply_table(const Scenario& s);

struct Violation {
  std::string path;  // e.g. "agencies[2].poor_population"
  std::string rule;  // stable rule key, e.g. "poverty_count"
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Reports every invariant violation in `s`. An empty result means the
/// scenario is valid. Each broken rule on each field is reported once.
std::vector<Violation> validate_scenario(const Scenario& s);

std::string format_violations(std::span<const Violation> violations);

/// Raised by operations that require a valid scenario.
class ValidationError : public InputError {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Throws ValidationError listing every violation when `s` is invalid.
void require_valid(const Scenario& s);

/// Named nutrition weight presets: "myplate4" (grains, vegetables, fruits,
/// protein) and "uniform3".
std::vector<double> myplate_weights(std::string_view scheme);

/// Names matching the entries of the "myplate4" preset.
std::vector<std::string> myplate_type_names();

/// Copies `weights` onto both the food types and params.weights.
void set_weights(Scenario& s, std::span<const double> weights);

inline constexpr double kWeightSumTolerance = 1e-9;

}  // namespace foodbank
