#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foodbank/metrics.hpp"
#include "foodbank/model.hpp"
#include "foodbank/policy.hpp"
#include "foodbank/simulate.hpp"

namespace foodbank {

/// Unreadable files and documents that do not match the expected layout.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { kCsv, kJson };

// Scenario documents (JSON). Food types are reordered by id on load and the
// policy weights are taken from the food types.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Fixed-point text with six decimals, the precision of every output table.
std::string format_decimal(double value);

/// One line of a comparison table; `epsilon` is set for sweep tables.
struct ComparisonRow {
  std::optional<double> epsilon;
  std::string policy;
  double mean_overflow_lbs = 0.0;
  double sd_overflow_lbs = 0.0;
  double mean_undistributed_lbs = 0.0;
  double sd_undistributed_lbs = 0.0;
  double mean_people_served = 0.0;
  double sd_people_served = 0.0;
  std::size_t n_replications = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

/// Rows for the proposed then the baseline policy.
std::vector<ComparisonRow> comparison_rows(const ComparisonStats& stats,
                                           std::optional<double> epsilon = std::nullopt);
std::vector<ComparisonRow> sweep_rows(const std::vector<SweepPoint>& sweep);

/// Columns: [epsilon,]policy,mean_overflow_lbs,sd_overflow_lbs,
/// mean_undistributed_lbs,sd_undistributed_lbs,mean_people_served,
/// sd_people_served,n_replications,seed
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_to_json(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> parse_comparison_csv(std::string_view text);
std::vector<ComparisonRow> parse_comparison_json(std::string_view text);

/// Outcome of running one policy on one scenario.
struct RunReport {
  std::string policy;
  std::vector<int> visit_order;
  RunMetrics metrics;
  std::vector<AgencyDecision> decisions;
};

RunReport make_run_report(std::string policy, const AllocationPlan& plan,
                          const RunMetrics& metrics);

/// CSV: one row per agency in visit order, then a "total" row per policy.
std::string run_reports_to_csv(const std::vector<RunReport>& reports, std::size_t types);
std::string run_reports_to_json(const std::vector<RunReport>& reports);
std::vector<RunReport> parse_run_reports_csv(std::string_view text);
std::vector<RunReport> parse_run_reports_json(std::string_view text);

/// Splits comma-separated text into rows of fields. No quoting is supported;
/// none of the tables written here need it.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace foodbank
