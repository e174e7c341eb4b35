#include "foodbank/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace foodbank {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

std::string format_decimal(double value) {
  std::string text = fmt::format("{:.6f}", value);
  if (text == "-0.000000") text = "0.000000";
  return text;
}

namespace {

// Six-decimal value as a double, so JSON tables carry exactly what the CSV
// tables print.
double rounded(double value) { return std::stod(format_decimal(value)); }

template <typename T>
T field(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) {
    throw IoError(fmt::format("{}: missing field '{}'", where, key));
  }
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

Point parse_point(const json& node, const std::string& where) {
  return {field<double>(node, "x", where), field<double>(node, "y", where)};
}

json point_json(const Point& p) { return {{"x", p.x}, {"y", p.y}}; }

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(fmt::format("{} is not valid JSON: {}", what, e.what()));
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  const json doc = parse_json(text, "scenario");
  Scenario s;
  s.region_size = field<double>(doc, "region_size_km", "scenario");
  s.food_bank_location =
      parse_point(field<json>(doc, "food_bank_location", "scenario"), "food_bank_location");

  const auto types = field<json>(doc, "food_types", "scenario");
  if (!types.is_array()) throw IoError("food_types must be an array");
  for (std::size_t i = 0; i < types.size(); ++i) {
    const std::string where = fmt::format("food_types[{}]", i);
    const auto& t = types[i];
    s.food_types.push_back({field<int>(t, "id", where), field<std::string>(t, "name", where),
                            field<double>(t, "weight", where),
                            field<int>(t, "perishability_rank", where)});
  }
  std::stable_sort(s.food_types.begin(), s.food_types.end(),
                   [](const FoodType& a, const FoodType& b) { return a.id < b.id; });
  for (const auto& t : s.food_types) s.params.weights.push_back(t.weight);

  const auto donors = field<json>(doc, "donors", "scenario");
  if (!donors.is_array()) throw IoError("donors must be an array");
  for (std::size_t i = 0; i < donors.size(); ++i) {
    const std::string where = fmt::format("donors[{}]", i);
    const auto& d = donors[i];
    s.donors.push_back({field<int>(d, "id", where), field<std::string>(d, "name", where),
                        parse_point(field<json>(d, "location", where), where + ".location"),
                        field<std::vector<double>>(d, "supply", where),
                        field<int>(d, "perishability_rank", where)});
  }

  const auto agencies = field<json>(doc, "agencies", "scenario");
  if (!agencies.is_array()) throw IoError("agencies must be an array");
  for (std::size_t i = 0; i < agencies.size(); ++i) {
    const std::string where = fmt::format("agencies[{}]", i);
    const auto& a = agencies[i];
    s.agencies.push_back({field<int>(a, "id", where), field<std::string>(a, "name", where),
                          parse_point(field<json>(a, "location", where), where + ".location"),
                          field<std::vector<double>>(a, "demand", where),
                          field<double>(a, "storage_capacity", where),
                          field<std::int64_t>(a, "population", where),
                          field<std::int64_t>(a, "poor_population", where)});
  }

  const auto params = field<json>(doc, "params", "scenario");
  const auto epsilon = field<json>(params, "epsilon", "params");
  if (epsilon.is_number()) {
    s.params.epsilon.assign(s.food_types.size(), epsilon.get<double>());
  } else {
    s.params.epsilon = field<std::vector<double>>(params, "epsilon", "params");
  }
  s.params.pounds_per_person = field<double>(params, "pounds_per_person", "params");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path));
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["region_size_km"] = s.region_size;
  doc["food_bank_location"] = point_json(s.food_bank_location);
  doc["food_types"] = json::array();
  for (const auto& t : s.food_types) {
    doc["food_types"].push_back({{"id", t.id},
                                 {"name", t.name},
                                 {"weight", t.weight},
                                 {"perishability_rank", t.perishability_rank}});
  }
  doc["donors"] = json::array();
  for (const auto& d : s.donors) {
    doc["donors"].push_back({{"id", d.id},
                             {"name", d.name},
                             {"location", point_json(d.location)},
                             {"supply", d.supply},
                             {"perishability_rank", d.perishability_rank}});
  }
  doc["agencies"] = json::array();
  for (const auto& a : s.agencies) {
    doc["agencies"].push_back({{"id", a.id},
                               {"name", a.name},
                               {"location", point_json(a.location)},
                               {"demand", a.demand},
                               {"storage_capacity", a.storage_capacity},
                               {"population", a.population},
                               {"poor_population", a.poor_population}});
  }
  doc["params"] = {{"epsilon", s.params.epsilon},
                   {"pounds_per_person", s.params.pounds_per_person}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV helpers

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::vector<std::string> fields;
      std::size_t pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        fields.emplace_back(line.substr(pos, comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
      rows.push_back(std::move(fields));
    }
    start = end + 1;
  }
  return rows;
}

namespace {

double to_double(const std::string& text, const std::string& column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(fmt::format("column '{}': '{}' is not a number", column, text));
  }
  return value;
}

template <typename Int>
Int to_integer(const std::string& text, const std::string& column) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(fmt::format("column '{}': '{}' is not an integer", column, text));
  }
  return value;
}

/// Header-indexed view of a CSV row.
class CsvRecord {
 public:
  CsvRecord(const std::map<std::string, std::size_t>& columns,
            const std::vector<std::string>& fields)
      : columns_(columns), fields_(fields) {}

  bool has(const std::string& name) const { return columns_.contains(name); }
  const std::string& text(const std::string& name) const {
    const auto it = columns_.find(name);
    if (it == columns_.end()) throw IoError(fmt::format("missing column '{}'", name));
    return fields_.at(it->second);
  }
  double number(const std::string& name) const { return to_double(text(name), name); }
  template <typename Int>
  Int integer(const std::string& name) const {
    return to_integer<Int>(text(name), name);
  }

 private:
  const std::map<std::string, std::size_t>& columns_;
  const std::vector<std::string>& fields_;
};

template <typename Visit>
void for_each_record(std::string_view text, Visit visit) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw IoError("empty CSV document");
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < rows[0].size(); ++i) columns[rows[0][i]] = i;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw IoError(fmt::format("CSV row {} has {} fields, header has {}", r,
                                rows[r].size(), rows[0].size()));
    }
    visit(CsvRecord(columns, rows[r]));
  }
}

constexpr const char* kComparisonColumns[] = {
    "policy",           "mean_overflow_lbs",  "sd_overflow_lbs",
    "mean_undistributed_lbs", "sd_undistributed_lbs", "mean_people_served",
    "sd_people_served", "n_replications",     "seed"};

ComparisonRow make_row(std::string policy, const PolicyStats& p, const ComparisonStats& s,
                       std::optional<double> epsilon) {
  ComparisonRow row;
  row.epsilon = epsilon;
  row.policy = std::move(policy);
  row.mean_overflow_lbs = p.overflow_lbs.mean;
  row.sd_overflow_lbs = p.overflow_lbs.sd;
  row.mean_undistributed_lbs = p.undistributed_lbs.mean;
  row.sd_undistributed_lbs = p.undistributed_lbs.sd;
  row.mean_people_served = p.people_served.mean;
  row.sd_people_served = p.people_served.sd;
  row.n_replications = s.n_replications;
  row.seed = s.seed;
  return row;
}

bool is_sweep(const std::vector<ComparisonRow>& rows) {
  const bool any = std::any_of(rows.begin(), rows.end(),
                               [](const ComparisonRow& r) { return r.epsilon.has_value(); });
  const bool all = std::all_of(rows.begin(), rows.end(),
                               [](const ComparisonRow& r) { return r.epsilon.has_value(); });
  if (any && !all) throw IoError("comparison rows mix sweep and non-sweep entries");
  return any;
}

}  // namespace

std::vector<ComparisonRow> comparison_rows(const ComparisonStats& stats,
                                           std::optional<double> epsilon) {
  return {make_row("proposed", stats.proposed, stats, epsilon),
          make_row("baseline", stats.baseline, stats, epsilon)};
}

std::vector<ComparisonRow> sweep_rows(const std::vector<SweepPoint>& sweep) {
  std::vector<ComparisonRow> rows;
  for (const auto& point : sweep) {
    for (auto& row : comparison_rows(point.stats, point.epsilon)) rows.push_back(std::move(row));
  }
  return rows;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
  const bool sweep = is_sweep(rows);
  std::string out = sweep ? "epsilon," : "";
  out += fmt::format("{}\n", fmt::join(kComparisonColumns, ","));
  for (const auto& r : rows) {
    if (sweep) out += format_decimal(*r.epsilon) + ",";
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.policy,
                       format_decimal(r.mean_overflow_lbs), format_decimal(r.sd_overflow_lbs),
                       format_decimal(r.mean_undistributed_lbs),
                       format_decimal(r.sd_undistributed_lbs),
                       format_decimal(r.mean_people_served),
                       format_decimal(r.sd_people_served), r.n_replications, r.seed);
  }
  return out;
}

std::string comparison_to_json(const std::vector<ComparisonRow>& rows) {
  const bool sweep = is_sweep(rows);
  json doc = json::array();
  for (const auto& r : rows) {
    json row = json::object();
    if (sweep) row["epsilon"] = rounded(*r.epsilon);
    row["policy"] = r.policy;
    row["mean_overflow_lbs"] = rounded(r.mean_overflow_lbs);
    row["sd_overflow_lbs"] = rounded(r.sd_overflow_lbs);
    row["mean_undistributed_lbs"] = rounded(r.mean_undistributed_lbs);
    row["sd_undistributed_lbs"] = rounded(r.sd_undistributed_lbs);
    row["mean_people_served"] = rounded(r.mean_people_served);
    row["sd_people_served"] = rounded(r.sd_people_served);
    row["n_replications"] = r.n_replications;
    row["seed"] = r.seed;
    doc.push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::vector<ComparisonRow> parse_comparison_csv(std::string_view text) {
  std::vector<ComparisonRow> rows;
  for_each_record(text, [&](const CsvRecord& rec) {
    ComparisonRow r;
    if (rec.has("epsilon")) r.epsilon = rec.number("epsilon");
    r.policy = rec.text("policy");
    r.mean_overflow_lbs = rec.number("mean_overflow_lbs");
    r.sd_overflow_lbs = rec.number("sd_overflow_lbs");
    r.mean_undistributed_lbs = rec.number("mean_undistributed_lbs");
    r.sd_undistributed_lbs = rec.number("sd_undistributed_lbs");
    r.mean_people_served = rec.number("mean_people_served");
    r.sd_people_served = rec.number("sd_people_served");
    r.n_replications = rec.integer<std::size_t>("n_replications");
    r.seed = rec.integer<std::uint64_t>("seed");
    rows.push_back(std::move(r));
  });
  return rows;
}

std::vector<ComparisonRow> parse_comparison_json(std::string_view text) {
  const json doc = parse_json(text, "comparison table");
  if (!doc.is_array()) throw IoError("comparison table must be a JSON array");
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& node = doc[i];
    const std::string where = fmt::format("row {}", i);
    ComparisonRow r;
    if (node.contains("epsilon")) r.epsilon = field<double>(node, "epsilon", where);
    r.policy = field<std::string>(node, "policy", where);
    r.mean_overflow_lbs = field<double>(node, "mean_overflow_lbs", where);
    r.sd_overflow_lbs = field<double>(node, "sd_overflow_lbs", where);
    r.mean_undistributed_lbs = field<double>(node, "mean_undistributed_lbs", where);
    r.sd_undistributed_lbs = field<double>(node, "sd_undistributed_lbs", where);
    r.mean_people_served = field<double>(node, "mean_people_served", where);
    r.sd_people_served = field<double>(node, "sd_people_served", where);
    r.n_replications = field<std::size_t>(node, "n_replications", where);
    r.seed = field<std::uint64_t>(node, "seed", where);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Single-run reports

RunReport make_run_report(std::string policy, const AllocationPlan& plan,
                          const RunMetrics& metrics) {
  return {std::move(policy), plan.visit_order, metrics, plan.decisions};
}

namespace {

const AgencyMetrics& agency_metrics(const RunMetrics& m, int id) {
  for (const auto& a : m.per_agency) {
    if (a.agency_id == id) return a;
  }
  throw IoError(fmt::format("no metrics for agency {}", id));
}

}  // namespace

std::string run_reports_to_csv(const std::vector<RunReport>& reports, std::size_t types) {
  std::string out = "policy,agency_id,visit_position,demand_lbs,delivered_lbs";
  for (std::size_t x = 0; x < types; ++x) out += fmt::format(",delivered_{}", x);
  out += ",consumed_lbs,overflow_lbs,people_served,undistributed_lbs\n";
  for (const auto& report : reports) {
    const auto& m = report.metrics;
    for (std::size_t pos = 0; pos < report.visit_order.size(); ++pos) {
      const auto& a = agency_metrics(m, report.visit_order[pos]);
      out += fmt::format("{},{},{},{},{}", report.policy, a.agency_id, pos,
                         format_decimal(a.demand_lbs), format_decimal(a.delivered_lbs));
      for (std::size_t x = 0; x < types; ++x) out += "," + format_decimal(a.delivered.at(x));
      out += fmt::format(",{},{},{},\n", format_decimal(a.consumed_lbs),
                         format_decimal(a.overflow_lbs), a.people_served);
    }
    double demand = 0.0;
    double delivered = 0.0;
    std::vector<double> by_type(types, 0.0);
    for (const auto& a : m.per_agency) {
      demand += a.demand_lbs;
      delivered += a.delivered_lbs;
      for (std::size_t x = 0; x < types; ++x) by_type[x] += a.delivered.at(x);
    }
    out += fmt::format("{},total,,{},{}", report.policy, format_decimal(demand),
                       format_decimal(delivered));
    for (double v : by_type) out += "," + format_decimal(v);
    out += fmt::format(",{},{},{},{}\n", format_decimal(m.consumed_lbs),
                       format_decimal(m.overflow_lbs), m.people_served,
                       format_decimal(m.undistributed_lbs));
  }
  return out;
}

std::string run_reports_to_json(const std::vector<RunReport>& reports) {
  json runs = json::array();
  for (const auto& report : reports) {
    const auto& m = report.metrics;
    json per_agency = json::array();
    for (const auto& a : m.per_agency) {
      const auto pos = std::find(report.visit_order.begin(), report.visit_order.end(),
                                 a.agency_id) - report.visit_order.begin();
      json delivered = json::array();
      for (double v : a.delivered) delivered.push_back(rounded(v));
      per_agency.push_back({{"agency_id", a.agency_id},
                            {"visit_position", pos},
                            {"demand_lbs", rounded(a.demand_lbs)},
                            {"delivered_lbs", rounded(a.delivered_lbs)},
                            {"delivered_by_type", delivered},
                            {"consumed_lbs", rounded(a.consumed_lbs)},
                            {"overflow_lbs", rounded(a.overflow_lbs)},
                            {"people_served", a.people_served}});
    }
    json trace = json::array();
    for (const auto& d : report.decisions) {
      json per_type = json::array();
      for (double v : d.welfare.per_type) per_type.push_back(rounded(v));
      trace.push_back({{"agency_id", d.agency_id},
                       {"donor_subset", d.donor_subset},
                       {"partial", d.partial},
                       {"per_type", per_type},
                       {"combined", rounded(d.welfare.combined)}});
    }
    runs.push_back({{"policy", report.policy},
                    {"visit_order", report.visit_order},
                    {"overflow_lbs", rounded(m.overflow_lbs)},
                    {"undistributed_lbs", rounded(m.undistributed_lbs)},
                    {"consumed_lbs", rounded(m.consumed_lbs)},
                    {"people_served", m.people_served},
                    {"per_agency", per_agency},
                    {"welfare_trace", trace}});
  }
  return json{{"runs", runs}}.dump(2) + "\n";
}

std::vector<RunReport> parse_run_reports_csv(std::string_view text) {
  std::vector<RunReport> reports;
  const auto rows = parse_csv(text);
  if (rows.empty()) throw IoError("empty CSV document");
  std::size_t types = 0;
  while (std::find(rows[0].begin(), rows[0].end(), fmt::format("delivered_{}", types)) !=
         rows[0].end()) {
    ++types;
  }
  for_each_record(text, [&](const CsvRecord& rec) {
    const std::string& policy = rec.text("policy");
    if (reports.empty() || reports.back().policy != policy) {
      reports.push_back(RunReport{policy, {}, {}, {}});
    }
    RunReport& report = reports.back();
    if (rec.text("agency_id") == "total") {
      report.metrics.consumed_lbs = rec.number("consumed_lbs");
      report.metrics.overflow_lbs = rec.number("overflow_lbs");
      report.metrics.people_served = rec.integer<std::int64_t>("people_served");
      report.metrics.undistributed_lbs = rec.number("undistributed_lbs");
      return;
    }
    AgencyMetrics a;
    a.agency_id = rec.integer<int>("agency_id");
    a.demand_lbs = rec.number("demand_lbs");
    a.delivered_lbs = rec.number("delivered_lbs");
    for (std::size_t x = 0; x < types; ++x) {
      a.delivered.push_back(rec.number(fmt::format("delivered_{}", x)));
    }
    a.consumed_lbs = rec.number("consumed_lbs");
    a.overflow_lbs = rec.number("overflow_lbs");
    a.people_served = rec.integer<std::int64_t>("people_served");
    report.visit_order.push_back(a.agency_id);
    report.metrics.per_agency.push_back(std::move(a));
  });
  return reports;
}

std::vector<RunReport> parse_run_reports_json(std::string_view text) {
  const json doc = parse_json(text, "run report");
  const auto runs = field<json>(doc, "runs", "report");
  std::vector<RunReport> reports;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string where = fmt::format("runs[{}]", i);
    const auto& node = runs[i];
    RunReport r;
    r.policy = field<std::string>(node, "policy", where);
    r.visit_order = field<std::vector<int>>(node, "visit_order", where);
    r.metrics.overflow_lbs = field<double>(node, "overflow_lbs", where);
    r.metrics.undistributed_lbs = field<double>(node, "undistributed_lbs", where);
    r.metrics.consumed_lbs = field<double>(node, "consumed_lbs", where);
    r.metrics.people_served = field<std::int64_t>(node, "people_served", where);
    for (const auto& an : field<json>(node, "per_agency", where)) {
      AgencyMetrics a;
      a.agency_id = field<int>(an, "agency_id", where);
      a.demand_lbs = field<double>(an, "demand_lbs", where);
      a.delivered_lbs = field<double>(an, "delivered_lbs", where);
      a.delivered = field<std::vector<double>>(an, "delivered_by_type", where);
      a.consumed_lbs = field<double>(an, "consumed_lbs", where);
      a.overflow_lbs = field<double>(an, "overflow_lbs", where);
      a.people_served = field<std::int64_t>(an, "people_served", where);
      r.metrics.per_agency.push_back(std::move(a));
    }
    for (const auto& dn : field<json>(node, "welfare_trace", where)) {
      AgencyDecision d;
      d.agency_id = field<int>(dn, "agency_id", where);
      d.donor_subset = field<std::vector<int>>(dn, "donor_subset", where);
      d.partial = field<bool>(dn, "partial", where);
      d.welfare.per_type = field<std::vector<double>>(dn, "per_type", where);
      d.welfare.combined = field<double>(dn, "combined", where);
      r.metrics.welfare_trace.push_back(d.welfare);
      r.decisions.push_back(std::move(d));
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace foodbank
