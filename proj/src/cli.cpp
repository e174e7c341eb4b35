#include "foodbank/cli.hpp"

#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "foodbank/io.hpp"
#include "foodbank/metrics.hpp"
#include "foodbank/policy.hpp"
#include "foodbank/simulate.hpp"

namespace foodbank::cli {
namespace {

/// Malformed flag values; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  if (text.empty()) throw UsageError(fmt::format("{}: empty list", flag));
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || !std::isfinite(v)) {
      throw UsageError(fmt::format("{}: '{}' is not a number", flag, item));
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

Range parse_range(const std::string& text, const char* flag) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos) {
    throw UsageError(fmt::format("{}: expected LO:HI, got '{}'", flag, text));
  }
  const auto lo = parse_list(text.substr(0, colon), flag);
  const auto hi = parse_list(text.substr(colon + 1), flag);
  if (lo.size() != 1 || hi.size() != 1) {
    throw UsageError(fmt::format("{}: expected LO:HI, got '{}'", flag, text));
  }
  return {lo[0], hi[0]};
}

struct Options {
  std::string scenario_path;
  std::string out_path;
  std::string format = "csv";
  std::string policy = "both";
  std::string agency_order = "poverty-desc";
  std::string people_rule = "balanced";
  std::size_t replications = 100;
  unsigned threads = 1;
  std::string epsilons = "0.5,1.0,1.5,2.0";

  // Generator flags stay as text until the scenario source is known.
  std::uint64_t seed = GeneratorConfig{}.seed;
  std::size_t donors = GeneratorConfig{}.n_donors;
  std::size_t agencies = GeneratorConfig{}.n_agencies;
  std::size_t food_types = GeneratorConfig{}.n_food_types;
  std::string supply_range, demand_range, capacity_range, population_range, poverty_range;
  std::optional<double> region_km;
  std::string weights;

  std::string epsilon;
  std::optional<double> pounds_per_person;
};

GeneratorConfig generator_config(const Options& o) {
  GeneratorConfig cfg;
  cfg.seed = o.seed;
  cfg.n_donors = o.donors;
  cfg.n_agencies = o.agencies;
  cfg.n_food_types = o.food_types;
  if (!o.supply_range.empty()) cfg.supply_range = parse_range(o.supply_range, "--supply-range");
  if (!o.demand_range.empty()) cfg.demand_range = parse_range(o.demand_range, "--demand-range");
  if (!o.capacity_range.empty()) {
    cfg.capacity_range = parse_range(o.capacity_range, "--capacity-range");
  }
  if (!o.population_range.empty()) {
    cfg.population_range = parse_range(o.population_range, "--population-range");
  }
  if (!o.poverty_range.empty()) {
    cfg.poverty_ratio_range = parse_range(o.poverty_range, "--poverty-range");
  }
  if (o.region_km) cfg.region_size = *o.region_km;
  if (!o.weights.empty()) cfg.weights = parse_list(o.weights, "--weights");
  if (!o.epsilon.empty()) cfg.epsilon = parse_list(o.epsilon, "--epsilon");
  if (o.pounds_per_person) cfg.pounds_per_person = *o.pounds_per_person;
  return cfg;
}

SimulationOptions simulation_options(const Options& o) {
  SimulationOptions sim;
  sim.policy.agency_order = o.agency_order == "poverty-asc" ? AgencyOrder::kPovertyAscending
                                                            : AgencyOrder::kPovertyDescending;
  sim.metrics.people_rule = o.people_rule == "pounds" ? PeopleServedRule::kPoundsOnly
                                                      : PeopleServedRule::kNutritionBalanced;
  sim.threads = o.threads;
  return sim;
}

Scenario scenario_for(const Options& o) {
  if (o.scenario_path.empty()) return generate_scenario(generator_config(o));
  Scenario s = load_scenario(o.scenario_path);
  if (!o.epsilon.empty()) {
    auto eps = parse_list(o.epsilon, "--epsilon");
    if (eps.size() == 1) eps.assign(s.type_count(), eps.front());
    s.params.epsilon = std::move(eps);
  }
  if (o.pounds_per_person) s.params.pounds_per_person = *o.pounds_per_person;
  return s;
}

void emit(const Options& o, const std::string& contents, std::ostream& out) {
  if (o.out_path.empty()) {
    out << contents;
  } else {
    write_file(o.out_path, contents);
    out << "wrote " << o.out_path << "\n";
  }
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Scenario s = load_scenario(o.scenario_path);
  require_valid(s);
  out << "valid: " << s.donors.size() << " donors, " << s.agencies.size() << " agencies, "
      << s.type_count() << " food types\n";
  return kExitOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  const Scenario s = generate_scenario(generator_config(o));
  require_valid(s);
  emit(o, scenario_to_json(s), out);
  return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out) {
  const Scenario s = scenario_for(o);
  require_valid(s);
  const auto sim = simulation_options(o);
  std::vector<RunReport> reports;
  if (o.policy != "baseline") {
    const auto plan = run_proposed_policy(s, sim.policy);
    reports.push_back(make_run_report("proposed", plan, compute_metrics(plan, s, sim.metrics)));
  }
  if (o.policy != "proposed") {
    const auto plan = run_baseline_policy(s);
    reports.push_back(make_run_report("baseline", plan, compute_metrics(plan, s, sim.metrics)));
  }
  emit(o,
       o.format == "json" ? run_reports_to_json(reports)
                          : run_reports_to_csv(reports, s.type_count()),
       out);
  return kExitOk;
}

void emit_table(const Options& o, const std::vector<ComparisonRow>& rows, std::ostream& out) {
  emit(o, o.format == "json" ? comparison_to_json(rows) : comparison_to_csv(rows), out);
}

int cmd_compare(const Options& o, std::ostream& out) {
  const auto stats = run_replications(generator_config(o), o.replications, simulation_options(o));
  emit_table(o, comparison_rows(stats), out);
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto epsilons = parse_list(o.epsilons, "--epsilons");
  for (double e : epsilons) {
    if (e < 0.0) throw UsageError(fmt::format("--epsilons: {} is negative", e));
  }
  const auto sweep =
      epsilon_sweep(generator_config(o), epsilons, o.replications, simulation_options(o));
  emit_table(o, sweep_rows(sweep), out);
  return kExitOk;
}

// Flags shared by several subcommands.
void add_generator_flags(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--donors", o.donors, "Number of donors")->check(CLI::Range(1, 24));
  app->add_option("--agencies", o.agencies, "Number of agencies")->check(CLI::PositiveNumber);
  app->add_option("--food-types", o.food_types, "Number of food types")
      ->check(CLI::PositiveNumber);
  app->add_option("--supply-range", o.supply_range, "Pounds per type per donor, LO:HI");
  app->add_option("--demand-range", o.demand_range, "Total pounds per agency, LO:HI");
  app->add_option("--capacity-range", o.capacity_range, "Agency storage pounds, LO:HI");
  app->add_option("--population-range", o.population_range, "Agency population, LO:HI");
  app->add_option("--poverty-range", o.poverty_range, "Head-count ratio, LO:HI");
  app->add_option("--region-km", o.region_km, "Side of the square region in km");
  app->add_option("--weights", o.weights, "Nutrition weights F,F,...");
}

void add_policy_flags(CLI::App* app, Options& o) {
  app->add_option("--epsilon", o.epsilon, "Inequality aversion F[,F...]");
  app->add_option("--pounds-per-person", o.pounds_per_person, "Pounds per person per day");
}

void add_run_flags(CLI::App* app, Options& o) {
  app->add_option("--agency-order", o.agency_order, "Poverty ordering of agencies")
      ->check(CLI::IsMember({"poverty-desc", "poverty-asc"}));
  app->add_option("--people-rule", o.people_rule, "People-served rule")
      ->check(CLI::IsMember({"balanced", "pounds"}));
  app->add_option("--out", o.out_path, "Output file (default: stdout)");
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_replication_flags(CLI::App* app, Options& o) {
  app->add_option("--replications", o.replications, "Monte Carlo replications")
      ->check(CLI::PositiveNumber);
  app->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Food bank distribution policy simulator"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", o.scenario_path, "Scenario JSON")->required();

  auto* gen = app.add_subcommand("gen", "Write a generated scenario");
  add_generator_flags(gen, o);
  add_policy_flags(gen, o);
  gen->add_option("--out", o.out_path, "Output file (default: stdout)");

  auto* run_cmd = app.add_subcommand("run", "Run policies on one scenario");
  auto* scenario_opt = run_cmd->add_option("--scenario", o.scenario_path, "Scenario JSON");
  add_generator_flags(run_cmd, o);
  add_policy_flags(run_cmd, o);
  add_run_flags(run_cmd, o);
  run_cmd->add_option("--policy", o.policy, "Policy to run")
      ->check(CLI::IsMember({"proposed", "baseline", "both"}));
  for (const char* name : {"--seed", "--donors", "--agencies", "--food-types", "--supply-range",
                           "--demand-range", "--capacity-range", "--population-range",
                           "--poverty-range", "--region-km", "--weights"}) {
    scenario_opt->excludes(run_cmd->get_option(name));
  }

  auto* compare = app.add_subcommand("compare", "Replicated policy comparison");
  add_generator_flags(compare, o);
  add_policy_flags(compare, o);
  add_run_flags(compare, o);
  add_replication_flags(compare, o);

  auto* sweep = app.add_subcommand("sweep", "Comparison across inequality aversion values");
  add_generator_flags(sweep, o);
  add_policy_flags(sweep, o);
  add_run_flags(sweep, o);
  add_replication_flags(sweep, o);
  sweep->add_option("--epsilons", o.epsilons, "Epsilon values F,F,...");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (gen->parsed()) return cmd_gen(o, out);
    if (run_cmd->parsed()) return cmd_run(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
  } catch (const ValidationError& e) {
    err << e.what();
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InputError& e) {
    // Parameter values that parse but break a model rule.
    err << "invalid: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitInputError;
}

}  // namespace foodbank::cli
