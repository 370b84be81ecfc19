#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "persuasion/design_solver.hpp"
#include "persuasion/exact_design.hpp"

namespace persuasion::cli {

namespace {

using nlohmann::json;

struct SharedOptions {
  std::string scenario_path;
  std::string structure;  // overrides the file's structure_kind when set
  std::string out;
  std::string mode = "strict";
};

struct SimulateOptions {
  SharedOptions shared;
  double alpha = 1.39;
  double delta = 0.9;
  std::size_t horizon = 200;
  std::size_t reps = 100'000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

struct OracleOptions {
  SharedOptions shared;
  std::string alpha = "139/100";
  std::size_t horizon = 12;
  std::size_t budget = 10'000'000;
};

struct SolveOptions {
  SharedOptions shared;
  double alpha = 1.39;
};

struct SweepOptions {
  SimulateOptions sim;
  std::string param = "alpha";
  std::string grid;
};

ComparisonMode parse_mode(const std::string& text) {
  return text == "weak" ? ComparisonMode::Weak : ComparisonMode::Strict;
}

std::size_t default_workers() {
  const char* env = std::getenv("PERSUASION_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (*end != '\0') throw CommandError(ExitCode::Usage, "PERSUASION_WORKERS must be a nonnegative integer");
  return static_cast<std::size_t>(value);
}

ScenarioDocument load(const SharedOptions& options) {
  ScenarioDocument document = [&] {
    try {
      return load_scenario(options.scenario_path);
    } catch (const ScenarioFileError& error) {
      throw CommandError(ExitCode::Parse, options.scenario_path + ": " + error.what());
    } catch (const std::runtime_error& error) {
      throw CommandError(ExitCode::Io, error.what());
    }
  }();
  if (!options.structure.empty()) {
    try {
      document.structure_spec = parse_structure_kind(options.structure);
    } catch (const std::invalid_argument& error) {
      throw CommandError(ExitCode::Usage, error.what());
    }
    if (document.structure_spec.kind == StructureSpec::Kind::Explicit && !document.explicit_structure) {
      throw CommandError(ExitCode::Invalid, "--structure explicit needs a structure matrix in the file");
    }
  }
  return document;
}

// Writes to --out, or to `out` when no path (or "-") was given.
template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw CommandError(ExitCode::Io, "cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw CommandError(ExitCode::Io, "failed writing '" + path + "'");
}

SimConfig make_config(const SimulateOptions& options) {
  SimConfig config;
  config.alpha = options.alpha;
  config.delta = options.delta;
  config.horizon = options.horizon;
  config.replications = options.reps;
  config.seed = options.seed;
  config.comparison_mode = parse_mode(options.shared.mode);
  config.workers = options.workers;
  config.validate();
  return config;
}

void cmd_simulate(const SimulateOptions& options, std::ostream& out) {
  const ScenarioDocument document = load(options.shared);
  const SimConfig config = make_config(options);
  const SimulationResult result = simulate(document.scenario(), document.structure(), config);
  emit(options.shared.out, out, [&](std::ostream& stream) { write_simulation_csv(stream, result); });
  if (!options.shared.out.empty() && options.shared.out != "-") {
    const std::string sidecar = std::filesystem::path(options.shared.out).replace_extension(".json").string();
    emit(sidecar, out, [&](std::ostream& stream) { stream << simulation_summary_json(result, config); });
  }
}

void cmd_oracle(const OracleOptions& options, std::ostream& out) {
  const ScenarioDocument document = load(options.shared);
  exact::Rational alpha;
  try {
    alpha = exact::parse_rational(options.alpha);
  } catch (const std::invalid_argument& error) {
    throw CommandError(ExitCode::Usage, std::string("--alpha: ") + error.what());
  }
  if (!(alpha > 1)) {
    throw CommandError(ExitCode::Invalid,
                       "alpha must be greater than 1 (alpha = 1 leaves no hysteresis band and is excluded)");
  }
  if (options.horizon < 1) throw CommandError(ExitCode::Invalid, "horizon must be at least 1");
  exact::OracleOptions oracle;
  oracle.mode = parse_mode(options.shared.mode);
  oracle.node_budget = options.budget;
  exact::ExactCurve curve;
  try {
    curve = exact::enumerate(document.exact, document.exact_structure(), alpha, options.horizon, oracle);
  } catch (const exact::BudgetExceeded& error) {
    throw CommandError(ExitCode::Budget, error.what());
  }
  emit(options.shared.out, out, [&](std::ostream& stream) { write_oracle_csv(stream, curve); });
}

void cmd_solve(const SolveOptions& options, std::ostream& out) {
  const ScenarioDocument document = load(options.shared);
  const std::string report = solve_report(document, options.alpha);
  emit(options.shared.out, out, [&](std::ostream& stream) { stream << report; });
}

void cmd_sweep(const SweepOptions& options, std::ostream& out) {
  const ScenarioDocument document = load(options.sim.shared);
  std::vector<double> grid;
  try {
    grid = parse_grid(options.grid);
  } catch (const std::invalid_argument& error) {
    throw CommandError(ExitCode::Usage, std::string("--grid: ") + error.what());
  }
  const SimConfig config = make_config(options.sim);
  const Scenario scenario = document.scenario();
  SweepResult sweep;
  if (options.param == "alpha") {
    for (double alpha : grid) {
      if (!(alpha > 1.0)) {
        throw CommandError(ExitCode::Invalid, "alpha grid point " + format_number(alpha) +
                                                  " must be greater than 1 (alpha = 1 is excluded)");
      }
    }
    sweep = sweep_alpha(scenario, document.structure(), grid, config);
  } else {
    for (double epsilon : grid) {
      if (epsilon < 0.0 || epsilon > 1.0) {
        throw CommandError(ExitCode::Invalid, "epsilon grid point " + format_number(epsilon) +
                                                  " lies outside [0, 1]");
      }
    }
    sweep = sweep_epsilon(scenario, grid, config);
  }
  emit(options.sim.shared.out, out, [&](std::ostream& stream) { write_sweep_csv(stream, sweep); });
}

void add_shared(CLI::App& command, SharedOptions& options) {
  command.add_option("scenario", options.scenario_path, "Scenario JSON file")->required();
  command.add_option("--structure", options.structure,
                     "Override structure_kind: bp_optimal, full, none, epsilon:<v>, explicit");
  command.add_option("--out", options.out, "Output path (stdout when omitted)");
}

void add_mode(CLI::App& command, SharedOptions& options) {
  command.add_option("--mode", options.mode, "Threshold comparison")
      ->check(CLI::IsMember({"strict", "weak"}))
      ->capture_default_str();
}

void add_simulation(CLI::App& command, SimulateOptions& options) {
  command.add_option("--alpha", options.alpha, "Switching threshold (> 1)")->capture_default_str();
  command.add_option("--delta", options.delta, "Discount factor in (0, 1)")->capture_default_str();
  command.add_option("--horizon", options.horizon, "Periods")->capture_default_str();
  command.add_option("--reps", options.reps, "Replications")->capture_default_str();
  command.add_option("--seed", options.seed, "Base seed")->capture_default_str();
  command.add_option("--workers", options.workers,
                     "Worker threads, 0 for all cores (default from PERSUASION_WORKERS)");
}

json rational_pair(const exact::Rational& value) {
  return json{{"exact", value.get_str()}, {"decimal", exact::to_double(value)}};
}

json matrix_json(const InformationStructure& structure) {
  return structure.matrix().to_nested();
}

}  // namespace

std::string_view category(ExitCode code) {
  switch (code) {
    case ExitCode::Ok: return "ok";
    case ExitCode::Usage: return "usage";
    case ExitCode::Parse: return "parse";
    case ExitCode::Invalid: return "invalid";
    case ExitCode::Budget: return "budget";
    case ExitCode::Io: return "io";
  }
  return "unknown";
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  for (std::string part; std::getline(stream, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw std::invalid_argument("expected start:stop:step, got '" + text + "'");
  const exact::Rational start = exact::parse_rational(parts[0]);
  const exact::Rational stop = exact::parse_rational(parts[1]);
  const exact::Rational step = exact::parse_rational(parts[2]);
  if (step <= 0) throw std::invalid_argument("step must be positive");
  if (stop < start) throw std::invalid_argument("stop must not be below start");
  std::vector<double> grid;
  for (exact::Rational value = start; value <= stop; value += step) {
    grid.push_back(exact::to_double(value));
    if (grid.size() > 1'000'000) throw std::invalid_argument("grid has more than 10^6 points");
  }
  return grid;
}

void write_simulation_csv(std::ostream& out, const SimulationResult& result) {
  out << "t,adoption_estimate,adoption_stderr,period_sender_utility_estimate\n";
  for (std::size_t t = 0; t < result.adoption.estimate.size(); ++t) {
    out << t + 1 << ',' << format_number(result.adoption.estimate[t]) << ','
        << format_number(result.adoption.standard_error[t]) << ','
        << format_number(result.period_sender_utility[t]) << '\n';
  }
}

std::string simulation_summary_json(const SimulationResult& result, const SimConfig& config) {
  const LifetimeUtility& lifetime = result.lifetime;
  json summary = {
      {"alpha", config.alpha},
      {"delta", config.delta},
      {"horizon", config.horizon},
      {"replications", config.replications},
      {"seed", config.seed},
      {"mode", config.comparison_mode == ComparisonMode::Strict ? "strict" : "weak"},
      {"announced_period_value", result.announced_value},
      {"alternative_period_value", result.alternative_value},
      {"terminal_adoption", result.adoption.estimate.back()},
      {"terminal_adoption_stderr", result.adoption.standard_error.back()},
      {"lifetime_utility",
       {{"plug_in", lifetime.plug_in},
        {"plug_in_stderr", lifetime.plug_in_standard_error},
        {"pathwise", lifetime.pathwise},
        {"pathwise_stderr", lifetime.pathwise_standard_error},
        {"truncation_bound", lifetime.truncation_bound},
        {"tail_tolerance", config.tail_tolerance},
        {"within_tail_tolerance", lifetime.within_tail_tolerance}}},
  };
  return summary.dump(2) + "\n";
}

void write_oracle_csv(std::ostream& out, const exact::ExactCurve& curve) {
  out << "t,adoption_exact,sender_utility_exact\n";
  for (std::size_t t = 0; t < curve.adoption.size(); ++t) {
    out << t + 1 << ',' << exact::format_fixed(curve.adoption[t]) << ','
        << exact::format_fixed(curve.sender_utility[t]) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "param_value,terminal_adoption,terminal_adoption_stderr,period_sender_utility,"
         "period_sender_utility_stderr\n";
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    out << format_number(sweep.grid[i]) << ',' << format_number(sweep.terminal_adoption[i]) << ','
        << format_number(sweep.terminal_adoption_standard_error[i]) << ','
        << format_number(sweep.period_sender_utility[i]) << ','
        << format_number(sweep.period_sender_utility_standard_error[i]) << '\n';
  }
}

std::string solve_report(const ScenarioDocument& document, double alpha) {
  const Scenario scenario = document.scenario();
  std::vector<std::string> labels = {"s1", "s2"};
  if (document.signal_labels.size() == 2) labels = document.signal_labels;
  const BPSolution solution = bp_optimal(scenario, labels);
  const exact::ExactBPSolution exact_solution = exact::bp_optimal(document.exact, labels);

  json bp = {
      {"kind", std::string(to_string(solution.kind))},
      {"signals", solution.structure.signals()},
      {"matrix", matrix_json(solution.structure)},
      {"value", rational_pair(exact_solution.value)},
      {"mu_star", solution.threshold.belief.value()},
      {"mu_star_degenerate", solution.threshold.degenerate},
  };
  json exact_rows = json::array();
  for (const auto& row : exact_solution.structure.matrix()) {
    json r = json::array();
    for (const auto& value : row) r.push_back(value.get_str());
    exact_rows.push_back(r);
  }
  bp["matrix_exact"] = exact_rows;
  if (!exact_solution.threshold_degenerate) bp["mu_star_exact"] = exact_solution.mu_star.get_str();
  bp["x"] = exact_solution.x ? rational_pair(*exact_solution.x) : json(nullptr);
  bp["e"] = exact_solution.e ? rational_pair(*exact_solution.e) : json(nullptr);
  json support = json::array();
  for (const auto& [belief, probability] : solution.posterior_support) {
    support.push_back({{"belief", belief.value()}, {"probability", probability}});
  }
  bp["posterior_support"] = support;

  const InformationStructure announced = document.structure();
  const PersistenceVerdict verdict = classify_persistence(scenario, announced, alpha);
  json persistence = {
      {"structure_kind", to_string(document.structure_spec)},
      {"signals", announced.signals()},
      {"matrix", matrix_json(announced)},
      {"alpha", alpha},
      {"classification", std::string(to_string(verdict.classification))},
      {"reason", std::string(to_string(verdict.reason))},
      {"alpha_hat", verdict.alpha_hat ? json(*verdict.alpha_hat) : json(nullptr)},
      {"adoption_bound", verdict.adoption_bound ? json(*verdict.adoption_bound) : json(nullptr)},
  };

  json report = {{"scenario", document.name}, {"bp_optimal", bp}, {"persistence", persistence}};
  return report.dump(2) + "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-run persuasion with Bayes-factor switching Receivers", "persuasion"};
  app.require_subcommand(1);

  SimulateOptions simulate_options;
  OracleOptions oracle_options;
  SolveOptions solve_options;
  SweepOptions sweep_options;

  try {
    const std::size_t workers = default_workers();
    simulate_options.workers = workers;
    sweep_options.sim.workers = workers;
  } catch (const CommandError& error) {
    err << "error[" << category(error.code()) << "]: " << error.what() << '\n';
    return static_cast<int>(error.code());
  }

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo adoption curve and lifetime utility");
  add_shared(*simulate_cmd, simulate_options.shared);
  add_mode(*simulate_cmd, simulate_options.shared);
  add_simulation(*simulate_cmd, simulate_options);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exact adoption curve by enumeration");
  add_shared(*oracle_cmd, oracle_options.shared);
  add_mode(*oracle_cmd, oracle_options.shared);
  oracle_cmd->add_option("--alpha", oracle_options.alpha, "Switching threshold, e.g. 139/100")
      ->capture_default_str();
  oracle_cmd->add_option("--horizon", oracle_options.horizon, "Periods")->capture_default_str();
  oracle_cmd->add_option("--budget", oracle_options.budget, "Node-outcome expansion budget")
      ->capture_default_str();

  CLI::App* solve_cmd = app.add_subcommand("solve", "BP-optimal structure and persistence verdict");
  add_shared(*solve_cmd, solve_options.shared);
  solve_cmd->add_option("--alpha", solve_options.alpha, "Threshold used for the verdict's bound")
      ->capture_default_str();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Terminal adoption and utility over a parameter grid");
  add_shared(*sweep_cmd, sweep_options.sim.shared);
  add_mode(*sweep_cmd, sweep_options.sim.shared);
  add_simulation(*sweep_cmd, sweep_options.sim);
  sweep_cmd->add_option("--param", sweep_options.param, "Swept parameter")
      ->check(CLI::IsMember({"alpha", "epsilon"}))
      ->capture_default_str();
  sweep_cmd->add_option("--grid", sweep_options.grid, "start:stop:step")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& error) {
    std::string message = error.what();
    for (char& c : message) {
      if (c == '\n') c = ' ';
    }
    err << "error[usage]: " << message << '\n';
    return static_cast<int>(ExitCode::Usage);
  }

  try {
    if (simulate_cmd->parsed()) {
      cmd_simulate(simulate_options, out);
    } else if (oracle_cmd->parsed()) {
      cmd_oracle(oracle_options, out);
    } else if (solve_cmd->parsed()) {
      cmd_solve(solve_options, out);
    } else if (sweep_cmd->parsed()) {
      cmd_sweep(sweep_options, out);
    }
  } catch (const CommandError& error) {
    err << "error[" << category(error.code()) << "]: " << error.what() << '\n';
    return static_cast<int>(error.code());
  } catch (const std::invalid_argument& error) {
    err << "error[invalid]: " << error.what() << '\n';
    return static_cast<int>(ExitCode::Invalid);
  } catch (const std::domain_error& error) {
    err << "error[invalid]: " << error.what() << '\n';
    return static_cast<int>(ExitCode::Invalid);
  }
  return 0;
}

}  // namespace persuasion::cli
