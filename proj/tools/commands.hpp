#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "persuasion/exact_oracle.hpp"
#include "persuasion/scenario_io.hpp"
#include "persuasion/simulator.hpp"

namespace persuasion::cli {

enum class ExitCode : int { Ok = 0, Usage = 2, Parse = 3, Invalid = 4, Budget = 5, Io = 6 };

/// Failure carrying the category printed as `error[<category>]: ...`.
class CommandError : public std::runtime_error {
 public:
  CommandError(ExitCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

std::string_view category(ExitCode code);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "%.12g"
std::string format_number(double value);

/// start:stop:step parsed exactly; stop is included when it lies on the grid.
std::vector<double> parse_grid(const std::string& text);

void write_simulation_csv(std::ostream& out, const SimulationResult& result);
std::string simulation_summary_json(const SimulationResult& result, const SimConfig& config);
void write_oracle_csv(std::ostream& out, const exact::ExactCurve& curve);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
std::string solve_report(const ScenarioDocument& document, double alpha);

}  // namespace persuasion::cli
