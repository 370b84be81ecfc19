#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "persuasion/core_model.hpp"
#include "persuasion/switching.hpp"

namespace persuasion::exact {

using Rational = mpq_class;
using RationalMatrix = std::vector<std::vector<Rational>>;

/// Parses "3/7", "-2", "0.25" or "1e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Rounds half away from zero to `places` decimals, e.g. "0.700000000000".
std::string format_fixed(const Rational& value, int places = 12);

/// Nearest double; mpq_get_d alone truncates toward zero.
double to_double(const Rational& value);

/// Exact mirror of Scenario. Utility tables are indexed (state, action).
class RationalScenario {
 public:
  RationalScenario(std::vector<std::string> states, std::vector<std::string> actions,
                   std::vector<Rational> prior, RationalMatrix receiver_utility,
                   RationalMatrix sender_utility);

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<Rational>& prior() const { return prior_; }
  const RationalMatrix& receiver_utility() const { return receiver_utility_; }
  const RationalMatrix& sender_utility() const { return sender_utility_; }

  Scenario to_double() const;

 private:
  std::vector<std::string> states_;
  std::vector<std::string> actions_;
  std::vector<Rational> prior_;
  RationalMatrix receiver_utility_;
  RationalMatrix sender_utility_;
};

/// Exact mirror of InformationStructure; rows sum to exactly 1 and all-zero
/// columns are removed.
class RationalStructure {
 public:
  RationalStructure(std::vector<std::string> signals, RationalMatrix matrix);

  const std::vector<std::string>& signals() const { return signals_; }
  const RationalMatrix& matrix() const { return matrix_; }
  std::size_t signal_count() const { return signals_.size(); }
  const Rational& operator()(std::size_t state, std::size_t signal) const {
    return matrix_[state][signal];
  }

  InformationStructure to_double() const;

 private:
  std::vector<std::string> signals_;
  RationalMatrix matrix_;
};

RationalStructure alternative_structure(const RationalStructure& announced,
                                        const RationalScenario& scenario);

/// Posterior probability of the first state; nullopt for unreachable signals.
std::optional<Rational> posterior(const Rational& prior_first, const RationalStructure& structure,
                                  std::size_t signal);

std::size_t optimal_action(const Rational& belief_first, const RationalScenario& scenario);

bool is_revealing(std::size_t action, const RationalScenario& scenario);

/// l(o | Q) for an observation of `signal`, with `revealed_state` present
/// exactly when the action taken was revealing.
Rational observation_likelihood(std::size_t signal, std::optional<std::size_t> revealed_state,
                                const RationalStructure& structure,
                                const RationalScenario& scenario);

struct OutcomeNode {
  std::size_t depth = 0;
  Rational probability;
  Rational lambda;
  Perception perceived = Perception::Announced;
  bool absorbed = false;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  ComparisonMode mode = ComparisonMode::Strict;
  std::size_t node_budget = 10'000'000;
  /// Called with the merged frontier after each start-of-period check.
  std::function<void(const std::vector<OutcomeNode>&)> on_depth;
};

struct ExactCurve {
  /// Index t-1 holds the value for period t.
  std::vector<Rational> adoption;
  std::vector<Rational> sender_utility;
  std::vector<Rational> total_mass;
  std::size_t nodes_expanded = 0;
  std::size_t peak_frontier = 0;
};

/// Adoption probability and Sender expected payoff for periods 1..horizon by
/// exhaustive expansion of outcome histories. Histories are merged on
/// (perception, lambda); absorbed histories collapse into a single mass.
/// Throws BudgetExceeded once more than options.node_budget node-outcome
/// expansions would be needed.
ExactCurve enumerate(const RationalScenario& scenario, const RationalStructure& announced,
                     const Rational& alpha, std::size_t horizon, const OracleOptions& options = {});

/// E[l(o|alternative) / l(o|announced)] over one period's outcomes while the
/// announced structure is perceived. Non-revealing outcomes contribute ratio 1.
Rational one_step_lambda_expectation(const RationalScenario& scenario,
                                     const RationalStructure& announced);

}  // namespace persuasion::exact
