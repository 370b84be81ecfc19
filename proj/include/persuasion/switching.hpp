#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "persuasion/core_model.hpp"

namespace persuasion {

enum class Perception : std::uint8_t { Announced, Alternative };

/// Strict compares `lambda > alpha`; Weak compares `lambda >= alpha`.
enum class ComparisonMode : std::uint8_t { Strict, Weak };

/// What a Receiver sees after acting: the signal, her action and payoff, and
/// the realized state when the action's payoff depends on it.
struct Observation {
  std::size_t signal = 0;
  std::size_t action = 0;
  std::optional<std::size_t> revealed_state;
  double receiver_utility = 0.0;
};

/// Running state of the switching rule. `log_lambda` is the cumulative log
/// Bayes factor of the alternative over the announced structure; it is
/// never reoriented when the perception flips.
struct SwitchState {
  Perception perceived = Perception::Announced;
  double log_lambda = 0.0;
  std::uint32_t switches = 0;
  bool absorbed = false;

  bool operator==(const SwitchState&) const = default;
};

struct HistoryRecord {
  std::size_t period = 0;
  Perception perceived = Perception::Announced;  // after the start-of-period check
  std::size_t signal = 0;
  std::size_t action = 0;
  std::size_t realized_state = 0;
  bool revealed = false;
  double sender_utility = 0.0;
  double receiver_utility = 0.0;
  double log_lambda_after = 0.0;
};

using HistoryTrace = std::vector<HistoryRecord>;

/// Threshold rule with a hysteresis band (-ln alpha, ln alpha) in log space.
class SwitchingRule {
 public:
  /// Absolute slack on log-space threshold comparisons.
  static constexpr double kSlack = 1e-12;

  explicit SwitchingRule(double alpha, ComparisonMode mode = ComparisonMode::Strict);

  double alpha() const { return alpha_; }
  ComparisonMode mode() const { return mode_; }
  double log_alpha() const { return log_alpha_; }

  bool leaves_announced(double log_lambda) const;
  bool returns_to_announced(double log_lambda) const;

 private:
  double alpha_;
  ComparisonMode mode_;
  double log_alpha_;
};

/// l(o | Q): joint likelihood of (state, signal) for a revealing action,
/// signal marginal otherwise.
double observation_likelihood(const Observation& observation, const InformationStructure& structure,
                              const Scenario& scenario);

/// Sum of log observation likelihoods; -inf when any factor is zero.
double history_log_likelihood(const HistoryTrace& trace, const InformationStructure& structure,
                              const Scenario& scenario);

/// lambda = exp(log_lambda), always alternative-over-announced.
double bayes_factor(const SwitchState& state);

/// Announced structure, its alternative, and the rule, with per-signal
/// actions and per-outcome log ratios precomputed.
class SwitchingModel {
 public:
  SwitchingModel(Scenario scenario, InformationStructure announced, SwitchingRule rule);

  const Scenario& scenario() const { return scenario_; }
  const InformationStructure& announced() const { return announced_; }
  const InformationStructure& alternative() const { return alternative_; }
  const SwitchingRule& rule() const { return rule_; }

  std::size_t action(Perception perceived, std::size_t signal) const {
    return actions_[index(perceived)][signal];
  }
  bool revealing(std::size_t action) const { return revealing_[action]; }

  /// ln l(o|alternative) - ln l(o|announced) for a revealed (state, signal).
  double log_ratio(std::size_t state, std::size_t signal) const {
    return log_ratio_[state * announced_.signal_count() + signal];
  }

  /// True when every action taken under the alternative is non-revealing.
  bool alternative_is_absorbing() const { return alternative_absorbing_; }

  /// Sender's period expected utility under each perception.
  double period_value(Perception perceived) const { return period_value_[index(perceived)]; }

 private:
  static std::size_t index(Perception p) { return p == Perception::Announced ? 0 : 1; }

  Scenario scenario_;
  InformationStructure announced_;
  InformationStructure alternative_;
  SwitchingRule rule_;
  std::vector<std::size_t> actions_[2];
  std::vector<bool> revealing_;
  std::vector<double> log_ratio_;
  bool alternative_absorbing_ = false;
  double period_value_[2] = {0.0, 0.0};
};

struct StepResult {
  SwitchState state;
  UtilityOutcome outcome;
  Observation observation;
};

/// One period: start-of-period switch check, Receiver's action under the
/// (possibly new) perception, then the Bayes-factor update. Throws
/// std::invalid_argument when `signal` cannot occur in `realized_state`
/// under the announced structure.
StepResult step(const SwitchingModel& model, const SwitchState& state, std::size_t realized_state,
                std::size_t signal);

}  // namespace persuasion
