#include "persuasion/switching.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace persuasion {

SwitchingRule::SwitchingRule(double alpha, ComparisonMode mode)
    : alpha_(alpha), mode_(mode), log_alpha_(std::log(alpha)) {
  if (!std::isfinite(alpha) || !(alpha > 1.0)) {
    throw std::invalid_argument(
        "alpha must be greater than 1 (alpha = 1 leaves no hysteresis band and is excluded)");
  }
}

bool SwitchingRule::leaves_announced(double log_lambda) const {
  if (mode_ == ComparisonMode::Strict) return log_lambda > log_alpha_ + kSlack;
  return log_lambda >= log_alpha_ - kSlack;
}

bool SwitchingRule::returns_to_announced(double log_lambda) const {
  // 1/lambda > alpha  <=>  log_lambda < -ln alpha
  if (mode_ == ComparisonMode::Strict) return log_lambda < -log_alpha_ - kSlack;
  return log_lambda <= -log_alpha_ + kSlack;
}

double observation_likelihood(const Observation& observation, const InformationStructure& structure,
                              const Scenario& scenario) {
  if (observation.signal >= structure.signal_count()) {
    throw std::invalid_argument("unknown signal");
  }
  const auto& prior = scenario.prior();
  if (observation.revealed_state) {
    const std::size_t w = *observation.revealed_state;
    return prior[w] * structure(w, observation.signal);
  }
  return prior[0] * structure(0, observation.signal) + prior[1] * structure(1, observation.signal);
}

double history_log_likelihood(const HistoryTrace& trace, const InformationStructure& structure,
                              const Scenario& scenario) {
  double total = 0.0;
  for (const HistoryRecord& record : trace) {
    Observation o{record.signal, record.action,
                  record.revealed ? std::optional<std::size_t>(record.realized_state) : std::nullopt,
                  record.receiver_utility};
    const double l = observation_likelihood(o, structure, scenario);
    if (l <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log(l);
  }
  return total;
}

double bayes_factor(const SwitchState& state) { return std::exp(state.log_lambda); }

SwitchingModel::SwitchingModel(Scenario scenario, InformationStructure announced, SwitchingRule rule)
    : scenario_(std::move(scenario)),
      announced_(std::move(announced)),
      alternative_(alternative_structure(announced_, scenario_)),
      rule_(rule) {
  const std::size_t signals = announced_.signal_count();
  const Belief prior = scenario_.prior_belief();
  for (std::size_t s = 0; s < signals; ++s) {
    actions_[0].push_back(optimal_action(posterior(prior, announced_, s), scenario_));
    actions_[1].push_back(optimal_action(posterior(prior, alternative_, s), scenario_));
  }
  for (std::size_t a = 0; a < scenario_.action_count(); ++a) {
    revealing_.push_back(is_revealing(a, scenario_));
  }
  log_ratio_.assign(scenario_.state_count() * signals, 0.0);
  for (std::size_t w = 0; w < scenario_.state_count(); ++w) {
    for (std::size_t s = 0; s < signals; ++s) {
      Observation o{s, 0, w, 0.0};
      const double announced_l = observation_likelihood(o, announced_, scenario_);
      const double alternative_l = observation_likelihood(o, alternative_, scenario_);
      // Outcomes impossible under the announced structure are never drawn.
      if (announced_l <= 0.0) continue;
      log_ratio_[w * signals + s] = alternative_l > 0.0
                                        ? std::log(alternative_l) - std::log(announced_l)
                                        : -std::numeric_limits<double>::infinity();
    }
  }
  alternative_absorbing_ = true;
  for (std::size_t a : actions_[1]) alternative_absorbing_ = alternative_absorbing_ && !revealing_[a];
  period_value_[0] = period_expected_utility(scenario_, announced_, announced_);
  period_value_[1] = period_expected_utility(scenario_, alternative_, announced_);
}

StepResult step(const SwitchingModel& model, const SwitchState& state, std::size_t realized_state,
                std::size_t signal) {
  const InformationStructure& announced = model.announced();
  if (realized_state >= model.scenario().state_count() || signal >= announced.signal_count() ||
      !(announced(realized_state, signal) > 0.0)) {
    throw std::invalid_argument("signal not in support");
  }

  StepResult result{state, {}, {}};
  SwitchState& next = result.state;
  if (!next.absorbed) {
    const SwitchingRule& rule = model.rule();
    if (next.perceived == Perception::Announced && rule.leaves_announced(next.log_lambda)) {
      next.perceived = Perception::Alternative;
      ++next.switches;
    } else if (next.perceived == Perception::Alternative &&
               rule.returns_to_announced(next.log_lambda)) {
      next.perceived = Perception::Announced;
      ++next.switches;
    }
  }

  const std::size_t action = model.action(next.perceived, signal);
  const Scenario& scenario = model.scenario();
  const bool revealing = model.revealing(action);
  result.outcome = {action, scenario.receiver_utility()(realized_state, action),
                    scenario.sender_utility()(realized_state, action), realized_state};
  result.observation = {signal, action,
                        revealing ? std::optional<std::size_t>(realized_state) : std::nullopt,
                        result.outcome.receiver_utility};

  if (revealing && !next.absorbed) next.log_lambda += model.log_ratio(realized_state, signal);

  if (!next.absorbed) {
    const bool frozen_on_alternative = next.perceived == Perception::Alternative &&
                                       model.alternative_is_absorbing() &&
                                       !model.rule().returns_to_announced(next.log_lambda);
    const bool locked_on_announced = next.perceived == Perception::Announced &&
                                     next.log_lambda == -std::numeric_limits<double>::infinity();
    next.absorbed = frozen_on_alternative || locked_on_announced;
  }
  return result;
}

}  // namespace persuasion
