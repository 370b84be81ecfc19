#include "persuasion/design_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace persuasion {

namespace {

void require_binary(const Scenario& scenario) {
  if (scenario.state_count() != 2 || scenario.action_count() != 2) {
    throw std::invalid_argument("design solver requires exactly two states and two actions");
  }
}

// Two-signal split: the favorable state always sends signal 0; the other
// state sends it with probability x.
InformationStructure threshold_split(std::size_t favorable_state, double x,
                                     std::vector<std::string> labels) {
  Matrix m(2, 2);
  m(favorable_state, 0) = 1.0;
  m(favorable_state, 1) = 0.0;
  m(1 - favorable_state, 0) = x;
  m(1 - favorable_state, 1) = 1.0 - x;
  return InformationStructure(std::move(labels), std::move(m));
}

}  // namespace

ReceiverThreshold receiver_threshold(const Scenario& scenario) {
  require_binary(scenario);
  const Matrix& u = scenario.receiver_utility();
  const double gap_first = u(0, 0) - u(0, 1);
  const double gap_second = u(1, 0) - u(1, 1);
  if (std::abs(gap_first - gap_second) <= kTieTolerance) return {Belief(0.0), true};
  const double crossing = gap_second / (gap_second - gap_first);
  if (crossing < 0.0 || crossing > 1.0) return {Belief(crossing), true};
  return {Belief(crossing), false};
}

BPSolution bp_optimal(const Scenario& scenario, std::vector<std::string> signal_labels) {
  require_binary(scenario);
  if (signal_labels.size() != 2) throw std::invalid_argument("bp_optimal needs two signal labels");

  const ReceiverThreshold threshold = receiver_threshold(scenario);
  const double prior = scenario.prior()[0];
  const double at_zero = sender_value_at_belief(Belief(0.0), scenario);
  const double at_one = sender_value_at_belief(Belief(1.0), scenario);

  const double none_value = sender_value_at_belief(scenario.prior_belief(), scenario);
  const double full_value = prior * at_one + (1.0 - prior) * at_zero;

  StructureKind kind = StructureKind::NoDisclosure;
  double best = none_value;
  if (full_value > best + kTieTolerance) {
    kind = StructureKind::FullDisclosure;
    best = full_value;
  }

  const double mu_star = threshold.belief.value();
  const bool split_possible = !threshold.degenerate && mu_star > 0.0 && mu_star < 1.0 &&
                              std::abs(mu_star - prior) > kTieTolerance;
  double split_value = 0.0;
  if (split_possible) {
    const double at_star = sender_value_at_belief(threshold.belief, scenario);
    if (prior < mu_star) {
      const double weight = prior / mu_star;
      split_value = weight * at_star + (1.0 - weight) * at_zero;
    } else {
      const double weight = (1.0 - prior) / (1.0 - mu_star);
      split_value = weight * at_star + (1.0 - weight) * at_one;
    }
    if (split_value > best + kTieTolerance) {
      kind = StructureKind::ThresholdSplit;
      best = split_value;
    }
  }

  BPSolution solution{no_disclosure(scenario, signal_labels.front()), kind, best, {}, threshold,
                      std::nullopt, std::nullopt, std::nullopt};
  if (kind == StructureKind::FullDisclosure) {
    solution.structure = full_disclosure(scenario, std::move(signal_labels));
  } else if (kind == StructureKind::ThresholdSplit) {
    // Work in terms of the state the pooled signal is compatible with for sure.
    const std::size_t favorable = prior < mu_star ? 0 : 1;
    const double favorable_prior = scenario.prior()[favorable];
    const double favorable_threshold = favorable == 0 ? mu_star : 1.0 - mu_star;
    const double x = favorable_prior * (1.0 - favorable_threshold) /
                     ((1.0 - favorable_prior) * favorable_threshold);
    solution.structure = threshold_split(favorable, x, std::move(signal_labels));
    solution.x = x;
    solution.e = favorable_prior + (1.0 - favorable_prior) * x;
    solution.favorable_state = favorable;
  }
  solution.posterior_support = posterior_distribution(scenario, solution.structure);
  return solution;
}

InformationStructure full_disclosure(const Scenario& scenario,
                                     std::vector<std::string> signal_labels) {
  const std::size_t n = scenario.state_count();
  if (signal_labels.size() != n) throw std::invalid_argument("one signal label per state required");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return InformationStructure(std::move(signal_labels), std::move(m));
}

InformationStructure no_disclosure(const Scenario& scenario, std::string signal_label) {
  return InformationStructure({std::move(signal_label)}, Matrix(scenario.state_count(), 1, 1.0));
}

bool is_full_disclosure(const InformationStructure& structure) {
  for (std::size_t s = 0; s < structure.signal_count(); ++s) {
    std::size_t positive = 0;
    for (std::size_t w = 0; w < structure.state_count(); ++w) positive += structure(w, s) > 0.0;
    if (positive != 1) return false;
  }
  return true;
}

bool is_no_disclosure(const InformationStructure& structure) {
  for (std::size_t w = 1; w < structure.state_count(); ++w) {
    for (std::size_t s = 0; s < structure.signal_count(); ++s) {
      if (std::abs(structure(w, s) - structure(0, s)) > kRowSumTolerance) return false;
    }
  }
  return true;
}

bool same_matrix(const InformationStructure& lhs, const InformationStructure& rhs,
                 double tolerance) {
  if (lhs.state_count() != rhs.state_count() || lhs.signal_count() != rhs.signal_count()) {
    return false;
  }
  for (std::size_t w = 0; w < lhs.state_count(); ++w) {
    for (std::size_t s = 0; s < lhs.signal_count(); ++s) {
      if (std::abs(lhs(w, s) - rhs(w, s)) > tolerance) return false;
    }
  }
  return true;
}

std::optional<RevealingPreferenceShape> revealing_preference_shape(const Scenario& scenario) {
  if (scenario.action_count() != 2) return std::nullopt;
  const bool first_revealing = is_revealing(std::size_t{0}, scenario);
  const bool second_revealing = is_revealing(std::size_t{1}, scenario);
  if (first_revealing == second_revealing) return std::nullopt;

  RevealingPreferenceShape shape;
  shape.revealing_action = first_revealing ? 0 : 1;
  shape.non_revealing_action = 1 - shape.revealing_action;
  if (optimal_action(scenario.prior_belief(), scenario) != shape.non_revealing_action) {
    return std::nullopt;
  }

  const Matrix& v = scenario.sender_utility();
  const double revealing_payoff = v(0, shape.revealing_action);
  if (std::abs(v(1, shape.revealing_action) - revealing_payoff) > kTieTolerance) return std::nullopt;
  for (std::size_t w = 0; w < 2; ++w) {
    if (!(revealing_payoff > v(w, shape.non_revealing_action) + kTieTolerance)) return std::nullopt;
  }

  const BPSolution solution = bp_optimal(scenario);
  if (solution.kind != StructureKind::ThresholdSplit) return std::nullopt;
  shape.favorable_state = *solution.favorable_state;
  return shape;
}

InformationStructure epsilon_structure(const Scenario& scenario, double epsilon,
                                       std::vector<std::string> signal_labels) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (signal_labels.size() != 3) throw std::invalid_argument("epsilon structure needs three labels");
  const auto shape = revealing_preference_shape(scenario);
  if (!shape) {
    throw std::invalid_argument(
        "epsilon family needs one revealing action preferred by the Sender over a non-revealing "
        "action that the Receiver takes at the prior");
  }
  const double x = *bp_optimal(scenario).x;
  const std::size_t favorable = shape->favorable_state;
  Matrix m(2, 3);
  m(favorable, 0) = epsilon;
  m(favorable, 1) = 1.0 - epsilon;
  m(favorable, 2) = 0.0;
  m(1 - favorable, 0) = 0.0;
  m(1 - favorable, 1) = x * (1.0 - epsilon);
  m(1 - favorable, 2) = (1.0 - x) + x * epsilon;
  return InformationStructure(std::move(signal_labels), std::move(m));
}

PersistenceVerdict classify_persistence(const Scenario& scenario,
                                        const InformationStructure& structure, double alpha) {
  if (is_no_disclosure(structure) || is_full_disclosure(structure)) {
    return {Persistence::Persists, PersistenceReason::ExtremeStructure, std::nullopt, std::nullopt};
  }

  const bool binary = scenario.action_count() == 2;
  const Matrix& v = scenario.sender_utility();
  if (binary) {
    for (std::size_t a = 0; a < 2; ++a) {
      const std::size_t other = 1 - a;
      const bool dominant = v(0, a) > v(0, other) + kTieTolerance && v(1, a) > v(1, other) + kTieTolerance;
      if (dominant && !is_revealing(a, scenario) &&
          same_matrix(structure, bp_optimal(scenario).structure)) {
        return {Persistence::Persists, PersistenceReason::DominantNonRevealingAction, std::nullopt,
                std::nullopt};
      }
    }
  }

  bool all_revealing = true;
  for (std::size_t a = 0; a < scenario.action_count(); ++a) {
    all_revealing = all_revealing && is_revealing(a, scenario);
  }
  if (all_revealing) {
    return {Persistence::EventuallyPersists, PersistenceReason::AllActionsRevealing, std::nullopt,
            std::nullopt};
  }

  if (binary && revealing_preference_shape(scenario)) {
    const BPSolution solution = bp_optimal(scenario);
    if (same_matrix(structure, solution.structure)) {
      PersistenceVerdict verdict{Persistence::SwitchRisk, PersistenceReason::RevealingPreferredAction,
                                 *solution.e / *solution.x, std::nullopt};
      // The bound needs a single adverse revealing outcome to trip the switch.
      if (alpha < *verdict.alpha_hat) {
        const double favorable_prior = scenario.prior()[*solution.favorable_state];
        verdict.adoption_bound = favorable_prior / *solution.e;
      }
      return verdict;
    }
  }

  return {Persistence::SwitchRisk, PersistenceReason::NoSufficientCondition, std::nullopt,
          std::nullopt};
}

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::NoDisclosure: return "no_disclosure";
    case StructureKind::FullDisclosure: return "full_disclosure";
    case StructureKind::ThresholdSplit: return "threshold_split";
  }
  return "unknown";
}

std::string_view to_string(Persistence persistence) {
  switch (persistence) {
    case Persistence::Persists: return "Persists";
    case Persistence::EventuallyPersists: return "EventuallyPersists";
    case Persistence::SwitchRisk: return "SwitchRisk";
  }
  return "unknown";
}

std::string_view to_string(PersistenceReason reason) {
  switch (reason) {
    case PersistenceReason::ExtremeStructure: return "extreme_structure";
    case PersistenceReason::DominantNonRevealingAction: return "dominant_non_revealing_action";
    case PersistenceReason::AllActionsRevealing: return "all_actions_revealing";
    case PersistenceReason::RevealingPreferredAction: return "revealing_preferred_action";
    case PersistenceReason::NoSufficientCondition: return "no_sufficient_condition";
  }
  return "unknown";
}

}  // namespace persuasion
