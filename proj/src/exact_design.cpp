#include "persuasion/exact_design.hpp"

#include <stdexcept>

namespace persuasion::exact {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

void require_binary(const RationalScenario& scenario) {
  require(scenario.actions().size() == 2,
          "design solver requires exactly two states and two actions");
}

}  // namespace

Rational sender_value_at_belief(const Rational& belief_first, const RationalScenario& scenario) {
  const std::size_t action = optimal_action(belief_first, scenario);
  const auto& v = scenario.sender_utility();
  return belief_first * v[0][action] + (1 - belief_first) * v[1][action];
}

Rational period_expected_utility(const RationalScenario& scenario, const RationalStructure& perceived,
                                 const RationalStructure& true_structure) {
  require(perceived.signals() == true_structure.signals(),
          "perceived and true structures must share a signal set");
  Rational total = 0;
  for (std::size_t s = 0; s < true_structure.signal_count(); ++s) {
    const auto belief = posterior(scenario.prior()[0], perceived, s);
    if (!belief) throw std::domain_error("unreachable signal");
    const std::size_t action = optimal_action(*belief, scenario);
    for (std::size_t w = 0; w < 2; ++w) {
      total += scenario.prior()[w] * true_structure(w, s) * scenario.sender_utility()[w][action];
    }
  }
  return total;
}

ExactBPSolution bp_optimal(const RationalScenario& scenario, std::vector<std::string> signal_labels) {
  require_binary(scenario);
  require(signal_labels.size() == 2, "bp_optimal needs two signal labels");
  const auto& u = scenario.receiver_utility();
  const Rational gap_first = u[0][0] - u[0][1];
  const Rational gap_second = u[1][0] - u[1][1];
  const Rational& prior = scenario.prior()[0];

  ExactBPSolution solution{no_disclosure(signal_labels.front()), StructureKind::NoDisclosure,
                           sender_value_at_belief(prior, scenario), Rational(0), true,
                           std::nullopt, std::nullopt, std::nullopt};
  const Rational at_zero = sender_value_at_belief(Rational(0), scenario);
  const Rational at_one = sender_value_at_belief(Rational(1), scenario);
  const Rational full_value = prior * at_one + (1 - prior) * at_zero;
  if (full_value > solution.value) {
    solution.kind = StructureKind::FullDisclosure;
    solution.value = full_value;
  }

  if (gap_first != gap_second) {
    solution.mu_star = gap_second / (gap_second - gap_first);
    solution.threshold_degenerate = solution.mu_star < 0 || solution.mu_star > 1;
  }
  const Rational& mu_star = solution.mu_star;
  if (!solution.threshold_degenerate && mu_star > 0 && mu_star < 1 && mu_star != prior) {
    const Rational at_star = sender_value_at_belief(mu_star, scenario);
    Rational split_value;
    if (prior < mu_star) {
      const Rational weight = prior / mu_star;
      split_value = weight * at_star + (1 - weight) * at_zero;
    } else {
      const Rational weight = (1 - prior) / (1 - mu_star);
      split_value = weight * at_star + (1 - weight) * at_one;
    }
    if (split_value > solution.value) {
      const std::size_t favorable = prior < mu_star ? 0 : 1;
      const Rational& favorable_prior = scenario.prior()[favorable];
      const Rational favorable_threshold = favorable == 0 ? mu_star : Rational(1 - mu_star);
      const Rational x = favorable_prior * (1 - favorable_threshold) /
                         ((1 - favorable_prior) * favorable_threshold);
      RationalMatrix m(2, std::vector<Rational>(2));
      m[favorable] = {Rational(1), Rational(0)};
      m[1 - favorable] = {x, Rational(1 - x)};
      solution.structure = RationalStructure(std::move(signal_labels), std::move(m));
      solution.kind = StructureKind::ThresholdSplit;
      solution.value = split_value;
      solution.x = x;
      solution.e = favorable_prior + (1 - favorable_prior) * x;
      solution.favorable_state = favorable;
      return solution;
    }
  }
  if (solution.kind == StructureKind::FullDisclosure) {
    solution.structure = full_disclosure(std::move(signal_labels));
  }
  return solution;
}

RationalStructure full_disclosure(std::vector<std::string> signal_labels) {
  require(signal_labels.size() == 2, "one signal label per state required");
  return RationalStructure(std::move(signal_labels),
                           {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
}

RationalStructure no_disclosure(std::string signal_label) {
  return RationalStructure({std::move(signal_label)}, {{Rational(1)}, {Rational(1)}});
}

RationalStructure epsilon_structure(const RationalScenario& scenario, const Rational& epsilon,
                                    std::vector<std::string> signal_labels) {
  require(epsilon >= 0 && epsilon <= 1, "epsilon must lie in [0, 1]");
  require(signal_labels.size() == 3, "epsilon structure needs three labels");
  // Shape preconditions are shared with the floating-point solver.
  if (!revealing_preference_shape(scenario.to_double())) {
    throw std::invalid_argument(
        "epsilon family needs one revealing action preferred by the Sender over a non-revealing "
        "action that the Receiver takes at the prior");
  }
  const ExactBPSolution solution = bp_optimal(scenario);
  require(solution.kind == StructureKind::ThresholdSplit, "epsilon family needs a threshold split");
  const Rational& x = *solution.x;
  const std::size_t favorable = *solution.favorable_state;
  RationalMatrix m(2, std::vector<Rational>(3));
  m[favorable] = {epsilon, Rational(1 - epsilon), Rational(0)};
  m[1 - favorable] = {Rational(0), Rational(x * (1 - epsilon)), Rational((1 - x) + x * epsilon)};
  return RationalStructure(std::move(signal_labels), std::move(m));
}

}  // namespace persuasion::exact
