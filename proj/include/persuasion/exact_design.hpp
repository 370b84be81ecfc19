#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "persuasion/design_solver.hpp"
#include "persuasion/exact_oracle.hpp"

namespace persuasion::exact {

struct ExactBPSolution {
  RationalStructure structure;
  StructureKind kind = StructureKind::NoDisclosure;
  Rational value;
  Rational mu_star;
  bool threshold_degenerate = false;
  std::optional<Rational> x;
  std::optional<Rational> e;
  std::optional<std::size_t> favorable_state;
};

/// Sender's expected payoff when both players hold `belief_first`.
Rational sender_value_at_belief(const Rational& belief_first, const RationalScenario& scenario);

Rational period_expected_utility(const RationalScenario& scenario, const RationalStructure& perceived,
                                 const RationalStructure& true_structure);

/// Rational counterpart of persuasion::bp_optimal with exact tie handling.
ExactBPSolution bp_optimal(const RationalScenario& scenario,
                           std::vector<std::string> signal_labels = {"s1", "s2"});

RationalStructure full_disclosure(std::vector<std::string> signal_labels = {"s1", "s2"});
RationalStructure no_disclosure(std::string signal_label = "s0");

/// Rational counterpart of persuasion::epsilon_structure.
RationalStructure epsilon_structure(const RationalScenario& scenario, const Rational& epsilon,
                                    std::vector<std::string> signal_labels = {"s0", "s1", "s2"});

}  // namespace persuasion::exact
