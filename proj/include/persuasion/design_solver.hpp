#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persuasion/core_model.hpp"

namespace persuasion {

enum class StructureKind { NoDisclosure, FullDisclosure, ThresholdSplit };

struct ReceiverThreshold {
  /// Belief (probability of the first state) at which the Receiver is indifferent.
  Belief belief;
  /// True when the expected-utility lines never cross inside [0, 1]; `belief`
  /// is then the endpoint 0 or 1 nearest the crossing (0 for parallel lines).
  bool degenerate = false;
};

struct BPSolution {
  InformationStructure structure;
  StructureKind kind = StructureKind::NoDisclosure;
  double value = 0.0;
  std::vector<std::pair<Belief, double>> posterior_support;
  ReceiverThreshold threshold;
  /// Threshold splits only: probability that the unfavorable state sends the
  /// pooled signal, and the pooled signal's marginal.
  std::optional<double> x;
  std::optional<double> e;
  /// Threshold splits only: the state whose certainty the pooled signal shares.
  std::optional<std::size_t> favorable_state;
};

/// Scenarios where one action is revealing, the other is not, the Receiver
/// takes the non-revealing one at the prior, and the Sender strictly prefers
/// the revealing one with a state-independent payoff.
struct RevealingPreferenceShape {
  std::size_t revealing_action = 0;
  std::size_t non_revealing_action = 0;
  std::size_t favorable_state = 0;
};

enum class Persistence { Persists, EventuallyPersists, SwitchRisk };

enum class PersistenceReason {
  ExtremeStructure,            // full or no disclosure
  DominantNonRevealingAction,  // Sender strictly prefers a non-revealing action
  AllActionsRevealing,
  RevealingPreferredAction,
  NoSufficientCondition,
};

struct PersistenceVerdict {
  Persistence classification = Persistence::SwitchRisk;
  PersistenceReason reason = PersistenceReason::NoSufficientCondition;
  std::optional<double> alpha_hat;
  std::optional<double> adoption_bound;
};

ReceiverThreshold receiver_threshold(const Scenario& scenario);

/// One-shot optimal structure by concavification over the Receiver's two
/// action regions. Requires two actions. Ties prefer no disclosure, then full
/// disclosure, then the threshold split.
BPSolution bp_optimal(const Scenario& scenario,
                      std::vector<std::string> signal_labels = {"s1", "s2"});

/// One signal per state, labelled in state order.
InformationStructure full_disclosure(const Scenario& scenario,
                                     std::vector<std::string> signal_labels = {"s1", "s2"});
InformationStructure no_disclosure(const Scenario& scenario, std::string signal_label = "s0");

bool is_full_disclosure(const InformationStructure& structure);
bool is_no_disclosure(const InformationStructure& structure);

/// Matrices agree entrywise within `tolerance` (labels ignored).
bool same_matrix(const InformationStructure& lhs, const InformationStructure& rhs,
                 double tolerance = 1e-9);

std::optional<RevealingPreferenceShape> revealing_preference_shape(const Scenario& scenario);

/// Three-signal interpolation between the threshold split (eps = 0) and full
/// disclosure (eps = 1). Labels are {certain, pooled, negative}; zero-marginal
/// signals are stripped so the endpoints are two-signal structures.
InformationStructure epsilon_structure(const Scenario& scenario, double epsilon,
                                       std::vector<std::string> signal_labels = {"s0", "s1", "s2"});

PersistenceVerdict classify_persistence(const Scenario& scenario,
                                        const InformationStructure& structure, double alpha);

std::string_view to_string(StructureKind kind);
std::string_view to_string(Persistence persistence);
std::string_view to_string(PersistenceReason reason);

}  // namespace persuasion
