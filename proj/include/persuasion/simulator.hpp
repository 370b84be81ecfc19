#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "persuasion/core_model.hpp"
#include "persuasion/switching.hpp"

namespace persuasion {

struct SimConfig {
  double alpha = 1.39;
  double delta = 0.9;
  std::size_t horizon = 200;
  std::size_t replications = 100'000;
  std::uint64_t seed = 1;
  ComparisonMode comparison_mode = ComparisonMode::Strict;
  double tail_tolerance = 1e-6;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  std::size_t workers = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Per-period estimates of the probability that the Receiver perceives the
/// announced structure at the start of period t (index t-1).
struct AdoptionCurve {
  std::vector<double> estimate;
  std::vector<double> standard_error;
  std::size_t replications = 0;
};

struct LifetimeUtility {
  /// Sum of discounted adoption-weighted period values (the objective as written).
  double plug_in = 0.0;
  double plug_in_standard_error = 0.0;
  /// Mean over replications of the discounted realized Sender payoffs.
  double pathwise = 0.0;
  double pathwise_standard_error = 0.0;
  /// delta^T * max|v| / (1 - delta): bound on the omitted infinite tail.
  double truncation_bound = 0.0;
  bool within_tail_tolerance = false;
};

struct SimulationResult {
  AdoptionCurve adoption;
  /// Mean realized Sender payoff per period and its standard error.
  std::vector<double> period_sender_utility;
  std::vector<double> period_sender_utility_standard_error;
  LifetimeUtility lifetime;
  /// Sender's period expected utility under each perception.
  double announced_value = 0.0;
  double alternative_value = 0.0;
};

struct SweepResult {
  std::string parameter;
  std::vector<double> grid;
  std::vector<double> terminal_adoption;
  std::vector<double> terminal_adoption_standard_error;
  /// Sender's period expected utility at the horizon.
  std::vector<double> period_sender_utility;
  std::vector<double> period_sender_utility_standard_error;
};

/// Seed of replication `index`'s private stream.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index);

/// One replication as a full per-period trace. Deterministic in
/// (config.seed, replication_index).
HistoryTrace simulate_replication(const Scenario& scenario, const InformationStructure& announced,
                                  const SimConfig& config, std::uint64_t replication_index);

/// Runs config.replications replications and aggregates everything at once.
/// Output does not depend on config.workers.
SimulationResult simulate(const Scenario& scenario, const InformationStructure& announced,
                          const SimConfig& config);

AdoptionCurve adoption_curve(const Scenario& scenario, const InformationStructure& announced,
                             const SimConfig& config);

LifetimeUtility lifetime_utility(const Scenario& scenario, const InformationStructure& announced,
                                 const SimConfig& config);

/// Terminal adoption and period-T Sender expected utility per alpha, all
/// points sharing config.seed.
SweepResult sweep_alpha(const Scenario& scenario, const InformationStructure& announced,
                        std::span<const double> alphas, const SimConfig& config);

/// Same measurements for the epsilon-family of structures at config.alpha.
SweepResult sweep_epsilon(const Scenario& scenario, std::span<const double> epsilons,
                          const SimConfig& config);

}  // namespace persuasion
