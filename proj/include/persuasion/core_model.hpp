#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace persuasion {

/// Tolerance for utility ties and "revealing" comparisons.
inline constexpr double kTieTolerance = 1e-12;

/// Tolerance for row sums of a stochastic matrix.
inline constexpr double kRowSumTolerance = 1e-12;

/// Dense row-major matrix of reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  explicit Matrix(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::vector<double> row(std::size_t r) const;
  std::vector<std::vector<double>> to_nested() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Probability of the first state. Stored clamped to [0, 1].
class Belief {
 public:
  constexpr Belief() = default;
  explicit Belief(double first_state_probability);

  double value() const { return value_; }
  double complement() const { return 1.0 - value_; }

  friend bool operator==(Belief, Belief) = default;

 private:
  double value_ = 0.0;
};

/// A binary-state decision problem: prior, labels, and the two utility tables.
/// Utility tables are indexed (state, action).
class Scenario {
 public:
  Scenario(std::vector<std::string> states, std::vector<std::string> actions,
           std::vector<double> prior, Matrix receiver_utility, Matrix sender_utility);

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<double>& prior() const { return prior_; }
  Belief prior_belief() const { return Belief(prior_[0]); }
  const Matrix& receiver_utility() const { return receiver_utility_; }
  const Matrix& sender_utility() const { return sender_utility_; }

  std::size_t state_count() const { return states_.size(); }
  std::size_t action_count() const { return actions_.size(); }

  std::size_t state_index(std::string_view label) const;
  std::size_t action_index(std::string_view label) const;

  double receiver_expected_utility(Belief belief, std::size_t action) const;
  double sender_expected_utility(Belief belief, std::size_t action) const;

  /// Actions ranked by the Sender's expected utility at `belief`, best first.
  /// Equal values (within kTieTolerance) keep declaration order.
  std::vector<std::size_t> sender_preference_order(Belief belief) const;

 private:
  std::vector<std::string> states_;
  std::vector<std::string> actions_;
  std::vector<double> prior_;
  Matrix receiver_utility_;
  Matrix sender_utility_;
};

/// Row-stochastic signal likelihoods p(state, signal), one row per state.
///
/// Signals whose column is identically zero can never be realized under an
/// interior prior; they are removed at construction.
class InformationStructure {
 public:
  InformationStructure(std::vector<std::string> signals, Matrix matrix);

  const std::vector<std::string>& signals() const { return signals_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t signal_count() const { return signals_.size(); }
  std::size_t state_count() const { return matrix_.rows(); }

  double operator()(std::size_t state, std::size_t signal) const { return matrix_(state, signal); }

  std::size_t signal_index(std::string_view label) const;

  /// Same matrix under new signal labels.
  InformationStructure relabeled(std::vector<std::string> signals) const;

  bool operator==(const InformationStructure&) const = default;

 private:
  std::vector<std::string> signals_;
  Matrix matrix_;
};

struct UtilityOutcome {
  std::size_t action = 0;
  double receiver_utility = 0.0;
  double sender_utility = 0.0;
  std::size_t realized_state = 0;
};

/// Marginal probability of each signal under the scenario prior.
std::vector<double> signal_marginals(const InformationStructure& structure, const Scenario& scenario);

/// The uninformative structure whose every row is the prior-weighted signal
/// marginal of `announced`.
InformationStructure alternative_structure(const InformationStructure& announced,
                                           const Scenario& scenario);

/// Bayes update of `prior` after observing `signal` under `structure`.
/// Throws std::domain_error("unreachable signal") for zero-marginal signals.
Belief posterior(Belief prior, const InformationStructure& structure, std::size_t signal);
Belief posterior(Belief prior, const InformationStructure& structure, std::string_view signal);

/// Receiver's best response at `belief`. Ties go to the action the Sender
/// prefers at that belief, then to declaration order.
std::size_t optimal_action(Belief belief, const Scenario& scenario);

bool is_revealing(std::size_t action, const Scenario& scenario);
bool is_revealing(std::string_view action, const Scenario& scenario);

/// Sender's expected utility when both players hold `belief`.
double sender_value_at_belief(Belief belief, const Scenario& scenario);

/// Distribution over Receiver posteriors induced by `structure` (signals
/// producing identical posteriors are merged). Order follows first appearance.
std::vector<std::pair<Belief, double>> posterior_distribution(const Scenario& scenario,
                                                              const InformationStructure& structure);

/// Sender's one-period expected utility when the Receiver updates with
/// `perceived` while signals are drawn from `true_structure`.
double period_expected_utility(const Scenario& scenario, const InformationStructure& perceived,
                               const InformationStructure& true_structure);

/// Sum over the posterior distribution of the Sender's value at each posterior.
double value_from_posteriors(const Scenario& scenario, const InformationStructure& structure);

}  // namespace persuasion
