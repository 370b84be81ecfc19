#include "persuasion/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace persuasion {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

std::size_t find_label(const std::vector<std::string>& labels, std::string_view label,
                       const char* kind) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw std::invalid_argument(std::string("unknown ") + kind + " '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

void require_unique(const std::vector<std::string>& labels, const char* kind) {
  std::set<std::string> seen(labels.begin(), labels.end());
  require(seen.size() == labels.size(), std::string("duplicate ") + kind + " label");
}

}  // namespace

Matrix::Matrix(const std::vector<std::vector<double>>& rows)
    : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "ragged matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

std::vector<double> Matrix::row(std::size_t r) const {
  auto first = data_.begin() + static_cast<std::ptrdiff_t>(r * cols_);
  return {first, first + static_cast<std::ptrdiff_t>(cols_)};
}

std::vector<std::vector<double>> Matrix::to_nested() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out.push_back(row(r));
  return out;
}

Belief::Belief(double first_state_probability)
    : value_(std::clamp(first_state_probability, 0.0, 1.0)) {}

Scenario::Scenario(std::vector<std::string> states, std::vector<std::string> actions,
                   std::vector<double> prior, Matrix receiver_utility, Matrix sender_utility)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      prior_(std::move(prior)),
      receiver_utility_(std::move(receiver_utility)),
      sender_utility_(std::move(sender_utility)) {
  require(states_.size() == 2, "exactly two states are supported");
  require(!actions_.empty(), "at least one action is required");
  require_unique(states_, "state");
  require_unique(actions_, "action");
  require(prior_.size() == states_.size(), "prior must have one entry per state");
  for (double p : prior_) {
    require(std::isfinite(p) && p > 0.0 && p < 1.0, "prior entries must lie strictly inside (0, 1)");
  }
  require(std::abs(prior_[0] + prior_[1] - 1.0) <= kRowSumTolerance, "prior must sum to 1");
  for (const Matrix* table : {&receiver_utility_, &sender_utility_}) {
    require(table->rows() == states_.size() && table->cols() == actions_.size(),
            "utility tables must be states x actions");
  }
  bool any_revealing = false;
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    any_revealing = any_revealing || is_revealing(a, *this);
  }
  require(any_revealing, "at least one action must be revealing");
}

std::size_t Scenario::state_index(std::string_view label) const {
  return find_label(states_, label, "state");
}

std::size_t Scenario::action_index(std::string_view label) const {
  return find_label(actions_, label, "action");
}

double Scenario::receiver_expected_utility(Belief belief, std::size_t action) const {
  return belief.value() * receiver_utility_(0, action) +
         belief.complement() * receiver_utility_(1, action);
}

double Scenario::sender_expected_utility(Belief belief, std::size_t action) const {
  return belief.value() * sender_utility_(0, action) +
         belief.complement() * sender_utility_(1, action);
}

std::vector<std::size_t> Scenario::sender_preference_order(Belief belief) const {
  std::vector<std::size_t> order(actions_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
    return sender_expected_utility(belief, lhs) >
           sender_expected_utility(belief, rhs) + kTieTolerance;
  });
  return order;
}

InformationStructure::InformationStructure(std::vector<std::string> signals, Matrix matrix) {
  require(signals.size() == matrix.cols(), "one label per signal column is required");
  require(matrix.rows() >= 1, "structure needs at least one state row");
  require_unique(signals, "signal");
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      double p = matrix(r, c);
      require(std::isfinite(p) && p >= 0.0, "signal probabilities must be nonnegative");
      sum += p;
    }
    require(std::abs(sum - 1.0) <= kRowSumTolerance, "each structure row must sum to 1");
  }

  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    bool reachable = false;
    for (std::size_t r = 0; r < matrix.rows(); ++r) reachable = reachable || matrix(r, c) > 0.0;
    if (reachable) kept.push_back(c);
  }
  matrix_ = Matrix(matrix.rows(), kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    signals_.push_back(std::move(signals[kept[k]]));
    for (std::size_t r = 0; r < matrix.rows(); ++r) matrix_(r, k) = matrix(r, kept[k]);
  }
}

std::size_t InformationStructure::signal_index(std::string_view label) const {
  return find_label(signals_, label, "signal");
}

InformationStructure InformationStructure::relabeled(std::vector<std::string> signals) const {
  return InformationStructure(std::move(signals), matrix_);
}

std::vector<double> signal_marginals(const InformationStructure& structure,
                                     const Scenario& scenario) {
  require(structure.state_count() == scenario.state_count(),
          "structure must have one row per scenario state");
  std::vector<double> marginals(structure.signal_count(), 0.0);
  for (std::size_t s = 0; s < structure.signal_count(); ++s) {
    for (std::size_t w = 0; w < scenario.state_count(); ++w) {
      marginals[s] += scenario.prior()[w] * structure(w, s);
    }
  }
  return marginals;
}

InformationStructure alternative_structure(const InformationStructure& announced,
                                           const Scenario& scenario) {
  const std::vector<double> marginals = signal_marginals(announced, scenario);
  Matrix rows(scenario.state_count(), marginals.size());
  for (std::size_t w = 0; w < rows.rows(); ++w) {
    for (std::size_t s = 0; s < marginals.size(); ++s) rows(w, s) = marginals[s];
  }
  return InformationStructure(announced.signals(), std::move(rows));
}

Belief posterior(Belief prior, const InformationStructure& structure, std::size_t signal) {
  if (signal >= structure.signal_count()) throw std::invalid_argument("unknown signal index");
  if (structure.state_count() != 2) throw std::invalid_argument("posterior needs a two-state structure");
  const double first = structure(0, signal);
  const double second = structure(1, signal);
  const double weight_first = prior.value() * first;
  const double weight_second = prior.complement() * second;
  const double total = weight_first + weight_second;
  if (!(total > 0.0)) throw std::domain_error("unreachable signal");
  // Uninformative column: the update is the identity.
  if (first == second) return prior;
  return Belief(weight_first / total);
}

Belief posterior(Belief prior, const InformationStructure& structure, std::string_view signal) {
  return posterior(prior, structure, structure.signal_index(signal));
}

std::size_t optimal_action(Belief belief, const Scenario& scenario) {
  const std::size_t n = scenario.action_count();
  double best_receiver = scenario.receiver_expected_utility(belief, 0);
  for (std::size_t a = 1; a < n; ++a) {
    best_receiver = std::max(best_receiver, scenario.receiver_expected_utility(belief, a));
  }
  std::size_t chosen = n;
  double chosen_sender = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (scenario.receiver_expected_utility(belief, a) < best_receiver - kTieTolerance) continue;
    const double sender = scenario.sender_expected_utility(belief, a);
    if (chosen == n || sender > chosen_sender + kTieTolerance) {
      chosen = a;
      chosen_sender = sender;
    }
  }
  return chosen;
}

bool is_revealing(std::size_t action, const Scenario& scenario) {
  if (action >= scenario.action_count()) throw std::invalid_argument("unknown action index");
  const Matrix& u = scenario.receiver_utility();
  return std::abs(u(0, action) - u(1, action)) > kTieTolerance;
}

bool is_revealing(std::string_view action, const Scenario& scenario) {
  return is_revealing(scenario.action_index(action), scenario);
}

double sender_value_at_belief(Belief belief, const Scenario& scenario) {
  return scenario.sender_expected_utility(belief, optimal_action(belief, scenario));
}

std::vector<std::pair<Belief, double>> posterior_distribution(
    const Scenario& scenario, const InformationStructure& structure) {
  const std::vector<double> marginals = signal_marginals(structure, scenario);
  std::vector<std::pair<Belief, double>> support;
  for (std::size_t s = 0; s < structure.signal_count(); ++s) {
    const Belief mu = posterior(scenario.prior_belief(), structure, s);
    auto it = std::find_if(support.begin(), support.end(), [&](const auto& entry) {
      return std::abs(entry.first.value() - mu.value()) <= kTieTolerance;
    });
    if (it == support.end()) {
      support.emplace_back(mu, marginals[s]);
    } else {
      it->second += marginals[s];
    }
  }
  return support;
}

double period_expected_utility(const Scenario& scenario, const InformationStructure& perceived,
                               const InformationStructure& true_structure) {
  if (perceived.signals() != true_structure.signals()) {
    throw std::invalid_argument("perceived and true structures must share a signal set");
  }
  const Matrix& v = scenario.sender_utility();
  double total = 0.0;
  for (std::size_t s = 0; s < true_structure.signal_count(); ++s) {
    const std::size_t action = optimal_action(posterior(scenario.prior_belief(), perceived, s), scenario);
    for (std::size_t w = 0; w < scenario.state_count(); ++w) {
      total += scenario.prior()[w] * true_structure(w, s) * v(w, action);
    }
  }
  return total;
}

double value_from_posteriors(const Scenario& scenario, const InformationStructure& structure) {
  double total = 0.0;
  for (const auto& [mu, probability] : posterior_distribution(scenario, structure)) {
    total += probability * sender_value_at_belief(mu, scenario);
  }
  return total;
}

}  // namespace persuasion
