#include "persuasion/exact_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace persuasion::exact {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

mpz_class pow10(unsigned long exponent) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, exponent);
  return out;
}

Rational parse_decimal(std::string_view text) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    bool negative = false;
    if (!exp_text.empty() && (exp_text[0] == '+' || exp_text[0] == '-')) {
      negative = exp_text[0] == '-';
      exp_text.remove_prefix(1);
    }
    require(all_digits(exp_text) && exp_text.size() < 6, "malformed exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp_text));
    if (negative) exponent = -exponent;
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view whole = mantissa.substr(0, dot);
    std::string_view fraction = mantissa.substr(dot + 1);
    require((whole.empty() || all_digits(whole)) && (fraction.empty() || all_digits(fraction)) &&
                !(whole.empty() && fraction.empty()),
            "malformed number '" + std::string(text) + "'");
    digits = std::string(whole) + std::string(fraction);
    fraction_digits = static_cast<long>(fraction.size());
  } else {
    require(all_digits(mantissa), "malformed number '" + std::string(text) + "'");
    digits = std::string(mantissa);
  }
  Rational value(mpz_class(digits, 10), 1);
  const long scale = exponent - fraction_digits;
  if (scale >= 0) {
    value *= Rational(pow10(static_cast<unsigned long>(scale)), 1);
  } else {
    value /= Rational(pow10(static_cast<unsigned long>(-scale)), 1);
  }
  value.canonicalize();
  return value;
}

Rational expected(const Rational& belief_first, const RationalMatrix& table, std::size_t action) {
  return belief_first * table[0][action] + (1 - belief_first) * table[1][action];
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  require(!text.empty(), "empty number");
  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    require(all_digits(num) && all_digits(den), "malformed fraction '" + std::string(text) + "'");
    mpz_class denominator(std::string{den}, 10);
    require(denominator != 0, "zero denominator in '" + std::string(text) + "'");
    value = Rational(mpz_class(std::string{num}, 10), denominator);
    value.canonicalize();
  } else {
    value = parse_decimal(text);
  }
  return negative ? Rational(-value) : value;
}

double to_double(const Rational& value) {
  const double truncated = value.get_d();
  if (Rational(truncated) == value) return truncated;
  const double away = std::nextafter(truncated, sgn(value) > 0 ? HUGE_VAL : -HUGE_VAL);
  const Rational gap_truncated = abs(value - Rational(truncated));
  const Rational gap_away = abs(Rational(away) - value);
  if (gap_away < gap_truncated) return away;
  if (gap_truncated < gap_away) return truncated;
  // Halfway: even mantissa.
  return (std::bit_cast<std::uint64_t>(truncated) & 1u) == 0 ? truncated : away;
}

std::string format_fixed(const Rational& value, int places) {
  const bool negative = value < 0;
  const Rational magnitude = negative ? Rational(-value) : value;
  const mpz_class scale = pow10(static_cast<unsigned long>(places));
  // floor(|v| * 10^places + 1/2)
  Rational scaled = magnitude * Rational(scale, 1) + Rational(1, 2);
  mpz_class rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  std::string digits = rounded.get_str();
  if (digits.size() <= static_cast<std::size_t>(places)) {
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  }
  std::string out = (negative && rounded != 0) ? "-" : "";
  out += digits.substr(0, digits.size() - static_cast<std::size_t>(places));
  if (places > 0) out += "." + digits.substr(digits.size() - static_cast<std::size_t>(places));
  return out;
}

RationalScenario::RationalScenario(std::vector<std::string> states, std::vector<std::string> actions,
                                   std::vector<Rational> prior, RationalMatrix receiver_utility,
                                   RationalMatrix sender_utility)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      prior_(std::move(prior)),
      receiver_utility_(std::move(receiver_utility)),
      sender_utility_(std::move(sender_utility)) {
  require(states_.size() == 2, "exactly two states are supported");
  require(!actions_.empty(), "at least one action is required");
  require(prior_.size() == 2, "prior must have one entry per state");
  for (const Rational& p : prior_) require(p > 0 && p < 1, "prior entries must lie strictly inside (0, 1)");
  require(prior_[0] + prior_[1] == 1, "prior must sum to exactly 1");
  for (const RationalMatrix* table : {&receiver_utility_, &sender_utility_}) {
    require(table->size() == 2, "utility tables must be states x actions");
    for (const auto& row : *table) require(row.size() == actions_.size(), "utility tables must be states x actions");
  }
  bool any_revealing = false;
  for (std::size_t a = 0; a < actions_.size(); ++a) any_revealing = any_revealing || is_revealing(a, *this);
  require(any_revealing, "at least one action must be revealing");
}

Scenario RationalScenario::to_double() const {
  auto convert = [](const RationalMatrix& table) {
    Matrix m(table.size(), table.front().size());
    for (std::size_t r = 0; r < table.size(); ++r) {
      for (std::size_t c = 0; c < table[r].size(); ++c) m(r, c) = exact::to_double(table[r][c]);
    }
    return m;
  };
  return Scenario(states_, actions_, {exact::to_double(prior_[0]), exact::to_double(prior_[1])},
                  convert(receiver_utility_), convert(sender_utility_));
}

RationalStructure::RationalStructure(std::vector<std::string> signals, RationalMatrix matrix) {
  require(!matrix.empty(), "structure needs at least one state row");
  const std::size_t columns = signals.size();
  require(std::set<std::string>(signals.begin(), signals.end()).size() == columns,
          "duplicate signal label");
  for (const auto& row : matrix) {
    require(row.size() == columns, "one label per signal column is required");
    Rational sum = 0;
    for (const Rational& p : row) {
      require(p >= 0, "signal probabilities must be nonnegative");
      sum += p;
    }
    require(sum == 1, "each structure row must sum to exactly 1");
  }
  matrix_.assign(matrix.size(), {});
  for (std::size_t c = 0; c < columns; ++c) {
    bool reachable = false;
    for (const auto& row : matrix) reachable = reachable || row[c] > 0;
    if (!reachable) continue;
    signals_.push_back(signals[c]);
    for (std::size_t r = 0; r < matrix.size(); ++r) matrix_[r].push_back(matrix[r][c]);
  }
}

InformationStructure RationalStructure::to_double() const {
  Matrix m(matrix_.size(), signals_.size());
  for (std::size_t r = 0; r < matrix_.size(); ++r) {
    for (std::size_t c = 0; c < signals_.size(); ++c) m(r, c) = exact::to_double(matrix_[r][c]);
  }
  return InformationStructure(signals_, std::move(m));
}

RationalStructure alternative_structure(const RationalStructure& announced,
                                        const RationalScenario& scenario) {
  std::vector<Rational> marginals(announced.signal_count());
  for (std::size_t s = 0; s < announced.signal_count(); ++s) {
    marginals[s] = scenario.prior()[0] * announced(0, s) + scenario.prior()[1] * announced(1, s);
  }
  return RationalStructure(announced.signals(), RationalMatrix(2, marginals));
}

std::optional<Rational> posterior(const Rational& prior_first, const RationalStructure& structure,
                                  std::size_t signal) {
  const Rational first = prior_first * structure(0, signal);
  const Rational total = first + (1 - prior_first) * structure(1, signal);
  if (total == 0) return std::nullopt;
  return Rational(first / total);
}

std::size_t optimal_action(const Rational& belief_first, const RationalScenario& scenario) {
  std::size_t best = 0;
  Rational best_receiver = expected(belief_first, scenario.receiver_utility(), 0);
  Rational best_sender = expected(belief_first, scenario.sender_utility(), 0);
  for (std::size_t a = 1; a < scenario.actions().size(); ++a) {
    const Rational receiver = expected(belief_first, scenario.receiver_utility(), a);
    const Rational sender = expected(belief_first, scenario.sender_utility(), a);
    if (receiver > best_receiver || (receiver == best_receiver && sender > best_sender)) {
      best = a;
      best_receiver = receiver;
      best_sender = sender;
    }
  }
  return best;
}

bool is_revealing(std::size_t action, const RationalScenario& scenario) {
  require(action < scenario.actions().size(), "unknown action index");
  return scenario.receiver_utility()[0][action] != scenario.receiver_utility()[1][action];
}

Rational observation_likelihood(std::size_t signal, std::optional<std::size_t> revealed_state,
                                const RationalStructure& structure,
                                const RationalScenario& scenario) {
  require(signal < structure.signal_count(), "unknown signal");
  if (revealed_state) return scenario.prior()[*revealed_state] * structure(*revealed_state, signal);
  return scenario.prior()[0] * structure(0, signal) + scenario.prior()[1] * structure(1, signal);
}

namespace {

// One (state, signal) cell with positive probability under the announced
// structure, seen through a given perception.
struct Outcome {
  Rational probability;
  Rational multiplier;  // factor applied to lambda
  Rational sender_utility;
};

struct PerceptionTable {
  std::vector<Outcome> outcomes;
  Rational expected_sender_utility;
  bool absorbing = false;  // every action taken is non-revealing
};

PerceptionTable build_table(const RationalScenario& scenario, const RationalStructure& announced,
                            const RationalStructure& alternative, const RationalStructure& perceived) {
  PerceptionTable table;
  table.absorbing = true;
  for (std::size_t s = 0; s < announced.signal_count(); ++s) {
    const auto belief = posterior(scenario.prior()[0], perceived, s);
    require(belief.has_value(), "unreachable signal");
    const std::size_t action = optimal_action(*belief, scenario);
    const bool revealing = is_revealing(action, scenario);
    table.absorbing = table.absorbing && !revealing;
    for (std::size_t w = 0; w < 2; ++w) {
      const Rational probability = scenario.prior()[w] * announced(w, s);
      if (probability == 0) continue;
      Rational multiplier = 1;
      if (revealing) {
        multiplier = observation_likelihood(s, w, alternative, scenario) /
                     observation_likelihood(s, w, announced, scenario);
      }
      const Rational& payoff = scenario.sender_utility()[w][action];
      table.expected_sender_utility += probability * payoff;
      table.outcomes.push_back({probability, multiplier, payoff});
    }
  }
  return table;
}

using FrontierKey = std::pair<Perception, Rational>;

struct KeyLess {
  bool operator()(const FrontierKey& lhs, const FrontierKey& rhs) const {
    if (lhs.first != rhs.first) return lhs.first < rhs.first;
    return cmp(lhs.second, rhs.second) < 0;
  }
};

}  // namespace

ExactCurve enumerate(const RationalScenario& scenario, const RationalStructure& announced,
                     const Rational& alpha, std::size_t horizon, const OracleOptions& options) {
  require(alpha > 1, "alpha must be greater than 1 (alpha = 1 leaves no hysteresis band and is excluded)");
  require(horizon >= 1, "horizon must be at least 1");
  const RationalStructure alternative = alternative_structure(announced, scenario);
  const PerceptionTable tables[2] = {build_table(scenario, announced, alternative, announced),
                                     build_table(scenario, announced, alternative, alternative)};
  auto table_for = [&](Perception p) -> const PerceptionTable& {
    return tables[p == Perception::Announced ? 0 : 1];
  };
  const bool strict = options.mode == ComparisonMode::Strict;
  auto leaves_announced = [&](const Rational& lambda) { return strict ? lambda > alpha : lambda >= alpha; };
  auto returns_to_announced = [&](const Rational& lambda) {
    if (lambda == 0) return true;
    const Rational product = lambda * alpha;
    return strict ? product < 1 : product <= 1;
  };

  std::map<FrontierKey, Rational, KeyLess> frontier;
  frontier.emplace(FrontierKey{Perception::Announced, Rational(1)}, Rational(1));
  Rational absorbed_mass = 0;

  ExactCurve curve;
  for (std::size_t t = 1; t <= horizon; ++t) {
    // Start-of-period check, then re-merge.
    std::map<FrontierKey, Rational, KeyLess> checked;
    for (auto& [key, probability] : frontier) {
      Perception perceived = key.first;
      if (perceived == Perception::Announced && leaves_announced(key.second)) {
        perceived = Perception::Alternative;
      } else if (perceived == Perception::Alternative && returns_to_announced(key.second)) {
        perceived = Perception::Announced;
      }
      if (perceived == Perception::Alternative && table_for(perceived).absorbing) {
        absorbed_mass += probability;
      } else {
        checked[FrontierKey{perceived, key.second}] += probability;
      }
    }
    frontier = std::move(checked);

    Rational adoption = 0;
    Rational payoff = absorbed_mass * table_for(Perception::Alternative).expected_sender_utility;
    Rational mass = absorbed_mass;
    for (const auto& [key, probability] : frontier) {
      if (key.first == Perception::Announced) adoption += probability;
      payoff += probability * table_for(key.first).expected_sender_utility;
      mass += probability;
    }
    curve.adoption.push_back(adoption);
    curve.sender_utility.push_back(payoff);
    curve.total_mass.push_back(mass);
    curve.peak_frontier = std::max(curve.peak_frontier, frontier.size());

    if (options.on_depth) {
      std::vector<OutcomeNode> nodes;
      nodes.reserve(frontier.size() + 1);
      for (const auto& [key, probability] : frontier) {
        nodes.push_back({t, probability, key.second, key.first, false});
      }
      if (absorbed_mass > 0) nodes.push_back({t, absorbed_mass, Rational(0), Perception::Alternative, true});
      options.on_depth(nodes);
    }

    if (t == horizon) break;
    std::map<FrontierKey, Rational, KeyLess> expanded;
    for (const auto& [key, probability] : frontier) {
      const PerceptionTable& table = table_for(key.first);
      curve.nodes_expanded += table.outcomes.size();
      if (curve.nodes_expanded > options.node_budget) {
        throw BudgetExceeded("exact enumeration exceeded the node budget of " +
                             std::to_string(options.node_budget) + " at period " + std::to_string(t) +
                             "; try a smaller horizon");
      }
      for (const Outcome& outcome : table.outcomes) {
        expanded[FrontierKey{key.first, key.second * outcome.multiplier}] +=
            probability * outcome.probability;
      }
    }
    frontier = std::move(expanded);
  }
  return curve;
}

Rational one_step_lambda_expectation(const RationalScenario& scenario,
                                     const RationalStructure& announced) {
  const RationalStructure alternative = alternative_structure(announced, scenario);
  const PerceptionTable table = build_table(scenario, announced, alternative, announced);
  Rational total = 0;
  for (const Outcome& outcome : table.outcomes) total += outcome.probability * outcome.multiplier;
  return total;
}

}  // namespace persuasion::exact
