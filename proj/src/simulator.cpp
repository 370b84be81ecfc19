#include "persuasion/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "persuasion/design_solver.hpp"

namespace persuasion {

namespace {

// Replications per reduction block. Blocks are reduced in index order, so the
// floating-point sums do not depend on how blocks were spread over workers.
constexpr std::size_t kBlockSize = 1024;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Draws (state, signal) jointly from prior x announced structure.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(const SwitchingModel& model) {
    const auto& prior = model.scenario().prior();
    const InformationStructure& p = model.announced();
    double cumulative = 0.0;
    for (std::size_t w = 0; w < p.state_count(); ++w) {
      for (std::size_t s = 0; s < p.signal_count(); ++s) {
        const double mass = prior[w] * p(w, s);
        if (mass <= 0.0) continue;
        cumulative += mass;
        cells_.push_back({cumulative, w, s});
      }
    }
  }

  std::pair<std::size_t, std::size_t> draw(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * cells_.back().cumulative;
    for (const Cell& cell : cells_) {
      if (u < cell.cumulative) return {cell.state, cell.signal};
    }
    return {cells_.back().state, cells_.back().signal};
  }

 private:
  struct Cell {
    double cumulative;
    std::size_t state;
    std::size_t signal;
  };
  std::vector<Cell> cells_;
};

template <typename Visitor>
void run_replication(const SwitchingModel& model, const OutcomeSampler& sampler,
                     std::size_t horizon, std::uint64_t seed, Visitor&& visit) {
  std::mt19937_64 rng(seed);
  SwitchState state;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto [realized, signal] = sampler.draw(rng);
    StepResult result = step(model, state, realized, signal);
    visit(t, result);
    state = result.state;
  }
}

struct BlockSums {
  std::vector<std::uint64_t> announced;
  std::vector<double> payoff_sum;
  std::vector<double> payoff_sq_sum;
  double plug_in_sum = 0.0;
  double plug_in_sq_sum = 0.0;
  double pathwise_sum = 0.0;
  double pathwise_sq_sum = 0.0;
};

BlockSums run_block(const SwitchingModel& model, const OutcomeSampler& sampler,
                    const SimConfig& config, std::size_t first, std::size_t last) {
  const std::size_t horizon = config.horizon;
  BlockSums sums{std::vector<std::uint64_t>(horizon, 0), std::vector<double>(horizon, 0.0),
                 std::vector<double>(horizon, 0.0)};
  const double value_announced = model.period_value(Perception::Announced);
  const double value_alternative = model.period_value(Perception::Alternative);
  for (std::size_t r = first; r < last; ++r) {
    double plug_in = 0.0;
    double pathwise = 0.0;
    double discount = 1.0;
    run_replication(model, sampler, horizon, replication_seed(config.seed, r),
                    [&](std::size_t t, const StepResult& result) {
                      const bool announced = result.state.perceived == Perception::Announced;
                      const double payoff = result.outcome.sender_utility;
                      sums.announced[t - 1] += announced ? 1 : 0;
                      sums.payoff_sum[t - 1] += payoff;
                      sums.payoff_sq_sum[t - 1] += payoff * payoff;
                      plug_in += discount * (announced ? value_announced : value_alternative);
                      pathwise += discount * payoff;
                      discount *= config.delta;
                    });
    sums.plug_in_sum += plug_in;
    sums.plug_in_sq_sum += plug_in * plug_in;
    sums.pathwise_sum += pathwise;
    sums.pathwise_sq_sum += pathwise * pathwise;
  }
  return sums;
}

double mean_standard_error(double sum, double sq_sum, std::size_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double variance =
      std::max(0.0, (sq_sum - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
  return std::sqrt(variance / static_cast<double>(n));
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

void record_terminal(SweepResult& sweep, double parameter, const SimulationResult& result) {
  const double p = result.adoption.estimate.back();
  const double se = result.adoption.standard_error.back();
  sweep.grid.push_back(parameter);
  sweep.terminal_adoption.push_back(p);
  sweep.terminal_adoption_standard_error.push_back(se);
  sweep.period_sender_utility.push_back(p * result.announced_value +
                                        (1.0 - p) * result.alternative_value);
  sweep.period_sender_utility_standard_error.push_back(
      std::abs(result.announced_value - result.alternative_value) * se);
}

}  // namespace

void SimConfig::validate() const {
  if (!std::isfinite(alpha) || !(alpha > 1.0)) {
    throw std::invalid_argument(
        "alpha must be greater than 1 (alpha = 1 leaves no hysteresis band and is excluded)");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (!(tail_tolerance >= 0.0)) throw std::invalid_argument("tail_tolerance must be nonnegative");
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

HistoryTrace simulate_replication(const Scenario& scenario, const InformationStructure& announced,
                                  const SimConfig& config, std::uint64_t replication_index) {
  config.validate();
  const SwitchingModel model(scenario, announced, SwitchingRule(config.alpha, config.comparison_mode));
  const OutcomeSampler sampler(model);
  HistoryTrace trace;
  trace.reserve(config.horizon);
  run_replication(model, sampler, config.horizon, replication_seed(config.seed, replication_index),
                  [&](std::size_t t, const StepResult& result) {
                    trace.push_back({t, result.state.perceived, result.observation.signal,
                                     result.outcome.action, result.outcome.realized_state,
                                     result.observation.revealed_state.has_value(),
                                     result.outcome.sender_utility, result.outcome.receiver_utility,
                                     result.state.log_lambda});
                  });
  return trace;
}

SimulationResult simulate(const Scenario& scenario, const InformationStructure& announced,
                          const SimConfig& config) {
  config.validate();
  const SwitchingModel model(scenario, announced, SwitchingRule(config.alpha, config.comparison_mode));
  const OutcomeSampler sampler(model);

  const std::size_t n = config.replications;
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> partial(blocks);
  std::atomic<std::size_t> next_block{0};
  auto worker = [&] {
    for (std::size_t b = next_block++; b < blocks; b = next_block++) {
      partial[b] = run_block(model, sampler, config, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
    }
  };
  const std::size_t workers = std::min(resolve_workers(config.workers), blocks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  const std::size_t horizon = config.horizon;
  BlockSums total{std::vector<std::uint64_t>(horizon, 0), std::vector<double>(horizon, 0.0),
                  std::vector<double>(horizon, 0.0)};
  for (const BlockSums& block : partial) {
    for (std::size_t t = 0; t < horizon; ++t) {
      total.announced[t] += block.announced[t];
      total.payoff_sum[t] += block.payoff_sum[t];
      total.payoff_sq_sum[t] += block.payoff_sq_sum[t];
    }
    total.plug_in_sum += block.plug_in_sum;
    total.plug_in_sq_sum += block.plug_in_sq_sum;
    total.pathwise_sum += block.pathwise_sum;
    total.pathwise_sq_sum += block.pathwise_sq_sum;
  }

  const double count = static_cast<double>(n);
  SimulationResult result;
  result.announced_value = model.period_value(Perception::Announced);
  result.alternative_value = model.period_value(Perception::Alternative);
  result.adoption.replications = n;
  for (std::size_t t = 0; t < horizon; ++t) {
    const double p = static_cast<double>(total.announced[t]) / count;
    result.adoption.estimate.push_back(p);
    result.adoption.standard_error.push_back(std::sqrt(p * (1.0 - p) / count));
    result.period_sender_utility.push_back(total.payoff_sum[t] / count);
    result.period_sender_utility_standard_error.push_back(
        mean_standard_error(total.payoff_sum[t], total.payoff_sq_sum[t], n));
  }

  LifetimeUtility& lifetime = result.lifetime;
  lifetime.plug_in = total.plug_in_sum / count;
  lifetime.plug_in_standard_error = mean_standard_error(total.plug_in_sum, total.plug_in_sq_sum, n);
  lifetime.pathwise = total.pathwise_sum / count;
  lifetime.pathwise_standard_error =
      mean_standard_error(total.pathwise_sum, total.pathwise_sq_sum, n);
  double max_payoff = 0.0;
  const Matrix& v = scenario.sender_utility();
  for (std::size_t w = 0; w < v.rows(); ++w) {
    for (std::size_t a = 0; a < v.cols(); ++a) max_payoff = std::max(max_payoff, std::abs(v(w, a)));
  }
  lifetime.truncation_bound =
      std::pow(config.delta, static_cast<double>(horizon)) * max_payoff / (1.0 - config.delta);
  lifetime.within_tail_tolerance = lifetime.truncation_bound <= config.tail_tolerance;
  return result;
}

AdoptionCurve adoption_curve(const Scenario& scenario, const InformationStructure& announced,
                             const SimConfig& config) {
  return simulate(scenario, announced, config).adoption;
}

LifetimeUtility lifetime_utility(const Scenario& scenario, const InformationStructure& announced,
                                 const SimConfig& config) {
  return simulate(scenario, announced, config).lifetime;
}

SweepResult sweep_alpha(const Scenario& scenario, const InformationStructure& announced,
                        std::span<const double> alphas, const SimConfig& config) {
  SweepResult sweep;
  sweep.parameter = "alpha";
  for (double alpha : sorted_copy(alphas)) {
    SimConfig point = config;
    point.alpha = alpha;
    record_terminal(sweep, alpha, simulate(scenario, announced, point));
  }
  return sweep;
}

SweepResult sweep_epsilon(const Scenario& scenario, std::span<const double> epsilons,
                          const SimConfig& config) {
  SweepResult sweep;
  sweep.parameter = "epsilon";
  for (double epsilon : sorted_copy(epsilons)) {
    const InformationStructure structure = epsilon_structure(scenario, epsilon);
    record_terminal(sweep, epsilon, simulate(scenario, structure, config));
  }
  return sweep;
}

}  // namespace persuasion
