#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "persuasion/core_model.hpp"
#include "persuasion/design_solver.hpp"

using namespace persuasion;

namespace {

Scenario random_binary_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> utility(-2.0, 2.0);
  std::uniform_real_distribution<double> prior(0.05, 0.95);
  for (;;) {
    Matrix u(2, 2), v(2, 2);
    for (std::size_t w = 0; w < 2; ++w) {
      for (std::size_t a = 0; a < 2; ++a) {
        u(w, a) = utility(rng);
        v(w, a) = utility(rng);
      }
    }
    const double p = prior(rng);
    try {
      return Scenario({"w1", "w2"}, {"a1", "a2"}, {p, 1.0 - p}, u, v);
    } catch (const std::invalid_argument&) {
    }
  }
}

InformationStructure random_structure(std::mt19937_64& rng, std::size_t signals) {
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  Matrix m(2, signals);
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < signals; ++s) labels.push_back("s" + std::to_string(s));
  for (std::size_t w = 0; w < 2; ++w) {
    double total = 0.0;
    for (std::size_t s = 0; s < signals; ++s) total += (m(w, s) = weight(rng));
    double sum = 0.0;
    for (std::size_t s = 0; s + 1 < signals; ++s) sum += (m(w, s) /= total);
    m(w, signals - 1) = 1.0 - sum;
  }
  return InformationStructure(labels, m);
}

}  // namespace

TEST(Scenario, RejectsDegeneratePrior) {
  EXPECT_THROW(Scenario({"H", "L"}, {"B", "NB"}, {1.0, 0.0}, Matrix({{1, 0}, {-1, 0}}), Matrix({{1, 0}, {1, 0}})),
               std::invalid_argument);
  EXPECT_THROW(Scenario({"H", "L"}, {"B", "NB"}, {0.3, 0.6}, Matrix({{1, 0}, {-1, 0}}), Matrix({{1, 0}, {1, 0}})),
               std::invalid_argument);
}

TEST(Scenario, RequiresARevealingAction) {
  EXPECT_THROW(Scenario({"H", "L"}, {"B", "NB"}, {0.3, 0.7}, Matrix({{1, 0}, {1, 0}}), Matrix({{1, 0}, {1, 0}})),
               std::invalid_argument);
}

TEST(Scenario, RequiresTotalTablesAndTwoStates) {
  EXPECT_THROW(Scenario({"H", "L"}, {"B", "NB"}, {0.3, 0.7}, Matrix({{1, 0}}), Matrix({{1, 0}, {1, 0}})),
               std::invalid_argument);
  EXPECT_THROW(Scenario({"a", "b", "c"}, {"B", "NB"}, {0.3, 0.3, 0.4}, Matrix({{1, 0}, {-1, 0}, {0, 0}}),
                        Matrix({{1, 0}, {1, 0}, {1, 0}})),
               std::invalid_argument);
}

TEST(InformationStructure, ValidatesRows) {
  EXPECT_THROW(InformationStructure({"a", "b"}, Matrix({{0.5, 0.4}, {0.5, 0.5}})), std::invalid_argument);
  EXPECT_THROW(InformationStructure({"a", "b"}, Matrix({{1.5, -0.5}, {0.5, 0.5}})), std::invalid_argument);
}

TEST(InformationStructure, StripsZeroColumns) {
  const InformationStructure p({"hh", "h", "l"}, Matrix({{0, 1, 0}, {0, 3.0 / 7.0, 4.0 / 7.0}}));
  ASSERT_EQ(p.signal_count(), 2u);
  EXPECT_EQ(p.signals(), (std::vector<std::string>{"h", "l"}));
  EXPECT_EQ(p(1, 1), 4.0 / 7.0);
}

TEST(AlternativeStructure, SellerBuyer) {
  const Scenario s = fixtures::seller_buyer();
  const InformationStructure alt = alternative_structure(fixtures::seller_buyer_bp(), s);
  EXPECT_NEAR(alt(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(alt(0, 1), 0.4, 1e-15);
  EXPECT_EQ(alt.matrix().row(0), alt.matrix().row(1));
  EXPECT_EQ(alt.signals(), fixtures::seller_buyer_bp().signals());
}

TEST(AlternativeStructure, SpeedLimit) {
  const InformationStructure alt = alternative_structure(fixtures::speed_limit_bp(), fixtures::speed_limit());
  EXPECT_NEAR(alt(1, 0), 0.6, 1e-15);
  EXPECT_NEAR(alt(1, 1), 0.4, 1e-15);
}

TEST(AlternativeStructure, NoDisclosureIsItsOwnAlternative) {
  const InformationStructure none({"s0"}, Matrix(std::vector<std::vector<double>>{{1.0}, {1.0}}));
  EXPECT_EQ(alternative_structure(none, fixtures::seller_buyer()), none);
}

TEST(AlternativeStructure, RejectsWrongRowCount) {
  const InformationStructure three({"a", "b"}, Matrix({{1, 0}, {0, 1}, {0.5, 0.5}}));
  EXPECT_THROW(alternative_structure(three, fixtures::seller_buyer()), std::invalid_argument);
}

TEST(AlternativeStructure, RowsEqualMarginalsExactly) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Scenario s = random_binary_scenario(rng);
    const InformationStructure p = random_structure(rng, 2 + i % 4);
    const InformationStructure alt = alternative_structure(p, s);
    const std::vector<double> marginals = signal_marginals(p, s);
    EXPECT_EQ(alt.matrix().row(0), marginals);
    EXPECT_EQ(alt.matrix().row(1), marginals);
    const double prior = s.prior()[0];
    for (std::size_t sig = 0; sig < alt.signal_count(); ++sig) {
      EXPECT_EQ(posterior(s.prior_belief(), alt, sig).value(), prior);
    }
  }
}

TEST(Posterior, WorkedValues) {
  EXPECT_NEAR(posterior(Belief(0.3), fixtures::speed_limit_bp(), "s").value(), 0.5, 1e-15);
  EXPECT_EQ(posterior(Belief(0.3), fixtures::seller_buyer_bp(), "l").value(), 0.0);
  const InformationStructure alt = alternative_structure(fixtures::seller_buyer_bp(), fixtures::seller_buyer());
  EXPECT_EQ(posterior(Belief(0.3), alt, "h").value(), 0.3);
  EXPECT_EQ(posterior(Belief(0.3), alt, "l").value(), 0.3);
}

TEST(Posterior, UnreachableSignal) {
  try {
    posterior(Belief(1.0), fixtures::seller_buyer_bp(), "l");
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& error) {
    EXPECT_STREQ(error.what(), "unreachable signal");
  }
}

TEST(OptimalAction, SellerBuyer) {
  const Scenario s = fixtures::seller_buyer();
  EXPECT_EQ(s.actions()[optimal_action(Belief(0.5), s)], "B");
  EXPECT_EQ(s.actions()[optimal_action(Belief(0.3), s)], "NB");
  EXPECT_EQ(s.actions()[optimal_action(Belief(1.0), s)], "B");
}

TEST(OptimalAction, SpeedLimitIndifferenceFavorsSender) {
  const Scenario s = fixtures::speed_limit();
  EXPECT_EQ(s.actions()[optimal_action(Belief(0.5), s)], "NS");
  EXPECT_EQ(s.actions()[optimal_action(Belief(0.3), s)], "S");
}

TEST(OptimalAction, DeclarationOrderWhenSenderIndifferent) {
  const Scenario s({"w1", "w2"}, {"a1", "a2"}, {0.5, 0.5}, Matrix({{1, 0}, {-1, 0}}), Matrix({{0, 0}, {0, 0}}));
  EXPECT_EQ(optimal_action(Belief(0.5), s), 0u);
  const Scenario r({"w1", "w2"}, {"a1", "a2"}, {0.5, 0.5}, Matrix({{0, 1}, {0, -1}}), Matrix({{0, 0}, {0, 0}}));
  EXPECT_EQ(optimal_action(Belief(0.5), r), 0u);
}

TEST(OptimalAction, InvariantUnderPositiveAffineMaps) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-5.0, 5.0), belief(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Scenario s = random_binary_scenario(rng);
    const double a = scale(rng);
    const double b = shift(rng);
    Matrix u = s.receiver_utility();
    for (std::size_t w = 0; w < 2; ++w) {
      for (std::size_t k = 0; k < 2; ++k) u(w, k) = a * u(w, k) + b;
    }
    const Scenario t(s.states(), s.actions(), s.prior(), u, s.sender_utility());
    for (int j = 0; j < 10; ++j) {
      const Belief mu(belief(rng));
      const double gap = std::abs(s.receiver_expected_utility(mu, 0) - s.receiver_expected_utility(mu, 1));
      if (gap < 1e-9) continue;  // near-ties may legitimately resolve differently in floats
      EXPECT_EQ(optimal_action(mu, s), optimal_action(mu, t));
    }
  }
}

TEST(IsRevealing, Labels) {
  const Scenario s = fixtures::seller_buyer();
  EXPECT_TRUE(is_revealing("B", s));
  EXPECT_FALSE(is_revealing("NB", s));
  EXPECT_THROW(is_revealing("X", s), std::invalid_argument);
  const Scenario c({"w1", "w2"}, {"a1", "a2"}, {0.4, 0.6}, Matrix({{2.5, 1}, {2.5, 0}}), Matrix({{0, 0}, {0, 0}}));
  EXPECT_FALSE(is_revealing("a1", c));
}

TEST(PeriodExpectedUtility, WorkedValues) {
  const Scenario s = fixtures::seller_buyer();
  const InformationStructure p = fixtures::seller_buyer_bp();
  EXPECT_NEAR(period_expected_utility(s, p, p), 0.6, 1e-12);
  EXPECT_NEAR(period_expected_utility(s, alternative_structure(p, s), p), 0.0, 1e-12);
  const InformationStructure full({"h", "l"}, Matrix({{1, 0}, {0, 1}}));
  EXPECT_NEAR(period_expected_utility(s, full, full), 0.3, 1e-12);
}

TEST(PeriodExpectedUtility, SignalMismatch) {
  const Scenario s = fixtures::seller_buyer();
  EXPECT_THROW(period_expected_utility(s, fixtures::speed_limit_bp(), fixtures::seller_buyer_bp()),
               std::invalid_argument);
}

TEST(PeriodExpectedUtility, AgreesWithPosteriorRoute) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const Scenario s = random_binary_scenario(rng);
    const InformationStructure p = random_structure(rng, 1 + i % 5);
    EXPECT_NEAR(period_expected_utility(s, p, p), value_from_posteriors(s, p), 1e-12);
  }
}

TEST(PosteriorDistribution, BayesPlausible) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Scenario s = random_binary_scenario(rng);
    const InformationStructure p = random_structure(rng, 2 + i % 3);
    double mean = 0.0, mass = 0.0;
    for (const auto& [belief, probability] : posterior_distribution(s, p)) {
      mean += belief.value() * probability;
      mass += probability;
    }
    EXPECT_NEAR(mean, s.prior()[0], 1e-12);
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
}

TEST(BPStructure, PosteriorsLandOnThresholdAndCertainty) {
  for (const Scenario& s : {fixtures::seller_buyer(), fixtures::speed_limit()}) {
    const BPSolution bp = bp_optimal(s);
    const double mu_star = receiver_threshold(s).belief.value();
    EXPECT_NEAR(posterior(s.prior_belief(), bp.structure, std::size_t{0}).value(), mu_star, 1e-9);
    const double extreme = posterior(s.prior_belief(), bp.structure, std::size_t{1}).value();
    EXPECT_TRUE(extreme == 0.0 || extreme == 1.0) << extreme;
  }
}
