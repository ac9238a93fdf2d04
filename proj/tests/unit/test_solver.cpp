#include <gtest/gtest.h>

#include <random>

#include "infocascade/investment.hpp"
#include "infocascade/rule_io.hpp"
#include "infocascade/solver.hpp"
#include "oracles/random_games.hpp"

using namespace infocascade;

namespace {

// Two players, binary everything, states and observations carry no information.
GameSpec uninformative_game(std::size_t horizon, const std::vector<std::vector<double>>& payoff0,
                            const std::vector<std::vector<double>>& payoff1) {
  GameSpec s;
  s.num_players = 2;
  s.horizon = horizon;
  s.spaces.assign(2, {2, 2, 2});
  for (int i = 0; i < 2; ++i) {
    s.transition.push_back(std::vector<double>(16, 0.5));
    s.observation.push_back(std::vector<double>(16, 0.5));
    s.prior.push_back({0.5, 0.5});
    std::vector<double> r(16);
    for (std::size_t x = 0; x < 4; ++x)
      for (std::size_t a = 0; a < 4; ++a) r[x * 4 + a] = (i == 0 ? payoff0 : payoff1)[a / 2][a % 2];
    s.reward.push_back(r);
  }
  return s;
}

InvestmentParams cascade_params(std::size_t horizon) {
  InvestmentParams p;
  p.horizon = horizon;
  p.lambda = 0.4;
  p.prior = 0.9;
  return p;
}

std::vector<double> support_values(const EquilibriumRule& rule, std::size_t player) {
  const auto& pp = rule.node(rule.root).players[player];
  return {pp.values.begin(), pp.values.begin() + static_cast<std::ptrdiff_t>(pp.support_count)};
}

}  // namespace

TEST(ActionValues, OnePeriodInvestmentGain) {
  InvestmentParams p;
  p.players = 1;
  p.horizon = 1;
  const GameSpec s = build_spec(p);
  const std::vector<PlayerMarginal> marginals(1);
  const auto v = action_values(s, 1, 0, PrivateBelief::binary(0.8), marginals, nullptr);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_DOUBLE_EQ(v[0], 0.0);
  EXPECT_NEAR(v[1], 0.5 * 0.6, 1e-15);
}

TEST(LowestArgmax, TiesWithinEpsilonGoToLowerIndex) {
  EXPECT_EQ(lowest_argmax(std::vector<double>{0.0, 1.0, 1.0}), 1u);
  EXPECT_EQ(lowest_argmax(std::vector<double>{1.0, 1.0 + 1e-13}), 0u);
  EXPECT_EQ(lowest_argmax(std::vector<double>{1.0, 1.0 + 1e-9}), 1u);
}

TEST(BackwardSolve, ZeroRewardPlaysLowestActionWithZeroValue) {
  GameSpec s = uninformative_game(1, {{0, 0}, {0, 0}}, {{0, 0}, {0, 0}});
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  ASSERT_EQ(rule.nodes.size(), 1u);
  for (const auto& pp : rule.node(0).players)
    for (std::size_t c = 0; c < pp.actions.size(); ++c) {
      EXPECT_EQ(pp.actions[c], 0u);
      EXPECT_EQ(pp.values[c], 0.0);
    }
}

TEST(BackwardSolve, OnePeriodThresholdWithTieToAbstain) {
  InvestmentParams p;
  p.horizon = 1;
  p.lambda = 0.4;
  const GameSpec s = build_spec(p);
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  const auto& pp = rule.node(0).players[0];
  for (std::size_t c = 0; c < pp.prescription.num_cells(); ++c) {
    const double xi = pp.prescription.cell(c)[1];
    EXPECT_EQ(pp.actions[c], xi > 0.5 + 1e-9 ? 1u : 0u) << "xi " << xi;
  }
}

TEST(BackwardSolve, PriorInsideCascadeInvestsEverywhereWithClosedFormValues) {
  const auto p = cascade_params(3);
  const GameSpec s = build_spec(p);
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  EXPECT_LE(rule.max_residual(), 1e-9);
  for (const auto& n : rule.nodes)
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& pp = n.players[i];
      const double hat = hat_xi_excluding(n.belief, i);
      for (std::size_t c = 0; c < pp.actions.size(); ++c) {
        EXPECT_EQ(pp.actions[c], 1u);
        EXPECT_NEAR(pp.values[c], cascade_value(p, n.t, pp.prescription.cell(c)[1], hat, 1), 1e-10);
      }
    }
}

TEST(BackwardSolve, MatchingPenniesHasNoPureFixedPoint) {
  GameSpec s = uninformative_game(1, {{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
  try {
    backward_solve(s, JointPublicBelief::point_mass_prior(s));
    FAIL() << "expected NoPureFixedPoint";
  } catch (const NoPureFixedPoint& e) {
    EXPECT_GT(e.best_residual(), 1.0);
    ASSERT_EQ(e.path().size(), 1u);
    EXPECT_EQ(e.path()[0].t, 1u);
  }
}

TEST(BackwardSolve, CoordinationGameFindsPureEquilibrium) {
  GameSpec s = uninformative_game(2, {{1, 0}, {0, 2}}, {{1, 0}, {0, 2}});
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  EXPECT_LE(rule.max_residual(), 1e-9);
  const auto& root = rule.node(rule.root);
  EXPECT_EQ(root.support_action(0, 0), root.support_action(1, 0));
}

TEST(BackwardSolve, NodeBudgetIsEnforced) {
  const GameSpec s = build_spec(cascade_params(4));
  SolverConfig config;
  config.max_nodes = 2;
  EXPECT_THROW(backward_solve(s, JointPublicBelief::point_mass_prior(s), config), ResourceError);
}

TEST(BackwardSolve, MemoizationDoesNotChangeTheSolution) {
  std::mt19937_64 gen(99);
  int compared = 0;
  for (int k = 0; k < 8; ++k) {
    const GameSpec s = infocascade::testing::random_binary_spec(gen, 2, 3);
    SolverConfig plain;
    plain.memoize = false;
    try {
      const auto memo = backward_solve(s, JointPublicBelief::point_mass_prior(s));
      const auto fresh = backward_solve(s, JointPublicBelief::point_mass_prior(s), plain);
      EXPECT_GE(fresh.nodes.size(), memo.nodes.size());
      for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(support_values(memo, i), support_values(fresh, i));
      ++compared;
    } catch (const NoPureFixedPoint&) {
    }
  }
  EXPECT_GT(compared, 0);
}

TEST(BackwardSolve, StoredChildrenMatchRecomputedBeliefs) {
  // First random instance with a pure fixed point.
  std::mt19937_64 gen(5);
  GameSpec s;
  EquilibriumRule rule;
  bool solved = false;
  for (int k = 0; k < 20 && !solved; ++k) {
    s = infocascade::testing::random_binary_spec(gen, 2, 3);
    try {
      rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
      solved = true;
    } catch (const NoPureFixedPoint&) {
    }
  }
  ASSERT_TRUE(solved);
  for (const auto& n : rule.nodes) {
    EXPECT_EQ(rule.find(n.t, n.belief), n.id);
    for (const auto& [a, c] : n.children) {
      const auto next = joint_public_update(s, n.belief, rule.profile(n.id), a);
      EXPECT_EQ(rule.find(n.t + 1, next), c);
    }
  }
  const auto fwd = forward_construct(rule);
  EXPECT_EQ(static_cast<double>(fwd.nodes.size()), count_histories(rule));
}

TEST(BackwardSolve, ForwardProfileFollowsHistories) {
  const GameSpec s = build_spec(cascade_params(3));
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  const auto fwd = forward_construct(rule);
  // Only unilateral deviations from (invest, invest) need children: joint actions 1, 2, 3.
  EXPECT_EQ(fwd.nodes.size(), 1u + 3u + 9u);
  const std::vector<std::size_t> h{3, 1};
  EXPECT_EQ(fwd.nodes[fwd.follow(h)].history, h);
  EXPECT_TRUE(fwd.nodes[fwd.follow(h)].off_equilibrium);
  EXPECT_FALSE(fwd.nodes[fwd.follow(std::vector<std::size_t>{3, 3})].off_equilibrium);
  EXPECT_THROW(fwd.follow(std::vector<std::size_t>{3, 3, 3}), std::out_of_range);
  EXPECT_EQ(forward_construct(rule, 1).nodes.size(), 4u);
  EXPECT_THROW(fwd.follow(std::vector<std::size_t>{0}), std::out_of_range);
}

TEST(RuleIo, JsonRoundTripIsExact) {
  const GameSpec s = build_spec(cascade_params(3));
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  const std::string text = rule_to_json(rule);
  const auto back = rule_from_json(text);
  EXPECT_EQ(rule_to_json(back), text);
  EXPECT_EQ(back.nodes.size(), rule.nodes.size());
  EXPECT_THROW(rule_from_json("{\"spec\": 3}"), std::runtime_error);
}
