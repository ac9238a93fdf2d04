#include <gtest/gtest.h>

#include <cmath>

#include "infocascade/monte_carlo.hpp"

using namespace infocascade;

namespace {

InvestmentParams cascade_params() {
  InvestmentParams p;
  p.horizon = 4;
  p.lambda = 0.4;
  p.prior = 0.9;
  return p;
}

}  // namespace

TEST(MonteCarlo, SameSeedSameTrajectories) {
  const auto p = cascade_params();
  const GameSpec s = build_spec(p);
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  MonteCarloConfig config;
  config.trajectories = 50;
  config.seed = 42;
  config.investment = p;
  RuleStrategy a(rule), b(rule);
  const auto x = monte_carlo(a, config);
  const auto y = monte_carlo(b, config);
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_EQ(x.trajectories[k].states, y.trajectories[k].states);
    EXPECT_EQ(x.trajectories[k].actions, y.trajectories[k].actions);
    for (std::size_t t = 0; t < p.horizon; ++t)
      for (std::size_t i = 0; i < 2; ++i)
        EXPECT_EQ(x.trajectories[k].beliefs[t][i].probs, y.trajectories[k].beliefs[t][i].probs);
  }
  config.seed = 43;
  RuleStrategy c(rule);
  const auto z = monte_carlo(c, config);
  bool differs = false;
  for (std::size_t k = 0; k < 50; ++k) differs = differs || z.trajectories[k].states != x.trajectories[k].states;
  EXPECT_TRUE(differs);
}

TEST(MonteCarlo, TrajectorySeedsAreDistinct) {
  EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(1, 1));
  EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(2, 0));
  EXPECT_EQ(trajectory_seed(7, 3), trajectory_seed(7, 3));
}

TEST(MonteCarlo, PriorInCascadeEntersAtTimeOneAndNeverLeaves) {
  const auto p = cascade_params();
  const GameSpec s = build_spec(p);
  const auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  RuleStrategy tree(rule);
  MonteCarloConfig config;
  config.trajectories = 200;
  config.investment = p;
  const auto r = monte_carlo(tree, config);
  EXPECT_EQ(r.summary.entry_counts[3][0], 200u);
  EXPECT_EQ(r.summary.entry_counts[0][p.horizon], 200u);  // never
  EXPECT_DOUBLE_EQ(r.summary.fraction_constant_play, 1.0);
  std::size_t labelled = 0;
  for (const auto& [label, count] : r.summary.cascade_labels) {
    EXPECT_TRUE(label == "good" || label == "bad" || label == "neutral");
    labelled += count;
  }
  EXPECT_EQ(labelled, 200u);
  for (const auto& rec : r.trajectories) {
    for (auto a : rec.actions) EXPECT_EQ(a, 3u);
    for (bool in : rec.in_cascade) EXPECT_TRUE(in);
    const bool all_high = rec.states[0] == 1 && rec.states[1] == 1;
    const bool all_low = rec.states[0] == 0 && rec.states[1] == 0;
    EXPECT_EQ(rec.cascade_label, all_high ? "good" : all_low ? "bad" : "neutral");
  }
}

TEST(MonteCarlo, UninformativeChannelFreezesBeliefs) {
  GameSpec s = build_spec(InvestmentParams{});
  for (auto& o : s.observation) std::fill(o.begin(), o.end(), 0.5);
  PolicyStrategy tree(s, JointPublicBelief::point_mass_prior(s), constant_policy(s, 1));
  MonteCarloConfig config;
  config.trajectories = 20;
  const auto r = monte_carlo(tree, config);
  for (const auto& rec : r.trajectories)
    for (const auto& period : rec.beliefs)
      for (const auto& xi : period) EXPECT_EQ(xi[1], 0.5);
}

TEST(MonteCarlo, OneStepMeanMatchesDrift) {
  InvestmentParams p;
  p.players = 1;
  p.horizon = 2;
  p.prior = 0.3;
  const GameSpec s = build_spec(p);
  PolicyStrategy tree(s, JointPublicBelief::point_mass_prior(s), constant_policy(s, 0));
  MonteCarloConfig config;
  config.trajectories = 100000;
  config.force_state = 1;
  const auto r = monte_carlo(tree, config);
  double sum = 0.0, sq = 0.0;
  for (const auto& rec : r.trajectories) {
    const double v = rec.beliefs[1][0][1];
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(config.trajectories);
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, 0.3 + drift(0.3, 0.25), 3.0 * se);
}

TEST(MonteCarlo, LeavingTheSolvedTreeNamesTheNode) {
  InvestmentParams p = cascade_params();
  const GameSpec s = build_spec(p);
  auto rule = backward_solve(s, JointPublicBelief::point_mass_prior(s));
  rule.nodes[rule.root].children.clear();
  RuleStrategy tree(rule);
  MonteCarloConfig config;
  config.trajectories = 1;
  try {
    monte_carlo(tree, config);
    FAIL() << "expected std::out_of_range";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("node 0"), std::string::npos);
  }
}

TEST(MonteCarlo, MyopicPolicyBuildsBeliefTreeLazily) {
  InvestmentParams p;
  p.horizon = 3;
  p.lambda = 0.6;
  const GameSpec s = build_spec(p);
  PolicyStrategy tree(s, JointPublicBelief::point_mass_prior(s), myopic_investment_policy(p));
  MonteCarloConfig config;
  config.trajectories = 100;
  config.investment = p;
  const auto r = monte_carlo(tree, config);
  EXPECT_GT(tree.num_nodes(), 1u);
  EXPECT_LE(tree.num_nodes(), 1u + 4u + 16u);
  // Round 1: private beliefs equal the prior 0.5, so the myopic gain is zero and nobody invests.
  for (const auto& rec : r.trajectories) EXPECT_EQ(rec.actions[0], 0u);
}
