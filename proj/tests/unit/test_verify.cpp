#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "infocascade/investment.hpp"
#include "infocascade/rule_io.hpp"
#include "infocascade/verify.hpp"
#include "oracles/random_games.hpp"

using namespace infocascade;

namespace {

EquilibriumRule straddle_rule() {
  InvestmentParams p;
  p.horizon = 3;
  p.lambda = 0.4;
  const PublicBelief pi{{{PrivateBelief::binary(0.2), 0.5}, {PrivateBelief::binary(0.8), 0.5}}};
  return backward_solve(build_spec(p), JointPublicBelief{{pi, pi}});
}

// Flips every stored action of one player at one node and reloads the rule.
EquilibriumRule corrupt(const EquilibriumRule& rule, std::size_t node, std::size_t player) {
  auto j = nlohmann::json::parse(rule_to_json(rule));
  for (auto& a : j["nodes"][node]["players"][player]["actions"]) a = 1 - a.get<int>();
  return rule_from_json(j.dump());
}

}  // namespace

TEST(Verify, SolvedInstancesAreCertified) {
  const auto rule = straddle_rule();
  const auto r = verify_equilibrium(rule);
  ASSERT_TRUE(r.multi_stage_gain.has_value());
  EXPECT_LE(r.max_gain, kEquilibriumCertificate);
  EXPECT_TRUE(r.certified());
  EXPECT_GT(r.cells_checked, 0u);
  EXPECT_GT(r.information_sets_checked, 0u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(r.root_value_rule[i], r.root_value_enumerated[i], 1e-10);
}

TEST(Verify, RandomGamesSolvedAreCertified) {
  std::mt19937_64 gen(17);
  int solved = 0;
  for (int k = 0; k < 6; ++k) {
    const GameSpec s = infocascade::testing::random_binary_spec(gen, 2, 2);
    try {
      const auto r = verify_equilibrium(backward_solve(s, JointPublicBelief::point_mass_prior(s)));
      EXPECT_LE(r.max_gain, kEquilibriumCertificate) << "instance " << k;
      ++solved;
    } catch (const NoPureFixedPoint&) {
    }
  }
  EXPECT_GT(solved, 0);
}

TEST(Verify, CorruptedLeafIsDetected) {
  const auto rule = straddle_rule();
  std::size_t leaf = 0;
  for (const auto& n : rule.nodes)
    if (n.t == rule.spec.horizon) leaf = n.id;
  ASSERT_EQ(rule.node(leaf).t, 3u);
  const auto r = verify_equilibrium(corrupt(rule, leaf, 0));
  EXPECT_GT(r.max_gain, kEquilibriumCertificate);
  EXPECT_FALSE(r.certified());
  EXPECT_EQ(r.worst.player, 0u);
}

TEST(Verify, ZeroRewardGameHasZeroGain) {
  InvestmentParams p;
  p.horizon = 2;
  GameSpec s = build_spec(p);
  for (auto& r : s.reward) std::fill(r.begin(), r.end(), 0.0);
  const auto r = verify_equilibrium(backward_solve(s, JointPublicBelief::point_mass_prior(s)));
  EXPECT_EQ(r.max_gain, 0.0);
}

TEST(Verify, LongHorizonSkipsMultiStageEnumeration) {
  InvestmentParams p;
  p.horizon = 5;
  p.lambda = 0.4;
  p.prior = 0.9;
  const GameSpec s = build_spec(p);
  const auto r = verify_equilibrium(backward_solve(s, JointPublicBelief::point_mass_prior(s)));
  EXPECT_FALSE(r.multi_stage_gain.has_value());
  EXPECT_TRUE(r.certified());
}
