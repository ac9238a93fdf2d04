#include <gtest/gtest.h>

#include <cmath>

#include "infocascade/belief.hpp"
#include "infocascade/investment.hpp"
#include "infocascade/prescription.hpp"

using namespace infocascade;

namespace {

GameSpec single_player(double p = 0.25) {
  InvestmentParams params;
  params.players = 1;
  params.p0 = params.p1 = p;
  return build_spec(params);
}

constexpr std::size_t kPlus = 1;
constexpr std::size_t kMinus = 0;

Prescription invest_above_half() {
  return Prescription::from_rule(2, {}, 2, 51, [](const PrivateBelief& xi) {
    return pure_dist(2, xi[1] >= 0.5 ? 1 : 0);
  });
}

}  // namespace

TEST(PrivateUpdate, BinarySymmetricChannel) {
  const GameSpec s = single_player();
  EXPECT_NEAR(private_update(s, 0, PrivateBelief::binary(0.5), kPlus, 1)[1], 0.75, 1e-15);
  EXPECT_NEAR(private_update(s, 0, PrivateBelief::binary(0.75), kPlus, 1)[1], 0.9, 1e-15);
  EXPECT_NEAR(private_update(s, 0, PrivateBelief::binary(0.75), kMinus, 0)[1], 0.5, 1e-15);
}

TEST(PrivateUpdate, MatchesScalarClosedFormOnGrid) {
  for (double p : {0.05, 0.25, 0.45}) {
    const GameSpec s = single_player(p);
    for (const auto& xi : simplex_grid(2, 101))
      for (std::size_t w : {kMinus, kPlus})
        EXPECT_NEAR(private_update(s, 0, xi, w, 0)[1], scalar_update(xi[1], w == kPlus, p), 1e-12);
  }
}

TEST(PrivateUpdate, ThreeStateMarkovChainByHand) {
  GameSpec s;
  s.num_players = 1;
  s.horizon = 2;
  s.spaces = {{3, 2, 1}};
  s.transition = {{0.5, 0.3, 0.2, 0.1, 0.8, 0.1, 0.2, 0.2, 0.6}};
  s.observation = {{0.9, 0.1, 0.5, 0.5, 0.2, 0.8}};
  s.reward = {{0, 0, 0}};
  s.prior = {{0.2, 0.3, 0.5}};
  const PrivateBelief xi{{0.2, 0.3, 0.5}};
  // predicted = xi * T = (0.23, 0.40, 0.37); times P(w=1|y) = (0.1, 0.5, 0.8)
  const double u[3] = {0.023, 0.2, 0.296};
  const double z = u[0] + u[1] + u[2];
  const auto post = private_update(s, 0, xi, 1, 0);
  for (int y = 0; y < 3; ++y) EXPECT_NEAR(post[y], u[y] / z, 1e-15);
  EXPECT_NEAR(observation_probability(s, 0, xi, 1, 0), z, 1e-15);
}

TEST(PrivateUpdate, ZeroProbabilityObservationThrows) {
  InvestmentParams params;
  params.players = 1;
  params.p1 = 0.0;
  const GameSpec s = build_spec(params);
  EXPECT_THROW(private_update(s, 0, PrivateBelief::point(2, 1), kMinus, 1), ImpossibleObservation);
}

TEST(PrivateKernel, TwoOutcomes) {
  const auto k = private_kernel(single_player(), 0, PrivateBelief::binary(0.8), 0);
  ASSERT_EQ(k.size(), 2u);
  EXPECT_NEAR(k.atoms()[0].belief[1], 0.6 / 0.65, 1e-15);
  EXPECT_NEAR(k.atoms()[0].weight, 0.65, 1e-15);
  EXPECT_NEAR(k.atoms()[1].belief[1], 0.2 / 0.35, 1e-15);
  EXPECT_NEAR(k.atoms()[1].weight, 0.35, 1e-15);
}

TEST(PublicUpdate, InvestingRevealsTheHighAtom) {
  const GameSpec s = single_player();
  const PublicBelief pi{{{PrivateBelief::binary(0.2), 0.5}, {PrivateBelief::binary(0.8), 0.5}}};
  const auto next = public_update(s, 0, pi, invest_above_half(), 1);
  EXPECT_FALSE(next.off_equilibrium());
  ASSERT_EQ(next.size(), 2u);
  EXPECT_NEAR(next.atoms()[0].belief[1], 0.6 / 0.65, 1e-12);
  EXPECT_NEAR(next.atoms()[0].weight, 0.65, 1e-12);
  EXPECT_NEAR(next.atoms()[1].belief[1], 0.2 / 0.35, 1e-12);
  EXPECT_NEAR(next.atoms()[1].weight, 0.35, 1e-12);
}

TEST(PublicUpdate, ZeroProbabilityActionIsFlagged) {
  const GameSpec s = single_player();
  const auto pi = PublicBelief::point_mass(PrivateBelief::binary(0.2));
  const auto next = public_update(s, 0, pi, invest_above_half(), 1);
  EXPECT_TRUE(next.off_equilibrium());
  EXPECT_NEAR(mean_belief(next)[1], 0.2, 1e-12);
  EXPECT_FALSE(public_update(s, 0, pi, invest_above_half(), 0).off_equilibrium());
}

TEST(PublicBelief, MeanBelief) {
  const PublicBelief pi{{{PrivateBelief::binary(0.2), 0.5}, {PrivateBelief::binary(0.6), 0.5}}};
  EXPECT_NEAR(mean_belief(pi)[1], 0.4, 1e-15);
}

TEST(PublicBelief, NormalizationMergesPrunesAndSorts) {
  const auto pi = normalized({{PrivateBelief::binary(0.7), 1.0},
                              {PrivateBelief::binary(0.3), 1.0},
                              {PrivateBelief::binary(0.7 + 1e-12), 2.0},
                              {PrivateBelief::binary(0.5), 1e-14}});
  ASSERT_EQ(pi.size(), 2u);
  EXPECT_NEAR(pi.atoms()[0].belief[1], 0.7, 1e-11);  // descending in xi(+1)
  EXPECT_NEAR(pi.atoms()[0].weight, 0.75, 1e-12);
  EXPECT_NEAR(pi.atoms()[1].weight, 0.25, 1e-12);
}

TEST(PublicBelief, CanonicalFormGivesEqualKeysForEquivalentBeliefs) {
  const PublicBelief a{{{PrivateBelief::binary(0.1 + 0.2), 0.5}, {PrivateBelief::binary(0.9), 0.5}}};
  const PublicBelief b{{{PrivateBelief::binary(0.9), 0.5}, {PrivateBelief::binary(0.3), 0.5}}};
  EXPECT_EQ(belief_key(1, JointPublicBelief{{canonical(a)}}), belief_key(1, JointPublicBelief{{canonical(b)}}));
  EXPECT_NE(belief_key(1, JointPublicBelief{{canonical(a)}}), belief_key(2, JointPublicBelief{{canonical(a)}}));
}

TEST(PublicBelief, CanonicalFormKeepsPrecisionNearCertainty) {
  const double small = 2.0917e-7;
  const auto c = canonical(PublicBelief::point_mass(PrivateBelief{{small, 1.0 - small}}));
  EXPECT_NEAR(c.atoms()[0].belief[0] / small, 1.0, 1e-12);
}

TEST(JointPublicBelief, PointMassPriorAndFlag) {
  InvestmentParams params;
  params.prior = 0.9;
  const auto root = JointPublicBelief::point_mass_prior(build_spec(params));
  ASSERT_EQ(root.num_players(), 2u);
  EXPECT_DOUBLE_EQ(root[1].atoms()[0].belief[1], 0.9);
  EXPECT_FALSE(root.off_equilibrium());
}
