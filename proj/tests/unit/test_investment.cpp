#include <gtest/gtest.h>

#include "infocascade/investment.hpp"

using namespace infocascade;

namespace {

JointPublicBelief means(std::initializer_list<double> ms) {
  JointPublicBelief pi;
  for (double m : ms) pi.per_player.push_back(PublicBelief::point_mass(PrivateBelief::binary(m)));
  return pi;
}

}  // namespace

TEST(Investment, HatXiAveragesOtherPlayersMeans) {
  const auto pi = means({0.4, 1.0, 0.1});
  EXPECT_DOUBLE_EQ(hat_xi_excluding(pi, 2), 0.7);
  EXPECT_DOUBLE_EQ(hat_xi(std::span<const PublicBelief>{}), 0.5);
  EXPECT_DOUBLE_EQ(hat_xi_excluding(means({0.3}), 0), 0.5);
}

TEST(Investment, AnalyticCascadeMembership) {
  InvestmentParams p;
  p.lambda = 0.4;
  const std::vector<std::size_t> invest{1, 1}, abstain{0, 0};
  EXPECT_TRUE(in_analytic_cascade(means({0.9, 0.9}), invest, p));
  EXPECT_TRUE(in_analytic_cascade(means({5.0 / 6.0, 5.0 / 6.0}), invest, p));
  EXPECT_FALSE(in_analytic_cascade(means({0.8, 0.8}), invest, p));
  EXPECT_FALSE(in_analytic_cascade(means({0.9, 0.9}), abstain, p));

  p.lambda = 0.5;
  EXPECT_TRUE(in_analytic_cascade(means({0.0, 0.0}), abstain, p));  // boundary, weak inequality
  EXPECT_FALSE(in_analytic_cascade(means({0.0, 0.01}), abstain, p));
}

TEST(Investment, SinglePlayerNeverCascades) {
  InvestmentParams p;
  p.players = 1;
  p.lambda = 0.3;
  EXPECT_FALSE(in_analytic_cascade(means({0.99}), std::vector<std::size_t>{1}, p));
  EXPECT_FALSE(in_analytic_cascade(means({0.01}), std::vector<std::size_t>{0}, p));
}

TEST(Investment, CascadeValue) {
  InvestmentParams p;
  p.horizon = 5;
  p.lambda = 0.5;
  EXPECT_NEAR(cascade_value(p, 3, 0.9, 0.9, 1), 2.4, 1e-15);
  EXPECT_DOUBLE_EQ(cascade_value(p, 3, 0.9, 0.9, 0), 0.0);
  EXPECT_THROW(cascade_value(p, 6, 0.9, 0.9, 1), IndexError);
}

TEST(Investment, DriftAndScalarUpdate) {
  EXPECT_DOUBLE_EQ(drift(0.5, 0.25), 0.125);
  EXPECT_DOUBLE_EQ(drift(0.0, 0.25), 0.0);
  EXPECT_DOUBLE_EQ(drift(1.0, 0.25), 0.0);
  EXPECT_DOUBLE_EQ(drift(0.3, 0.5), 0.0);
  EXPECT_NEAR(scalar_update(0.5, true, 0.25), 0.75, 1e-15);
  EXPECT_NEAR(scalar_update(0.5, false, 0.25), 0.25, 1e-15);
}

TEST(Investment, ChannelOrientationAndActionDependentNoise) {
  InvestmentParams p;
  p.players = 1;
  p.p0 = 0.4;
  p.p1 = 0.1;
  const GameSpec s = build_spec(p);
  EXPECT_DOUBLE_EQ(s.observation_row(0, 1, 1)[1], 0.9);  // invested, x = +1, symbol +1
  EXPECT_DOUBLE_EQ(s.observation_row(0, 0, 1)[1], 0.6);
  EXPECT_DOUBLE_EQ(s.observation_row(0, 0, 0)[1], 0.4);
  EXPECT_DOUBLE_EQ(s.prior[0][1], 0.5);
}
