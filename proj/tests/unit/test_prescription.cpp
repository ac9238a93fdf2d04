#include <gtest/gtest.h>

#include <cmath>

#include "infocascade/prescription.hpp"

using namespace infocascade;

TEST(SimplexGrid, BinaryGridIsEvenlySpaced) {
  const auto g = simplex_grid(2, 5);
  ASSERT_EQ(g.size(), 5u);
  for (const auto& cell : g) {
    EXPECT_DOUBLE_EQ(cell[0] + cell[1], 1.0);
    EXPECT_DOUBLE_EQ(cell[1] * 4, std::round(cell[1] * 4));
  }
}

TEST(SimplexGrid, CountsCompositions) {
  EXPECT_EQ(simplex_grid(3, 4).size(), 10u);  // C(3 + 2, 2)
  EXPECT_EQ(simplex_grid(2, 51).size(), 51u);
  for (const auto& cell : simplex_grid(3, 4)) EXPECT_NEAR(cell[0] + cell[1] + cell[2], 1.0, 1e-15);
}

TEST(Prescription, NearestCellWithLowerIndexOnTies) {
  Prescription p(2);
  p.add_pure_cell(PrivateBelief::binary(0.25), 0);
  p.add_pure_cell(PrivateBelief::binary(0.75), 1);
  EXPECT_EQ(p.nearest_cell(PrivateBelief::binary(0.3)), 0u);
  EXPECT_EQ(p.nearest_cell(PrivateBelief::binary(0.5)), 0u);  // equidistant
  EXPECT_EQ(p.nearest_cell(PrivateBelief::binary(0.55)), 1u);
  EXPECT_DOUBLE_EQ(p.prob(PrivateBelief::binary(0.9), 1), 1.0);
}

TEST(Prescription, AnchoredCellsWinWhenMatched) {
  const PrivateBelief atom = PrivateBelief::binary(0.61);
  auto p = Prescription::from_rule(2, std::vector<PrivateBelief>{atom}, 2, 3,
                                   [&](const PrivateBelief& xi) { return pure_dist(2, xi[1] == 0.61 ? 1 : 0); });
  p.set_anchored(1);
  EXPECT_EQ(p.num_cells(), 4u);
  EXPECT_EQ(p.nearest_cell(PrivateBelief::binary(0.61 + 1e-12)), 0u);
  EXPECT_DOUBLE_EQ(p.prob(PrivateBelief::binary(0.61 + 1e-12), 1), 1.0);
  // Off the atom every cell competes on distance.
  EXPECT_EQ(p.nearest_cell(PrivateBelief::binary(0.6)), 0u);
  EXPECT_EQ(p.nearest_cell(PrivateBelief::binary(0.52)), 2u);
}

TEST(Prescription, ConstantPlaysOneActionEverywhere) {
  const auto p = Prescription::constant(3, 2, 2, 11);
  for (const auto& xi : simplex_grid(2, 23)) EXPECT_DOUBLE_EQ(p.prob(xi, 2), 1.0);
}
