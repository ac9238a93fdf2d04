#pragma once

#include <string>

#include "infocascade/solver.hpp"

namespace infocascade {

/**
 * JSON form of a solved rule: the game tables, the solver configuration and every
 * node (time, key, belief atoms, per-player actions and values, children). Grid cells
 * are not listed; they follow the support atoms in simplex_grid order.
 */
std::string rule_to_json(const EquilibriumRule& rule, int indent = 1);
EquilibriumRule rule_from_json(const std::string& text);

}  // namespace infocascade
