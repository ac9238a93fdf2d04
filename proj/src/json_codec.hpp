#pragma once

#include <nlohmann/json.hpp>

#include "infocascade/solver.hpp"

namespace infocascade::detail {

nlohmann::json spec_to_json(const GameSpec& spec);
GameSpec spec_from_json(const nlohmann::json& j);
nlohmann::json belief_to_json(const JointPublicBelief& belief);
nlohmann::json rule_to_json(const EquilibriumRule& rule);
EquilibriumRule rule_from_json(const nlohmann::json& j);
std::string hex64(std::uint64_t v);

}  // namespace infocascade::detail
