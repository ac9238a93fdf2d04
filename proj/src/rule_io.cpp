#include "infocascade/rule_io.hpp"

#include <cstdio>
#include <stdexcept>

#include "json_codec.hpp"

namespace infocascade {

namespace detail {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json spec_to_json(const GameSpec& spec) {
  json spaces = json::array();
  for (const auto& s : spec.spaces)
    spaces.push_back({{"states", s.states}, {"observations", s.observations}, {"actions", s.actions}});
  return {{"players", spec.num_players},   {"horizon", spec.horizon},
          {"static_states", spec.static_states}, {"spaces", spaces},
          {"transition", spec.transition}, {"observation", spec.observation},
          {"reward", spec.reward},          {"prior", spec.prior}};
}

GameSpec spec_from_json(const json& j) {
  GameSpec spec;
  spec.num_players = j.at("players").get<std::size_t>();
  spec.horizon = j.at("horizon").get<std::size_t>();
  spec.static_states = j.at("static_states").get<bool>();
  for (const auto& s : j.at("spaces"))
    spec.spaces.push_back({s.at("states").get<std::size_t>(), s.at("observations").get<std::size_t>(),
                           s.at("actions").get<std::size_t>()});
  j.at("transition").get_to(spec.transition);
  j.at("observation").get_to(spec.observation);
  j.at("reward").get_to(spec.reward);
  j.at("prior").get_to(spec.prior);
  spec.check_shapes();
  return spec;
}

json belief_to_json(const JointPublicBelief& belief) {
  json out = json::array();
  for (const auto& pi : belief.per_player) {
    json atoms = json::array();
    for (const auto& a : pi.atoms()) atoms.push_back({{"belief", a.belief.probs}, {"weight", a.weight}});
    out.push_back(atoms);
  }
  return out;
}

json rule_to_json(const EquilibriumRule& rule) {
  json nodes = json::array();
  for (const auto& n : rule.nodes) {
    json players = json::array();
    for (const auto& p : n.players)
      players.push_back({{"support_count", p.support_count}, {"actions", p.actions}, {"values", p.values}});
    json children = json::array();
    for (const auto& [a, c] : n.children) children.push_back({a, c});
    nodes.push_back({{"id", n.id},
                     {"t", n.t},
                     {"key", hex64(n.key)},
                     {"residual", n.residual},
                     {"belief", belief_to_json(n.belief)},
                     {"players", players},
                     {"children", children}});
  }
  const auto& c = rule.config;
  return {{"spec", spec_to_json(rule.spec)},
          {"config",
           {{"grid_k", c.grid_k},
            {"tolerance", c.tolerance},
            {"max_iterations", c.max_iterations},
            {"max_enumeration", c.max_enumeration},
            {"max_nodes", c.max_nodes},
            {"memoize", c.memoize}}},
          {"root", rule.root},
          {"nodes", nodes}};
}

EquilibriumRule rule_from_json(const json& j) {
  EquilibriumRule rule;
  rule.spec = spec_from_json(j.at("spec"));
  const auto& c = j.at("config");
  rule.config.grid_k = c.at("grid_k").get<std::size_t>();
  rule.config.tolerance = c.at("tolerance").get<double>();
  rule.config.max_iterations = c.at("max_iterations").get<std::size_t>();
  rule.config.max_enumeration = c.at("max_enumeration").get<std::size_t>();
  rule.config.max_nodes = c.at("max_nodes").get<std::size_t>();
  rule.config.memoize = c.at("memoize").get<bool>();
  rule.root = j.at("root").get<std::size_t>();

  const GameSpec& spec = rule.spec;
  std::vector<std::vector<PrivateBelief>> grids;
  for (const auto& s : spec.spaces) grids.push_back(simplex_grid(s.states, rule.config.grid_k));

  for (const auto& jn : j.at("nodes")) {
    RuleNode n;
    n.id = jn.at("id").get<std::size_t>();
    if (n.id != rule.nodes.size()) throw std::runtime_error("rule nodes must be listed in id order");
    n.t = jn.at("t").get<std::size_t>();
    n.key = std::stoull(jn.at("key").get<std::string>(), nullptr, 16);
    n.residual = jn.at("residual").get<double>();
    const auto& jb = jn.at("belief");
    if (jb.size() != spec.num_players) throw std::runtime_error("node belief has wrong arity");
    for (const auto& jp : jb) {
      std::vector<Atom> atoms;
      for (const auto& ja : jp)
        atoms.push_back({PrivateBelief{ja.at("belief").get<std::vector<double>>()}, ja.at("weight").get<double>()});
      n.belief.per_player.emplace_back(std::move(atoms));
    }
    const auto& jp = jn.at("players");
    if (jp.size() != spec.num_players) throw std::runtime_error("node prescriptions have wrong arity");
    for (std::size_t i = 0; i < spec.num_players; ++i) {
      PlayerPrescription pp;
      pp.support_count = jp[i].at("support_count").get<std::size_t>();
      pp.actions = jp[i].at("actions").get<std::vector<std::size_t>>();
      pp.values = jp[i].at("values").get<std::vector<double>>();
      const auto& atoms = n.belief[i].atoms();
      if (pp.support_count != atoms.size() || pp.actions.size() != atoms.size() + grids[i].size() ||
          pp.values.size() != pp.actions.size())
        throw std::runtime_error("node prescription does not match its belief and grid");
      pp.prescription = Prescription(spec.spaces[i].actions);
      for (std::size_t k = 0; k < pp.actions.size(); ++k) {
        const PrivateBelief& cell = k < atoms.size() ? atoms[k].belief : grids[i][k - atoms.size()];
        pp.prescription.add_pure_cell(cell, pp.actions[k]);
      }
      pp.prescription.set_anchored(pp.support_count);
      n.players.push_back(std::move(pp));
    }
    for (const auto& jc : jn.at("children")) n.children.emplace(jc.at(0).get<std::size_t>(), jc.at(1).get<std::size_t>());
    rule.nodes.push_back(std::move(n));
  }
  for (const auto& n : rule.nodes)
    for (const auto& [a, c] : n.children)
      if (c >= rule.nodes.size() || a >= spec.joint_actions())
        throw std::runtime_error("rule child link out of range");
  if (rule.root >= rule.nodes.size()) throw std::runtime_error("rule root out of range");
  return rule;
}

}  // namespace detail

std::string rule_to_json(const EquilibriumRule& rule, int indent) {
  return detail::rule_to_json(rule).dump(indent);
}

EquilibriumRule rule_from_json(const std::string& text) {
  try {
    return detail::rule_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed rule file: ") + e.what());
  }
}

}  // namespace infocascade
