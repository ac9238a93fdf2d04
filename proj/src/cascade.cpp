#include "infocascade/cascade.hpp"

#include <sstream>

namespace infocascade {

namespace {

std::size_t steps_left(const GameSpec& spec, std::size_t t) { return spec.horizon + 1 - t; }

// Merges private beliefs that coincide within kAtomTolerance.
void add_belief(std::vector<Atom>& set, PrivateBelief b, double w) {
  for (auto& a : set)
    if (same_atom(a.belief, b)) {
      a.weight += w;
      return;
    }
  set.push_back({std::move(b), w});
}

std::vector<Atom> observe(const GameSpec& spec, std::size_t player, const std::vector<Atom>& set,
                          std::size_t joint_action) {
  std::vector<Atom> next;
  for (const auto& a : set)
    for (std::size_t w = 0; w < spec.spaces[player].observations; ++w) {
      const double p = observation_probability(spec, player, a.belief, w, joint_action);
      if (p > 0.0) add_belief(next, private_update(spec, player, a.belief, w, joint_action), a.weight * p);
    }
  return next;
}

}  // namespace

CascadeWitness is_cascading_belief(const EquilibriumRule& rule, std::size_t t, std::size_t node,
                                   std::span<const std::size_t> actions) {
  const GameSpec& spec = rule.spec;
  CascadeWitness wit;
  if (t == 0 || t > spec.horizon + 1) throw IndexError("time outside 1..T+1");
  if (actions.size() != steps_left(spec, t)) throw IndexError("action sequence must cover t..T");
  if (t == spec.horizon + 1) {
    wit.holds = true;
    return wit;
  }
  std::size_t cur = node;
  if (rule.node(node).t != t) throw IndexError("node does not belong to the queried time");
  for (std::size_t s = 0; s < actions.size(); ++s, ++t) {
    wit.chain.push_back(cur);
    const RuleNode& n = rule.node(cur);
    for (std::size_t i = 0; i < spec.num_players; ++i) {
      const std::size_t ai = spec.action_of(actions[s], i);
      for (const Atom* atom : n.belief[i].support()) {
        const double p = n.players[i].prescription.prob(atom->belief, ai);
        if (p < 1.0 - kCertainTolerance) {
          wit.holds = false;
          wit.t = t;
          wit.node = cur;
          wit.player = i;
          wit.atom = atom->belief.probs;
          wit.probability = p;
          return wit;
        }
      }
    }
    if (s + 1 == actions.size()) break;
    const auto child = rule.child(cur, actions[s]);
    if (!child) {
      std::ostringstream os;
      os << "rule node " << cur << " has no child for joint action " << actions[s];
      throw std::logic_error(os.str());
    }
    cur = *child;
  }
  wit.holds = true;
  return wit;
}

HistoryCascade is_cascading_history(const ForwardProfile& profile, const EquilibriumRule& rule,
                                    std::span<const std::size_t> history,
                                    std::span<const std::size_t> actions) {
  const GameSpec& spec = rule.spec;
  const std::size_t t = history.size() + 1;
  if (t > spec.horizon + 1) throw IndexError("history longer than the horizon");
  if (actions.size() != steps_left(spec, t)) throw IndexError("action sequence must cover t..T");
  profile.follow(history);

  HistoryCascade out;
  const auto& root = profile.nodes.front();
  std::vector<std::vector<Atom>> sets(spec.num_players);
  for (std::size_t i = 0; i < spec.num_players; ++i)
    for (const Atom* a : root.belief[i].support()) add_belief(sets[i], a->belief, a->weight);

  // Private histories consistent with the common history.
  std::size_t idx = 0;
  for (std::size_t s = 0; s < history.size(); ++s) {
    const auto& fn = profile.nodes[idx];
    for (std::size_t i = 0; i < spec.num_players; ++i) {
      const std::size_t ai = spec.action_of(history[s], i);
      std::vector<Atom> kept;
      for (auto& a : sets[i]) {
        const double p = fn.strategy[i].prob(a.belief, ai);
        if (p > 0.0) kept.push_back({a.belief, a.weight * p});
      }
      sets[i] = observe(spec, i, kept, history[s]);
    }
    idx = fn.children.at(history[s]);
  }
  for (const auto& set : sets)
    if (set.empty()) return out;
  out.positive_probability = true;

  // Every continuation along the queried sequence must play it surely.
  for (std::size_t s = 0; s < actions.size(); ++s) {
    const auto& fn = profile.nodes[idx];
    for (std::size_t i = 0; i < spec.num_players; ++i) {
      const std::size_t ai = spec.action_of(actions[s], i);
      for (const auto& a : sets[i])
        if (fn.strategy[i].prob(a.belief, ai) < 1.0 - kCertainTolerance) return out;
    }
    if (s + 1 == actions.size()) break;
    auto it = fn.children.find(actions[s]);
    if (it == fn.children.end()) return out;
    for (std::size_t i = 0; i < spec.num_players; ++i)
      sets[i] = observe(spec, i, sets[i], actions[s]);
    idx = it->second;
  }
  out.holds = true;
  return out;
}

std::vector<std::vector<std::size_t>> enumerate_histories(const ForwardProfile& profile,
                                                          std::size_t max_depth) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& n : profile.nodes)
    if (n.history.size() <= max_depth) out.push_back(n.history);
  return out;
}

EquivalenceReport check_equivalence(const ForwardProfile& profile, const EquilibriumRule& rule,
                                    const std::vector<std::vector<std::size_t>>& histories,
                                    std::size_t joint_action) {
  const GameSpec& spec = rule.spec;
  EquivalenceReport report;
  for (const auto& h : histories) {
    const std::size_t t = h.size() + 1;
    const std::vector<std::size_t> seq(steps_left(spec, t), joint_action);
    const auto hist = is_cascading_history(profile, rule, h, seq);
    if (!hist.positive_probability) {
      ++report.skipped_zero_probability;
      continue;
    }
    ++report.checked;
    bool belief = true;
    if (t <= spec.horizon) {
      const std::size_t node = profile.nodes[profile.follow(h)].rule_node;
      belief = is_cascading_belief(rule, t, node, seq).holds;
    }
    if (belief && hist.holds) ++report.cascading;
    if (belief != hist.holds) report.counterexamples.push_back({h, joint_action, hist.holds, belief});
  }
  return report;
}

}  // namespace infocascade
