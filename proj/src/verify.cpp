#include "infocascade/verify.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace infocascade {

namespace {

struct World {
  std::vector<std::size_t> states;
  std::vector<PrivateBelief> beliefs;
  double weight = 0.0;
};

class TreeDeviation {
 public:
  TreeDeviation(const EquilibriumRule& rule, std::size_t player, DeviationReport& report)
      : rule_(rule), spec_(rule.spec), player_(player), eval_(rule, false), report_(report) {}

  // Returns (best-response total, equilibrium total), both unnormalised.
  std::pair<double, double> explore(std::size_t t, std::size_t node, const std::vector<World>& worlds,
                                    const std::vector<std::size_t>& history) {
    double mass = 0.0;
    for (const auto& w : worlds) mass += w.weight;
    const PrivateBelief& own = worlds.front().beliefs[player_];
    const std::size_t eq_action = eval_.action(node, player_, own);

    double best = -std::numeric_limits<double>::infinity();
    double eq_total = 0.0;
    for (std::size_t b = 0; b < spec_.spaces[player_].actions; ++b) {
      double br_b = 0.0, eq_b = 0.0;
      std::map<std::pair<std::size_t, std::size_t>, std::vector<World>> groups;
      for (const auto& w : worlds) {
        std::vector<std::size_t> acts(spec_.num_players);
        for (std::size_t j = 0; j < spec_.num_players; ++j)
          acts[j] = j == player_ ? b : eval_.action(node, j, w.beliefs[j]);
        const std::size_t a = spec_.encode_actions(acts);
        const double r = w.weight * spec_.reward_at(player_, spec_.encode_states(w.states), a);
        br_b += r;
        eq_b += r;
        if (t < spec_.horizon) spread(w, a, groups);
      }
      for (auto& [key, group] : groups) {
        const auto [a, obs] = key;
        const auto child = rule_.child(node, a);
        if (!child) {
          std::ostringstream os;
          os << "rule node " << node << " lacks the child for joint action " << a;
          throw std::logic_error(os.str());
        }
        auto next_history = history;
        next_history.push_back(a);
        const auto [br, eq] = explore(t + 1, *child, group, next_history);
        br_b += br;
        eq_b += eq;
      }
      best = std::max(best, br_b);
      if (b == eq_action) eq_total = eq_b;
    }

    ++report_.information_sets_checked;
    const double gain = (best - eq_total) / mass;
    if (gain > multi_gain_) multi_gain_ = gain;
    if (gain > report_.worst.gain) {
      report_.worst = {"multi-stage", t, node, player_, own.probs, history, gain};
    }
    return {best, eq_total};
  }

  double multi_gain() const { return multi_gain_; }

 private:
  // Enumerates next states and observations of every player after joint action a,
  // grouping the resulting worlds by the deviating player's new information.
  void spread(const World& w, std::size_t a,
              std::map<std::pair<std::size_t, std::size_t>, std::vector<World>>& groups) {
    std::vector<std::vector<std::tuple<std::size_t, std::size_t, double>>> moves(spec_.num_players);
    for (std::size_t j = 0; j < spec_.num_players; ++j) {
      const auto row = spec_.transition_row(j, a, w.states[j]);
      for (std::size_t y = 0; y < row.size(); ++y) {
        if (row[y] == 0.0) continue;
        const auto obs = spec_.observation_row(j, a, y);
        for (std::size_t o = 0; o < obs.size(); ++o)
          if (obs[o] != 0.0) moves[j].emplace_back(y, o, row[y] * obs[o]);
      }
    }
    std::vector<std::size_t> pick(spec_.num_players, 0);
    while (true) {
      World next;
      next.weight = w.weight;
      next.states.resize(spec_.num_players);
      std::size_t own_obs = 0;
      for (std::size_t j = 0; j < spec_.num_players; ++j) {
        const auto& [y, o, p] = moves[j][pick[j]];
        next.states[j] = y;
        next.weight *= p;
        next.beliefs.push_back(private_update(spec_, j, w.beliefs[j], o, a));
        if (j == player_) own_obs = o;
      }
      if (next.weight > 0.0) groups[{a, own_obs}].push_back(std::move(next));
      std::size_t pos = spec_.num_players;
      while (pos-- > 0) {
        if (++pick[pos] < moves[pos].size()) break;
        pick[pos] = 0;
      }
      if (pos == static_cast<std::size_t>(-1)) break;
    }
  }

  const EquilibriumRule& rule_;
  const GameSpec& spec_;
  std::size_t player_;
  RuleEvaluator eval_;
  DeviationReport& report_;
  double multi_gain_ = 0.0;
};

}  // namespace

DeviationReport verify_equilibrium(const EquilibriumRule& rule, std::size_t multi_stage_horizon) {
  const GameSpec& spec = rule.spec;
  DeviationReport report;
  report.worst.kind = "single-stage";

  RuleEvaluator eval(rule, false);
  for (const auto& n : rule.nodes) {
    for (std::size_t i = 0; i < spec.num_players; ++i) {
      const auto& pp = n.players[i];
      for (std::size_t c = 0; c < pp.prescription.num_cells(); ++c) {
        const auto& cell = pp.prescription.cell(c);
        const auto& q = eval.action_values(n.id, i, cell);
        const double gain = *std::max_element(q.begin(), q.end()) - q[pp.actions[c]];
        ++report.cells_checked;
        if (gain > report.single_stage_gain) report.single_stage_gain = gain;
        if (gain > report.worst.gain) report.worst = {"single-stage", n.t, n.id, i, cell.probs, {}, gain};
      }
    }
  }
  report.max_gain = report.single_stage_gain;

  const auto& root = rule.node(rule.root);
  report.root_value_rule.assign(spec.num_players, 0.0);
  for (std::size_t i = 0; i < spec.num_players; ++i)
    for (const auto& atom : root.belief[i].atoms())
      report.root_value_rule[i] += atom.weight * eval.value(rule.root, i, atom.belief);

  if (spec.horizon > multi_stage_horizon) return report;

  // Root worlds: every combination of root atoms and states.
  std::vector<World> worlds;
  std::vector<std::vector<std::size_t>> atom_pick;
  {
    std::vector<std::size_t> pick(spec.num_players, 0);
    while (true) {
      for (std::size_t xs = 0; xs < spec.joint_states(); ++xs) {
        World w;
        w.states = spec.decode_states(xs);
        w.weight = 1.0;
        for (std::size_t j = 0; j < spec.num_players; ++j) {
          const auto& atom = root.belief[j].atoms()[pick[j]];
          w.weight *= atom.weight * atom.belief[w.states[j]];
          w.beliefs.push_back(atom.belief);
        }
        if (w.weight > 0.0) {
          worlds.push_back(std::move(w));
          atom_pick.push_back(pick);
        }
      }
      std::size_t pos = spec.num_players;
      while (pos-- > 0) {
        if (++pick[pos] < root.belief[pos].size()) break;
        pick[pos] = 0;
      }
      if (pos == static_cast<std::size_t>(-1)) break;
    }
  }

  double multi = 0.0;
  report.root_value_enumerated.assign(spec.num_players, 0.0);
  for (std::size_t i = 0; i < spec.num_players; ++i) {
    TreeDeviation dev(rule, i, report);
    for (std::size_t k = 0; k < root.belief[i].size(); ++k) {
      std::vector<World> info;
      for (std::size_t w = 0; w < worlds.size(); ++w)
        if (atom_pick[w][i] == k) info.push_back(worlds[w]);
      if (info.empty()) continue;
      const auto [br, eq] = dev.explore(1, rule.root, info, {});
      report.root_value_enumerated[i] += eq;
    }
    multi = std::max(multi, dev.multi_gain());
  }
  report.multi_stage_gain = multi;
  report.max_gain = std::max(report.max_gain, multi);
  return report;
}

}  // namespace infocascade
