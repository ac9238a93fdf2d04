#include "infocascade/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace infocascade {

namespace {

bool identical(const JointPublicBelief& a, const JointPublicBelief& b) {
  if (a.num_players() != b.num_players()) return false;
  for (std::size_t i = 0; i < a.num_players(); ++i) {
    const auto& x = a[i].atoms();
    const auto& y = b[i].atoms();
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k].weight != y[k].weight || x[k].belief.probs != y[k].belief.probs) return false;
  }
  return true;
}

bool close(const JointPublicBelief& a, const JointPublicBelief& b, double tol) {
  if (a.num_players() != b.num_players()) return false;
  for (std::size_t i = 0; i < a.num_players(); ++i) {
    const auto& x = a[i].atoms();
    const auto& y = b[i].atoms();
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (std::abs(x[k].weight - y[k].weight) > tol || max_abs_diff(x[k].belief, y[k].belief) > tol)
        return false;
  }
  return true;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
    return std::numeric_limits<std::size_t>::max();
  return a * b;
}

struct Evaluation {
  std::vector<PlayerMarginal> marginals;
  std::map<std::size_t, ChildRef> children;
  std::vector<std::vector<std::vector<double>>> q;  // [player][atom][action]
  double residual = 0.0;
};

class StageSearch {
 public:
  StageSearch(const GameSpec& spec, std::size_t t, const JointPublicBelief& pi,
              const ChildFactory& factory, const SolverConfig& config)
      : spec_(spec), t_(t), pi_(pi), factory_(factory), config_(config) {}

  Evaluation evaluate(const SupportProfile& profile, bool with_continuation) const {
    Evaluation ev;
    const auto gamma = support_prescriptions(spec_, pi_, profile);
    for (std::size_t j = 0; j < spec_.num_players; ++j)
      ev.marginals.push_back(player_marginal(spec_, j, pi_[j], gamma[j]));
    if (with_continuation && t_ < spec_.horizon) {
      for (std::size_t a = 0; a < spec_.joint_actions(); ++a) {
        if (!needed(ev.marginals, a)) continue;
        ev.children.emplace(a, factory_(a, joint_public_update(spec_, pi_, gamma, a)));
      }
    }
    ev.q.resize(spec_.num_players);
    for (std::size_t i = 0; i < spec_.num_players; ++i) {
      const Continuation cont = [&, i](std::size_t a, const PrivateBelief& next) {
        if (!with_continuation) return 0.0;
        return ev.children.at(a).value(i, next);
      };
      for (std::size_t k = 0; k < pi_[i].size(); ++k) {
        ev.q[i].push_back(action_values(spec_, t_, i, pi_[i].atoms()[k].belief, ev.marginals, cont));
        const auto& q = ev.q[i].back();
        const double best = *std::max_element(q.begin(), q.end());
        ev.residual = std::max(ev.residual, best - q[profile[i][k]]);
      }
    }
    return ev;
  }

  SupportProfile improve(const SupportProfile& profile, const Evaluation& ev) const {
    SupportProfile next = profile;
    for (std::size_t i = 0; i < next.size(); ++i) {
      for (std::size_t k = 0; k < next[i].size(); ++k) {
        const auto& q = ev.q[i][k];
        const double best = *std::max_element(q.begin(), q.end());
        if (best - q[profile[i][k]] > config_.tolerance) next[i][k] = lowest_argmax(q);
      }
    }
    return next;
  }

  SupportProfile zero_profile() const {
    SupportProfile p(spec_.num_players);
    for (std::size_t i = 0; i < spec_.num_players; ++i) p[i].assign(pi_[i].size(), 0);
    return p;
  }

  SupportProfile myopic() const {
    SupportProfile p = zero_profile();
    for (std::size_t it = 0; it < config_.max_iterations; ++it) {
      const auto ev = evaluate(p, false);
      if (ev.residual <= config_.tolerance) break;
      auto next = improve(p, ev);
      if (next == p) break;
      p = std::move(next);
    }
    return p;
  }

 private:
  bool needed(const std::vector<PlayerMarginal>& marginals, std::size_t a) const {
    for (std::size_t i = 0; i < spec_.num_players; ++i) {
      double w = 1.0;
      for (std::size_t j = 0; j < spec_.num_players && w > 0.0; ++j)
        if (j != i) w *= marginals[j].action[spec_.action_of(a, j)];
      if (w > 0.0) return true;
    }
    return false;
  }

  const GameSpec& spec_;
  std::size_t t_;
  const JointPublicBelief& pi_;
  const ChildFactory& factory_;
  const SolverConfig& config_;
};

class BackwardSolver {
 public:
  BackwardSolver(const GameSpec& spec, const SolverConfig& config) : evaluator_(rule_) {
    rule_.spec = spec;
    rule_.config = config;
  }

  EquilibriumRule run(const JointPublicBelief& root) {
    const auto canon = canonical(root);
    rule_.root = solve(1, canon, belief_key(1, canon));
    return compact();
  }

 private:
  std::size_t solve(std::size_t t, const JointPublicBelief& belief, std::uint64_t key) {
    if (rule_.config.memoize) {
      if (auto it = memo_.find(key); it != memo_.end())
        for (std::size_t id : it->second)
          if (identical(rule_.nodes[id].belief, belief)) return id;
      if (auto it = failures_.find(key); it != failures_.end())
        for (const auto& [b, err] : it->second)
          if (identical(b, belief)) throw err;
    }
    if (++created_ > rule_.config.max_nodes) {
      std::ostringstream os;
      os << "belief tree exceeds the node budget of " << rule_.config.max_nodes;
      throw ResourceError(os.str(), created_);
    }

    const ChildFactory factory = [this, t](std::size_t, const JointPublicBelief& child) {
      auto c = canonical(child);
      const auto k = belief_key(t + 1, c);
      const std::size_t id = solve(t + 1, c, k);
      return ChildRef{id, [this, id](std::size_t player, const PrivateBelief& xi) {
                        return evaluator_.value(id, player, xi);
                      }};
    };

    StageSolution sol;
    try {
      sol = solve_stage(rule_.spec, t, belief, factory, rule_.config);
    } catch (const NoPureFixedPoint& e) {
      std::vector<NodeRef> path{{t, key}};
      path.insert(path.end(), e.path().begin(), e.path().end());
      NoPureFixedPoint err(e.what(), e.best_residual(), std::move(path));
      failures_[key].emplace_back(belief, err);
      throw err;
    }

    RuleNode node;
    node.id = rule_.nodes.size();
    node.t = t;
    node.belief = belief;
    node.key = key;
    node.players = std::move(sol.players);
    node.children = std::move(sol.children);
    node.residual = sol.residual;
    rule_.nodes.push_back(std::move(node));
    memo_[key].push_back(rule_.nodes.back().id);
    return rule_.nodes.back().id;
  }

  // Keeps the nodes reachable from the root, renumbered breadth first.
  EquilibriumRule compact() {
    EquilibriumRule out;
    out.spec = rule_.spec;
    out.config = rule_.config;
    std::unordered_map<std::size_t, std::size_t> renumber;
    std::deque<std::size_t> queue{rule_.root};
    renumber[rule_.root] = 0;
    std::vector<std::size_t> order;
    while (!queue.empty()) {
      const std::size_t id = queue.front();
      queue.pop_front();
      order.push_back(id);
      for (const auto& [a, c] : rule_.nodes[id].children) {
        if (renumber.emplace(c, renumber.size()).second) queue.push_back(c);
      }
    }
    out.nodes.reserve(order.size());
    for (std::size_t id : order) {
      RuleNode n = rule_.nodes[id];
      n.id = renumber.at(id);
      for (auto& [a, c] : n.children) c = renumber.at(c);
      out.nodes.push_back(std::move(n));
    }
    out.root = 0;
    return out;
  }

  EquilibriumRule rule_;
  RuleEvaluator evaluator_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> memo_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<JointPublicBelief, NoPureFixedPoint>>>
      failures_;
  std::size_t created_ = 0;
};

}  // namespace

PlayerMarginal player_marginal(const GameSpec& spec, std::size_t player, const PublicBelief& pi,
                               const Prescription& gamma) {
  PlayerMarginal m;
  m.states = spec.spaces.at(player).states;
  m.actions = spec.spaces[player].actions;
  m.joint.assign(m.states * m.actions, 0.0);
  m.action.assign(m.actions, 0.0);
  for (const auto& atom : pi.atoms()) {
    const auto dist = gamma.at(atom.belief);
    for (std::size_t b = 0; b < m.actions; ++b) {
      if (dist[b] == 0.0) continue;
      m.action[b] += atom.weight * dist[b];
      for (std::size_t x = 0; x < m.states; ++x)
        m.joint[x * m.actions + b] += atom.weight * atom.belief[x] * dist[b];
    }
  }
  return m;
}

std::vector<double> action_values(const GameSpec& spec, std::size_t t, std::size_t player,
                                  const PrivateBelief& own,
                                  const std::vector<PlayerMarginal>& marginals,
                                  const Continuation& continuation) {
  std::vector<double> out(spec.spaces.at(player).actions, 0.0);
  const std::size_t nx = spec.joint_states();
  for (std::size_t a = 0; a < spec.joint_actions(); ++a) {
    const auto acts = spec.decode_actions(a);
    double w = 1.0;
    for (std::size_t j = 0; j < spec.num_players && w > 0.0; ++j)
      if (j != player) w *= marginals[j].action[acts[j]];
    if (w == 0.0) continue;

    double reward = 0.0;
    for (std::size_t xs = 0; xs < nx; ++xs) {
      const auto states = spec.decode_states(xs);
      double p = own[states[player]];
      for (std::size_t j = 0; j < spec.num_players && p != 0.0; ++j)
        if (j != player) p *= marginals[j].joint[states[j] * marginals[j].actions + acts[j]];
      if (p == 0.0) continue;
      reward += p * spec.reward_at(player, xs, a);
    }
    out[acts[player]] += reward;

    if (t < spec.horizon) {
      const auto next = private_kernel(spec, player, own, a);
      double cont = 0.0;
      for (const auto& atom : next.atoms()) cont += atom.weight * continuation(a, atom.belief);
      out[acts[player]] += w * cont;
    }
  }
  return out;
}

double stage_payoff(const GameSpec& spec, std::size_t t, std::size_t player,
                    const JointPublicBelief& pi, const PrivateBelief& own,
                    std::span<const double> own_dist, const PrescriptionProfile& profile,
                    const Continuation& continuation) {
  std::vector<PlayerMarginal> marginals;
  for (std::size_t j = 0; j < spec.num_players; ++j)
    marginals.push_back(player_marginal(spec, j, pi[j], profile[j]));
  const auto q = action_values(spec, t, player, own, marginals, continuation);
  double v = 0.0;
  for (std::size_t b = 0; b < q.size(); ++b)
    if (own_dist[b] != 0.0) v += own_dist[b] * q[b];
  return v;
}

PrescriptionProfile support_prescriptions(const GameSpec& spec, const JointPublicBelief& pi,
                                          const SupportProfile& profile) {
  PrescriptionProfile out;
  for (std::size_t i = 0; i < spec.num_players; ++i) {
    Prescription p(spec.spaces[i].actions);
    for (std::size_t k = 0; k < pi[i].size(); ++k)
      p.add_pure_cell(pi[i].atoms()[k].belief, profile[i][k]);
    p.set_anchored(pi[i].size());
    out.push_back(std::move(p));
  }
  return out;
}

std::size_t lowest_argmax(std::span<const double> values) {
  const double best = *std::max_element(values.begin(), values.end());
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] >= best - kTieEpsilon) return k;
  return 0;
}

StageSolution solve_stage(const GameSpec& spec, std::size_t t, const JointPublicBelief& pi,
                          const ChildFactory& children, const SolverConfig& config,
                          const std::optional<SupportProfile>& seed) {
  StageSearch search(spec, t, pi, children, config);
  std::optional<std::pair<SupportProfile, Evaluation>> found;
  double best_residual = std::numeric_limits<double>::infinity();
  std::optional<NoPureFixedPoint> child_failure;

  auto attempt = [&](const SupportProfile& p) -> std::optional<Evaluation> {
    try {
      auto ev = search.evaluate(p, true);
      best_residual = std::min(best_residual, ev.residual);
      return ev;
    } catch (const NoPureFixedPoint& e) {
      if (!child_failure) child_failure = e;
      return std::nullopt;
    }
  };

  // Iterated best response.
  SupportProfile profile = seed ? *seed : search.myopic();
  std::set<SupportProfile> seen{profile};
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    auto ev = attempt(profile);
    if (!ev) break;
    if (ev->residual <= config.tolerance) {
      found.emplace(profile, std::move(*ev));
      break;
    }
    auto next = search.improve(profile, *ev);
    if (!seen.insert(next).second) break;
    profile = std::move(next);
  }

  // Exhaustive fallback over pure support profiles, lexicographic order.
  if (!found) {
    std::size_t total = 1;
    std::vector<std::size_t> radix;
    for (std::size_t i = 0; i < spec.num_players; ++i)
      for (std::size_t k = 0; k < pi[i].size(); ++k) {
        radix.push_back(spec.spaces[i].actions);
        total = saturating_mul(total, spec.spaces[i].actions);
      }
    if (total <= config.max_enumeration) {
      std::vector<std::size_t> digits(radix.size(), 0);
      for (std::size_t n = 0; n < total && !found; ++n) {
        SupportProfile p = search.zero_profile();
        std::size_t d = 0;
        for (std::size_t i = 0; i < p.size(); ++i)
          for (std::size_t k = 0; k < p[i].size(); ++k) p[i][k] = digits[d++];
        if (auto ev = attempt(p); ev && ev->residual <= config.tolerance)
          found.emplace(p, std::move(*ev));
        for (std::size_t pos = digits.size(); pos-- > 0;) {
          if (++digits[pos] < radix[pos]) break;
          digits[pos] = 0;
        }
      }
    }
  }

  if (!found) {
    std::ostringstream os;
    os << "no pure fixed point found at t=" << t << " (best residual " << best_residual << ")";
    std::vector<NodeRef> path;
    if (child_failure && !std::isfinite(best_residual)) path = child_failure->path();
    throw NoPureFixedPoint(os.str(), best_residual, std::move(path));
  }

  auto& [chosen, ev] = *found;
  StageSolution sol;
  sol.residual = ev.residual;
  for (const auto& [a, ref] : ev.children) sol.children.emplace(a, ref.node);
  for (std::size_t i = 0; i < spec.num_players; ++i) {
    PlayerPrescription pp;
    pp.prescription = Prescription(spec.spaces[i].actions);
    pp.support_count = pi[i].size();
    for (std::size_t k = 0; k < pi[i].size(); ++k) {
      pp.prescription.add_pure_cell(pi[i].atoms()[k].belief, chosen[i][k]);
      pp.actions.push_back(chosen[i][k]);
      pp.values.push_back(ev.q[i][k][chosen[i][k]]);
    }
    pp.prescription.set_anchored(pp.support_count);
    const Continuation cont = [&, i](std::size_t a, const PrivateBelief& next) {
      return ev.children.at(a).value(i, next);
    };
    for (auto& cell : simplex_grid(spec.spaces[i].states, config.grid_k)) {
      const auto q = action_values(spec, t, i, cell, ev.marginals, cont);
      const std::size_t b = lowest_argmax(q);
      pp.prescription.add_pure_cell(std::move(cell), b);
      pp.actions.push_back(b);
      pp.values.push_back(q[b]);
    }
    sol.players.push_back(std::move(pp));
  }
  return sol;
}

PrescriptionProfile EquilibriumRule::profile(std::size_t id) const {
  PrescriptionProfile out;
  for (const auto& p : node(id).players) out.push_back(p.prescription);
  return out;
}

std::optional<std::size_t> EquilibriumRule::child(std::size_t id, std::size_t joint_action) const {
  const auto& c = node(id).children;
  if (auto it = c.find(joint_action); it != c.end()) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> EquilibriumRule::find(std::size_t t,
                                                 const JointPublicBelief& belief) const {
  const auto canon = canonical(belief);
  for (const auto& n : nodes)
    if (n.t == t && identical(n.belief, canon)) return n.id;
  return std::nullopt;
}

double EquilibriumRule::max_residual() const {
  double r = 0.0;
  for (const auto& n : nodes) r = std::max(r, n.residual);
  return r;
}

std::size_t RuleEvaluator::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(k.node);
  mix(k.player);
  for (double v : k.xi) mix(std::bit_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

const std::vector<double>& RuleEvaluator::action_values(std::size_t node, std::size_t player,
                                                        const PrivateBelief& xi) {
  Key key{node, player, xi.probs};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const RuleNode& n = rule_.node(node);
  auto mit = marginals_.find(node);
  if (mit == marginals_.end()) {
    std::vector<PlayerMarginal> m;
    for (std::size_t j = 0; j < rule_.spec.num_players; ++j)
      m.push_back(player_marginal(rule_.spec, j, n.belief[j], n.players[j].prescription));
    mit = marginals_.emplace(node, std::move(m)).first;
  }
  const Continuation cont = [&](std::size_t a, const PrivateBelief& next) {
    auto c = n.children.find(a);
    if (c == n.children.end()) {
      std::ostringstream os;
      os << "node " << node << " has no continuation for joint action " << a;
      throw std::logic_error(os.str());
    }
    return value(c->second, player, next);
  };
  auto q = infocascade::action_values(rule_.spec, n.t, player, xi, mit->second, cont);
  return cache_.emplace(std::move(key), std::move(q)).first->second;
}

double RuleEvaluator::value(std::size_t node, std::size_t player, const PrivateBelief& xi) {
  const RuleNode& n = rule_.node(node);
  const std::size_t k = n.belief[player].find(xi);
  if (k != PublicBelief::npos) {
    if (use_stored_values_) return n.players[player].values[k];
    return action_values(node, player, n.belief[player].atoms()[k].belief)[n.support_action(player, k)];
  }
  const auto& q = action_values(node, player, xi);
  return q[lowest_argmax(q)];
}

std::size_t RuleEvaluator::action(std::size_t node, std::size_t player, const PrivateBelief& xi) {
  const RuleNode& n = rule_.node(node);
  const std::size_t k = n.belief[player].find(xi);
  if (k != PublicBelief::npos) return n.support_action(player, k);
  return lowest_argmax(action_values(node, player, xi));
}

EquilibriumRule backward_solve(const GameSpec& spec, const JointPublicBelief& root,
                               const SolverConfig& config) {
  spec.check_shapes();
  if (root.num_players() != spec.num_players)
    throw SpecError("root belief must have one component per player");
  BackwardSolver solver(spec, config);
  return solver.run(root);
}

std::size_t ForwardProfile::follow(std::span<const std::size_t> history) const {
  std::size_t cur = 0;
  for (std::size_t s = 0; s < history.size(); ++s) {
    const auto& c = nodes.at(cur).children;
    auto it = c.find(history[s]);
    if (it == c.end()) {
      std::ostringstream os;
      os << "history leaves the solved tree at step " << s + 1 << " (joint action " << history[s]
         << " from rule node " << nodes[cur].rule_node << ")";
      throw std::out_of_range(os.str());
    }
    cur = it->second;
  }
  return cur;
}

double count_histories(const EquilibriumRule& rule) {
  std::vector<std::size_t> order(rule.nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rule.nodes[a].t < rule.nodes[b].t; });
  std::vector<double> paths(rule.nodes.size(), 0.0);
  paths[rule.root] = 1.0;
  double total = 0.0;
  for (std::size_t id : order) {
    total += paths[id];
    for (const auto& [a, c] : rule.nodes[id].children) paths[c] += paths[id];
  }
  return total;
}

ForwardProfile forward_construct(const EquilibriumRule& rule, std::size_t max_depth) {
  ForwardProfile fp;
  ForwardNode root;
  root.rule_node = rule.root;
  root.t = rule.node(rule.root).t;
  root.belief = rule.node(rule.root).belief;
  root.strategy = rule.profile(rule.root);
  fp.nodes.push_back(std::move(root));
  for (std::size_t idx = 0; idx < fp.nodes.size(); ++idx) {
    const std::size_t rn = fp.nodes[idx].rule_node;
    if (fp.nodes[idx].history.size() >= max_depth) continue;
    for (const auto& [a, child] : rule.node(rn).children) {
      ForwardNode next;
      next.history = fp.nodes[idx].history;
      next.history.push_back(a);
      next.t = fp.nodes[idx].t + 1;
      next.rule_node = child;
      next.belief = joint_public_update(rule.spec, fp.nodes[idx].belief, fp.nodes[idx].strategy, a);
      if (!close(canonical(next.belief), rule.node(child).belief, 1e-9)) {
        std::ostringstream os;
        os << "belief after joint action " << a << " from rule node " << rn
           << " disagrees with stored node " << child;
        throw std::logic_error(os.str());
      }
      next.off_equilibrium = fp.nodes[idx].off_equilibrium || next.belief.off_equilibrium();
      next.strategy = rule.profile(child);
      fp.nodes[idx].children.emplace(a, fp.nodes.size());
      fp.nodes.push_back(std::move(next));
    }
  }
  return fp;
}

}  // namespace infocascade
