#include "infocascade/pipeline.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "infocascade/cascade.hpp"
#include "infocascade/monte_carlo.hpp"
#include "infocascade/rule_io.hpp"
#include "infocascade/spec_io.hpp"
#include "infocascade/verify.hpp"
#include "json_codec.hpp"

namespace infocascade {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RuleFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& content, RunResult& result) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw IoError("cannot write " + path.string());
  result.files.push_back(path.string());
}

fs::path prepare_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create " + config.out_dir + ": " + ec.message());
  return fs::path(config.out_dir);
}

struct Inputs {
  SpecDocument doc;
  std::string digest;
};

Inputs load_inputs(const RunConfig& config) {
  if (config.spec_path.empty()) throw IoError("--spec is required");
  Inputs in{load_spec_file(config.spec_path), {}};
  if (config.horizon) in.doc.set_horizon(*config.horizon);
  const auto violations = validate_spec(in.doc.game);
  if (!violations.empty()) {
    std::ostringstream os;
    os << violations.size() << " invalid table entries; first: " << violations[0].table << "."
       << violations[0].player << " row " << violations[0].row << ": " << violations[0].message;
    throw SpecError(os.str());
  }
  in.digest = detail::hex64(config_digest(write_spec(in.doc), config));
  return in;
}

EquilibriumRule load_rule(const RunConfig& config, const GameSpec& expected) {
  const std::string path =
      config.rule_path.empty() ? (fs::path(config.out_dir) / "rule.json").string() : config.rule_path;
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError&) {
    throw RuleFileError("no solved rule at " + path + " (run solve first)");
  }
  EquilibriumRule rule;
  try {
    rule = rule_from_json(text);
  } catch (const std::exception& e) {
    throw RuleFileError(path + ": " + e.what());
  }
  if (detail::spec_to_json(rule.spec) != detail::spec_to_json(expected))
    throw RuleFileError(path + " was solved for a different game than --spec describes");
  return rule;
}

json header(const Inputs& in) { return {{"tool", kToolVersion}, {"config_digest", in.digest}}; }

std::string dump(const json& j) { return j.dump(1) + "\n"; }

std::string csv_header(const Inputs& in) {
  return std::string("# ") + kToolVersion + " config=" + in.digest + "\n";
}

json node_means(const JointPublicBelief& pi) {
  json out = json::array();
  for (const auto& c : pi.per_player) out.push_back(mean_belief(c));
  return out;
}

std::string actions_label(const GameSpec& spec, std::size_t joint_action) {
  std::string s;
  for (auto a : spec.decode_actions(joint_action)) {
    if (!s.empty()) s += ':';
    s += std::to_string(a);
  }
  return s;
}

// Shared action of every cell, or null when the prescription varies with the belief.
json constant_action(const PlayerPrescription& p) {
  for (auto a : p.actions)
    if (a != p.actions.front()) return nullptr;
  return p.actions.front();
}

// Above this many common histories the solve skips the forward consistency pass.
constexpr double kForwardCheckLimit = 1e5;

json solve_summary(const Inputs& in, const EquilibriumRule& rule, const ForwardProfile* fwd) {
  json j = header(in);
  j["status"] = "solved";
  j["nodes"] = rule.nodes.size();
  j["max_residual"] = rule.max_residual();
  j["common_histories"] = count_histories(rule);
  if (fwd) {
    std::size_t off = 0;
    for (const auto& n : fwd->nodes) off += n.off_equilibrium ? 1 : 0;
    j["forward_check"] = "passed";
    j["off_equilibrium_histories"] = off;
  } else {
    j["forward_check"] = "skipped";
  }

  const RuleNode& root = rule.node(rule.root);
  json root_values = json::array();
  for (std::size_t i = 0; i < rule.spec.num_players; ++i) {
    json atoms = json::array();
    for (std::size_t k = 0; k < root.players[i].support_count; ++k)
      atoms.push_back({{"belief", root.belief[i].atoms()[k].belief.probs},
                       {"weight", root.belief[i].atoms()[k].weight},
                       {"action", root.players[i].actions[k]},
                       {"value", root.players[i].values[k]}});
    root_values.push_back(atoms);
  }
  j["root"] = root_values;

  json nodes = json::array();
  std::size_t in_cascade = 0;
  double max_error = 0.0;
  for (const auto& n : rule.nodes) {
    json players = json::array();
    for (const auto& p : n.players) players.push_back(constant_action(p));
    json jn = {{"id", n.id}, {"t", n.t}, {"public_means", node_means(n.belief)}, {"constant_action", players}};
    if (in.doc.investment) {
      const auto& params = *in.doc.investment;
      json analytic = json::array();
      for (std::size_t a = 0; a < rule.spec.joint_actions(); ++a) {
        const auto acts = rule.spec.decode_actions(a);
        if (!in_analytic_cascade(n.belief, acts, params)) continue;
        analytic.push_back(actions_label(rule.spec, a));
        ++in_cascade;
        for (std::size_t i = 0; i < rule.spec.num_players; ++i) {
          const auto& p = n.players[i];
          const double hat = hat_xi_excluding(n.belief, i);
          for (std::size_t c = 0; c < p.prescription.num_cells(); ++c) {
            const double closed = cascade_value(params, n.t, p.prescription.cell(c)[1], hat, acts[i]);
            max_error = std::max(max_error, std::abs(closed - p.values[c]));
          }
        }
      }
      jn["analytic_cascade"] = analytic;
    }
    nodes.push_back(std::move(jn));
  }
  j["node_summary"] = nodes;
  if (in.doc.investment)
    j["cascade_value_check"] = {{"nodes_in_analytic_cascade", in_cascade},
                                {"max_abs_error", max_error}};
  return j;
}

std::unique_ptr<StrategyTree> make_tree(const RunConfig& config, const Inputs& in,
                                        std::optional<EquilibriumRule>& rule) {
  const GameSpec& spec = in.doc.game;
  if (config.policy == "rule") {
    rule = load_rule(config, spec);
    return std::make_unique<RuleStrategy>(*rule);
  }
  if (config.policy == "myopic") {
    if (!in.doc.investment) throw SpecError("policy myopic needs an [investment] spec");
    return std::make_unique<PolicyStrategy>(spec, in.doc.root_belief(),
                                            myopic_investment_policy(*in.doc.investment, config.grid_k));
  }
  const std::size_t action = std::stoul(config.policy.substr(9));
  for (const auto& s : spec.spaces)
    if (action >= s.actions) throw SpecError("policy action " + std::to_string(action) + " out of range");
  return std::make_unique<PolicyStrategy>(spec, in.doc.root_belief(), constant_policy(spec, action));
}

std::string trajectories_csv(const Inputs& in, const MonteCarloResult& mc, const GameSpec& spec) {
  std::string out = csv_header(in);
  out += "traj,t,player,xi,action,in_cascade\n";
  for (std::size_t k = 0; k < mc.trajectories.size(); ++k) {
    const auto& rec = mc.trajectories[k];
    const std::string traj = std::to_string(k);
    for (std::size_t t = 0; t < rec.actions.size(); ++t) {
      const auto acts = spec.decode_actions(rec.actions[t]);
      const char* flag = rec.in_cascade.empty() ? "" : (rec.in_cascade[t] ? "1" : "0");
      for (std::size_t i = 0; i < acts.size(); ++i) {
        out += traj;
        out += ',';
        out += std::to_string(t + 1);
        out += ',';
        out += std::to_string(i);
        out += ',';
        out += format_double(rec.beliefs[t][i].probs.back());
        out += ',';
        out += std::to_string(acts[i]);
        out += ',';
        out += flag;
        out += '\n';
      }
    }
  }
  return out;
}

std::string entry_times_csv(const Inputs& in, const MonteCarloSummary& s, const GameSpec& spec) {
  std::string out = csv_header(in);
  out += "joint_action,actions,t,count\n";
  for (std::size_t a = 0; a < s.entry_counts.size(); ++a)
    for (std::size_t t = 0; t < s.entry_counts[a].size(); ++t)
      out += std::to_string(a) + ',' + actions_label(spec, a) + ',' +
             (t < s.horizon ? std::to_string(t + 1) : std::string("never")) + ',' +
             std::to_string(s.entry_counts[a][t]) + '\n';
  return out;
}

json witness_json(const CascadeWitness& w) {
  return {{"t", w.t}, {"node", w.node}, {"player", w.player}, {"atom", w.atom}, {"probability", w.probability}};
}

json deviation_json(const DeviationReport& r) {
  json site = {{"kind", r.worst.kind},     {"t", r.worst.t},         {"node", r.worst.node},
               {"player", r.worst.player}, {"belief", r.worst.belief}, {"history", r.worst.history},
               {"gain", r.worst.gain}};
  return {{"max_gain", r.max_gain},
          {"single_stage_gain", r.single_stage_gain},
          {"multi_stage_gain", r.multi_stage_gain ? json(*r.multi_stage_gain) : json(nullptr)},
          {"worst", site},
          {"cells_checked", r.cells_checked},
          {"information_sets_checked", r.information_sets_checked},
          {"root_value_rule", r.root_value_rule},
          {"root_value_enumerated", r.root_value_enumerated},
          {"threshold", kEquilibriumCertificate},
          {"certified", r.certified()}};
}

}  // namespace

std::string RunConfig::check() const {
  if (subcommand != "solve" && subcommand != "simulate" && subcommand != "cascade-scan" &&
      subcommand != "verify")
    return "unknown subcommand '" + subcommand + "'";
  if (grid_k < 2) return "--grid must be at least 2";
  if (!(tolerance > 0.0)) return "--tol must be positive";
  if (max_iterations < 1) return "--max-iter must be at least 1";
  if (horizon && *horizon < 1) return "--horizon must be at least 1";
  if (trajectories < 1) return "--traj must be at least 1";
  if (format != "csv" && format != "summary") return "--format must be csv or summary";
  if (policy != "rule" && policy != "myopic") {
    const std::string prefix = "constant:";
    std::size_t action = 0;
    const char* first = policy.data() + prefix.size();
    const char* last = policy.data() + policy.size();
    if (policy.rfind(prefix, 0) != 0 || first == last ||
        std::from_chars(first, last, action).ptr != last)
      return "--policy must be rule, myopic or constant:K";
  }
  return {};
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t config_digest(const std::string& spec_text, const RunConfig& c) {
  std::ostringstream os;
  os << spec_text << "\n--\nsubcommand=" << c.subcommand << "\ngrid=" << c.grid_k
     << "\ntol=" << format_double(c.tolerance) << "\nmax_iter=" << c.max_iterations
     << "\ntraj=" << c.trajectories << "\nseed=" << c.seed << "\nformat=" << c.format
     << "\npolicy=" << c.policy << "\nforce_state="
     << (c.force_state ? std::to_string(*c.force_state) : std::string("none"))
     << "\nscan_depth=" << c.scan_depth << "\n";
  return fnv1a(os.str());
}

RunResult cmd_solve(const RunConfig& config, std::ostream& log) {
  RunResult result;
  const Inputs in = load_inputs(config);
  const fs::path out = prepare_out_dir(config);
  SolverConfig sc;
  sc.grid_k = config.grid_k;
  sc.tolerance = config.tolerance;
  sc.max_iterations = config.max_iterations;
  try {
    const EquilibriumRule rule = backward_solve(in.doc.game, in.doc.root_belief(), sc);
    std::optional<ForwardProfile> fwd;
    if (count_histories(rule) <= kForwardCheckLimit) fwd = forward_construct(rule);
    json rj = detail::rule_to_json(rule);
    rj["tool"] = kToolVersion;
    rj["config_digest"] = in.digest;
    write_file(out / "rule.json", dump(rj), result);
    write_file(out / "solve_summary.json", dump(solve_summary(in, rule, fwd ? &*fwd : nullptr)), result);
    log << "solved " << rule.nodes.size() << " nodes, max residual "
        << format_double(rule.max_residual()) << "\n";
  } catch (const NoPureFixedPoint& e) {
    json j = header(in);
    j["status"] = "no_pure_fixed_point";
    j["message"] = e.what();
    j["best_residual"] = e.best_residual();
    json path = json::array();
    for (const auto& r : e.path()) path.push_back({{"t", r.t}, {"key", detail::hex64(r.key)}});
    j["path"] = path;
    write_file(out / "solve_summary.json", dump(j), result);
    result.exit_code = kExitSolver;
    result.message = e.what();
  } catch (const ResourceError& e) {
    json j = header(in);
    j["status"] = "resource_limit";
    j["message"] = e.what();
    write_file(out / "solve_summary.json", dump(j), result);
    result.exit_code = kExitSolver;
    result.message = e.what();
  }
  return result;
}

RunResult cmd_simulate(const RunConfig& config, std::ostream& log) {
  RunResult result;
  const Inputs in = load_inputs(config);
  std::optional<EquilibriumRule> rule;
  auto tree = make_tree(config, in, rule);
  const GameSpec& spec = in.doc.game;
  if (config.force_state)
    for (const auto& s : spec.spaces)
      if (*config.force_state >= s.states) throw SpecError("--force-state out of range");

  MonteCarloConfig mc_config;
  mc_config.trajectories = config.trajectories;
  mc_config.seed = config.seed;
  mc_config.force_state = config.force_state;
  mc_config.investment = in.doc.investment;
  const MonteCarloResult mc = monte_carlo(*tree, mc_config);
  const auto& s = mc.summary;

  const fs::path out = prepare_out_dir(config);
  if (config.format == "csv") write_file(out / "trajectories.csv", trajectories_csv(in, mc, spec), result);
  json j = header(in);
  j["policy"] = config.policy;
  j["seed"] = config.seed;
  j["trajectories"] = s.trajectories;
  j["horizon"] = s.horizon;
  j["fraction_confident"] = s.fraction_confident;
  j["mean_terminal_error"] = s.mean_terminal_error;
  j["fraction_constant_play"] = s.fraction_constant_play;
  if (in.doc.investment) {
    j["cascade_labels"] = s.cascade_labels;
    json entries = json::object();
    for (std::size_t a = 0; a < s.entry_counts.size(); ++a) entries[actions_label(spec, a)] = s.entry_counts[a];
    j["entry_counts"] = entries;
    write_file(out / "entry_times.csv", entry_times_csv(in, s, spec), result);
  }
  write_file(out / "simulate_summary.json", dump(j), result);
  log << "simulated " << s.trajectories << " trajectories, fraction confident "
      << format_double(s.fraction_confident) << "\n";
  return result;
}

RunResult cmd_cascade_scan(const RunConfig& config, std::ostream& log) {
  RunResult result;
  const Inputs in = load_inputs(config);
  const EquilibriumRule rule = load_rule(config, in.doc.game);
  const GameSpec& spec = rule.spec;
  const std::size_t na = spec.joint_actions();

  json nodes = json::array();
  std::size_t analytic_not_belief = 0;
  for (const auto& n : rule.nodes) {
    json profiles = json::array();
    for (std::size_t a = 0; a < na; ++a) {
      const std::vector<std::size_t> seq(spec.horizon - n.t + 1, a);
      const CascadeWitness w = is_cascading_belief(rule, n.t, n.id, seq);
      json jp = {{"joint_action", a}, {"actions", actions_label(spec, a)}, {"belief_cascade", w.holds}};
      if (!w.holds) jp["witness"] = witness_json(w);
      if (in.doc.investment) {
        const bool analytic = in_analytic_cascade(n.belief, spec.decode_actions(a), *in.doc.investment);
        jp["analytic_cascade"] = analytic;
        if (analytic && !w.holds) ++analytic_not_belief;
      }
      profiles.push_back(std::move(jp));
    }
    nodes.push_back({{"id", n.id}, {"t", n.t}, {"key", detail::hex64(n.key)},
                     {"public_means", node_means(n.belief)}, {"profiles", profiles}});
  }

  // The history-based definition looks at every later period, so the check needs the
  // whole forward profile, not only histories up to the scan depth.
  json equivalence = json::array();
  std::size_t counterexamples = 0;
  std::size_t history_count = 0;
  const bool run_equivalence = count_histories(rule) <= kForwardCheckLimit;
  if (run_equivalence) {
    const ForwardProfile fwd = forward_construct(rule);
    const auto histories = enumerate_histories(fwd, config.scan_depth);
    history_count = histories.size();
    for (std::size_t a = 0; a < na; ++a) {
      const EquivalenceReport r = check_equivalence(fwd, rule, histories, a);
      json cx = json::array();
      for (const auto& c : r.counterexamples)
        cx.push_back({{"history", c.history}, {"history_cascade", c.history_cascade},
                      {"belief_cascade", c.belief_cascade}});
      counterexamples += r.counterexamples.size();
      equivalence.push_back({{"joint_action", a},
                             {"actions", actions_label(spec, a)},
                             {"checked", r.checked},
                             {"skipped_zero_probability", r.skipped_zero_probability},
                             {"cascading", r.cascading},
                             {"counterexamples", cx}});
    }
  }

  json j = header(in);
  j["nodes"] = nodes;
  if (in.doc.investment) j["analytic_without_belief_cascade"] = analytic_not_belief;
  j["scan_depth"] = config.scan_depth;
  j["histories"] = history_count;
  j["equivalence"] = run_equivalence ? equivalence : json("skipped: too many common histories");
  j["counterexamples"] = counterexamples;
  write_file(prepare_out_dir(config) / "cascade_report.json", dump(j), result);
  log << "scanned " << rule.nodes.size() << " nodes and " << history_count << " histories, "
      << counterexamples << " counterexamples\n";
  return result;
}

RunResult cmd_verify(const RunConfig& config, std::ostream& log) {
  RunResult result;
  const Inputs in = load_inputs(config);
  const EquilibriumRule rule = load_rule(config, in.doc.game);
  const DeviationReport report = verify_equilibrium(rule);
  json j = header(in);
  j.update(deviation_json(report));
  write_file(prepare_out_dir(config) / "verify_report.json", dump(j), result);
  log << "max deviation gain " << format_double(report.max_gain) << "\n";
  if (!report.certified()) {
    result.exit_code = kExitVerify;
    result.message = "deviation gain " + format_double(report.max_gain) + " exceeds " +
                     format_double(kEquilibriumCertificate);
  }
  return result;
}

RunResult run_command(const RunConfig& config, std::ostream& log) {
  RunResult result;
  if (auto problem = config.check(); !problem.empty()) {
    result.exit_code = kExitUsage;
    result.message = problem;
    return result;
  }
  try {
    if (config.subcommand == "solve") return cmd_solve(config, log);
    if (config.subcommand == "simulate") return cmd_simulate(config, log);
    if (config.subcommand == "cascade-scan") return cmd_cascade_scan(config, log);
    return cmd_verify(config, log);
  } catch (const SpecError& e) {
    result.exit_code = kExitSpec;
    result.message = e.what();
  } catch (const NoPureFixedPoint& e) {
    result.exit_code = kExitSolver;
    result.message = e.what();
  } catch (const ResourceError& e) {
    result.exit_code = kExitSolver;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kExitUsage;
    result.message = e.what();
  }
  return result;
}

}  // namespace infocascade
