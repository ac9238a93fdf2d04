#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infocascade/monte_carlo.hpp"
#include "infocascade/pipeline.hpp"
#include "infocascade/rule_io.hpp"
#include "infocascade/spec_io.hpp"
#include "infocascade/verify.hpp"

namespace py = pybind11;
using namespace infocascade;

namespace {

// Python side: one list per player of (belief, weight) pairs.
using AtomList = std::vector<std::vector<std::pair<std::vector<double>, double>>>;

JointPublicBelief to_joint(const AtomList& atoms) {
  JointPublicBelief pi;
  for (const auto& player : atoms) {
    std::vector<Atom> a;
    for (const auto& [probs, weight] : player) a.push_back({PrivateBelief{probs}, weight});
    pi.per_player.emplace_back(std::move(a));
  }
  return pi;
}

AtomList from_joint(const JointPublicBelief& pi) {
  AtomList out;
  for (const auto& c : pi.per_player) {
    out.emplace_back();
    for (const auto& a : c.atoms()) out.back().emplace_back(a.belief.probs, a.weight);
  }
  return out;
}

py::dict node_dict(const RuleNode& n) {
  py::dict d;
  d["id"] = n.id;
  d["t"] = n.t;
  d["belief"] = from_joint(n.belief);
  py::list players;
  for (const auto& p : n.players) {
    py::dict pd;
    pd["support_count"] = p.support_count;
    pd["actions"] = p.actions;
    pd["values"] = p.values;
    players.append(pd);
  }
  d["players"] = players;
  d["children"] = n.children;
  d["residual"] = n.residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = "0.1.0";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<NoPureFixedPoint>(m, "NoPureFixedPoint", PyExc_RuntimeError);

  py::class_<GameSpec>(m, "GameSpec")
      .def_readonly("num_players", &GameSpec::num_players)
      .def_readonly("horizon", &GameSpec::horizon)
      .def_readonly("static_states", &GameSpec::static_states)
      .def_readonly("prior", &GameSpec::prior)
      .def("joint_actions", &GameSpec::joint_actions)
      .def("violations", [](const GameSpec& spec) {
        std::vector<std::string> out;
        for (const auto& v : validate_spec(spec))
          out.push_back(v.table + "." + std::to_string(v.player) + " row " + std::to_string(v.row) + ": " +
                        v.message);
        return out;
      });

  py::class_<InvestmentParams>(m, "InvestmentParams")
      .def(py::init<>())
      .def(py::init([](std::size_t players, std::size_t horizon, double lambda, double p0, double p1,
                       double prior) {
             return InvestmentParams{players, horizon, lambda, p0, p1, prior};
           }),
           py::arg("players") = 2, py::arg("horizon") = 5, py::arg("lambda_") = 0.5,
           py::arg("p0") = 0.25, py::arg("p1") = 0.25, py::arg("prior") = 0.5)
      .def_readwrite("players", &InvestmentParams::players)
      .def_readwrite("horizon", &InvestmentParams::horizon)
      .def_readwrite("lambda_", &InvestmentParams::lambda)
      .def_readwrite("p0", &InvestmentParams::p0)
      .def_readwrite("p1", &InvestmentParams::p1)
      .def_readwrite("prior", &InvestmentParams::prior);

  py::class_<SpecDocument>(m, "SpecDocument")
      .def_readonly("game", &SpecDocument::game)
      .def_readonly("investment", &SpecDocument::investment)
      .def("root_belief", [](const SpecDocument& d) { return from_joint(d.root_belief()); })
      .def("set_horizon", &SpecDocument::set_horizon);

  m.def("parse_spec", &parse_spec, py::arg("text"));
  m.def("write_spec", &write_spec, py::arg("doc"));
  m.def("build_spec", &build_spec, py::arg("params"));

  m.def("private_update",
        [](const GameSpec& spec, std::size_t player, const std::vector<double>& xi, std::size_t w,
           std::size_t joint_action) {
          return private_update(spec, player, PrivateBelief{xi}, w, joint_action).probs;
        },
        py::arg("spec"), py::arg("player"), py::arg("xi"), py::arg("w"), py::arg("joint_action"));
  m.def("scalar_update", &scalar_update, py::arg("xi"), py::arg("plus_symbol"), py::arg("p"));
  m.def("drift", &drift, py::arg("xi"), py::arg("p"));
  m.def("cascade_value", &cascade_value, py::arg("params"), py::arg("t"), py::arg("xi"), py::arg("hat"),
        py::arg("action"));
  m.def("in_analytic_cascade",
        [](const AtomList& pi, const std::vector<std::size_t>& actions, const InvestmentParams& params) {
          return in_analytic_cascade(to_joint(pi), actions, params);
        },
        py::arg("belief"), py::arg("actions"), py::arg("params"));

  py::class_<EquilibriumRule>(m, "EquilibriumRule")
      .def_readonly("spec", &EquilibriumRule::spec)
      .def_readonly("root", &EquilibriumRule::root)
      .def_property_readonly("num_nodes", [](const EquilibriumRule& r) { return r.nodes.size(); })
      .def("max_residual", &EquilibriumRule::max_residual)
      .def("node", [](const EquilibriumRule& r, std::size_t id) { return node_dict(r.node(id)); })
      .def("to_json", [](const EquilibriumRule& r) { return rule_to_json(r); })
      .def_static("from_json", [](const std::string& text) { return rule_from_json(text); });

  m.def("solve",
        [](const GameSpec& spec, std::optional<AtomList> root, std::size_t grid_k, double tolerance) {
          SolverConfig config;
          config.grid_k = grid_k;
          config.tolerance = tolerance;
          const auto pi = root ? to_joint(*root) : JointPublicBelief::point_mass_prior(spec);
          py::gil_scoped_release release;
          return backward_solve(spec, pi, config);
        },
        py::arg("spec"), py::arg("root") = py::none(), py::arg("grid_k") = kDefaultGridSize,
        py::arg("tolerance") = 1e-9);

  m.def("verify",
        [](const EquilibriumRule& rule) {
          const auto r = verify_equilibrium(rule);
          py::dict d;
          d["max_gain"] = r.max_gain;
          d["single_stage_gain"] = r.single_stage_gain;
          d["multi_stage_gain"] = r.multi_stage_gain;
          d["cells_checked"] = r.cells_checked;
          d["root_value_rule"] = r.root_value_rule;
          d["root_value_enumerated"] = r.root_value_enumerated;
          d["certified"] = r.certified();
          return d;
        },
        py::arg("rule"));

  m.def("simulate",
        [](const EquilibriumRule& rule, std::size_t trajectories, std::uint64_t seed,
           std::optional<std::size_t> force_state, std::optional<InvestmentParams> investment) {
          RuleStrategy tree(rule);
          MonteCarloConfig config{trajectories, seed, force_state, investment};
          const auto s = monte_carlo(tree, config).summary;
          py::dict d;
          d["trajectories"] = s.trajectories;
          d["fraction_confident"] = s.fraction_confident;
          d["mean_terminal_error"] = s.mean_terminal_error;
          d["fraction_constant_play"] = s.fraction_constant_play;
          d["entry_counts"] = s.entry_counts;
          d["cascade_labels"] = s.cascade_labels;
          return d;
        },
        py::arg("rule"), py::arg("trajectories") = 1000, py::arg("seed") = 1,
        py::arg("force_state") = py::none(), py::arg("investment") = py::none());

  m.def("run_command",
        [](const std::string& subcommand, const std::string& spec_path, const std::string& out_dir,
           std::optional<std::size_t> horizon, std::size_t trajectories, std::uint64_t seed,
           const std::string& policy, std::optional<std::size_t> force_state) {
          RunConfig c;
          c.subcommand = subcommand;
          c.spec_path = spec_path;
          c.out_dir = out_dir;
          c.horizon = horizon;
          c.trajectories = trajectories;
          c.seed = seed;
          c.policy = policy;
          c.force_state = force_state;
          std::ostringstream log;
          const auto r = run_command(c, log);
          return py::make_tuple(r.exit_code, r.message, r.files);
        },
        py::arg("subcommand"), py::arg("spec_path"), py::arg("out_dir") = ".",
        py::arg("horizon") = py::none(), py::arg("trajectories") = 1000, py::arg("seed") = 1,
        py::arg("policy") = "rule", py::arg("force_state") = py::none());
}
