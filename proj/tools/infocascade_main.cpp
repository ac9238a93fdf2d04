#include <iostream>

#include <CLI11.hpp>

#include "infocascade/pipeline.hpp"

using infocascade::RunConfig;

namespace {

void add_common(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--spec", c.spec_path, "Game spec file")->required();
  cmd->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--grid", c.grid_k, "Grid points per belief coordinate")->capture_default_str();
  cmd->add_option("--tol", c.tolerance, "Best-response tolerance")->capture_default_str();
  cmd->add_option("--max-iter", c.max_iterations, "Best-response iterations per node")
      ->capture_default_str();
  cmd->add_option("--horizon", c.horizon, "Override the horizon of the spec file");
  cmd->add_option("--seed", c.seed, "Monte Carlo seed")->capture_default_str();
  cmd->add_option("--traj", c.trajectories, "Monte Carlo trajectories")->capture_default_str();
  cmd->add_option("--format", c.format, "csv or summary")->capture_default_str();
}

void add_rule(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--rule", c.rule_path, "Solved rule file (default <out>/rule.json)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve, simulate and inspect dynamic games with private beliefs"};
  app.set_version_flag("--version", std::string(infocascade::kToolVersion));
  app.require_subcommand(1);
  RunConfig config;

  auto* solve = app.add_subcommand("solve", "Solve the game by backward induction over public beliefs");
  add_common(solve, config);

  auto* simulate = app.add_subcommand("simulate", "Sample trajectories under a solved rule or fixed policy");
  add_common(simulate, config);
  add_rule(simulate, config);
  simulate->add_option("--policy", config.policy, "rule, myopic or constant:K")->capture_default_str();
  simulate->add_option("--force-state", config.force_state, "True state index of every player");

  auto* scan = app.add_subcommand("cascade-scan", "Cascade membership of every solved node");
  add_common(scan, config);
  add_rule(scan, config);
  scan->add_option("--depth", config.scan_depth, "Longest history for the equivalence check")
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Largest profitable deviation from a solved rule");
  add_common(verify, config);
  add_rule(verify, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return infocascade::kExitUsage;
  }
  config.subcommand = app.get_subcommands().front()->get_name();

  const auto result = infocascade::run_command(config, std::cerr);
  for (const auto& f : result.files) std::cout << f << "\n";
  if (result.exit_code != infocascade::kExitOk) std::cerr << "error: " << result.message << "\n";
  return result.exit_code;
}
