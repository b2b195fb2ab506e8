// cslab: carrying simplices of three-dimensional competitive maps.
//
//   cslab <command> --config <path> [--out <dir>] [--level N] [--seed N]

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cslab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"carrying-simplex laboratory for 3D competitive maps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int level_override = -1;
  long long seed_override = -1;

  const std::vector<std::string> commands = {
      "hypotheses", "simplex", "fixed-points", "classify",
      "convexity",  "cone",    "separation",   "sweep"};
  const std::vector<std::string> descriptions = {
      "run the (H2)/(H3')/(H4')/(H6) checkers",
      "compute face curves and the carrying-simplex surface",
      "locate axial, planar, and interior fixed points",
      "evaluate the boundary eigenvalue criterion",
      "test convexity of the global attractor (midpoint + hull)",
      "estimate tangent cones at planar fixed points",
      "fit the exponential-separation rate along face orbits",
      "run the convexity/classification parameter sweep"};

  for (std::size_t c = 0; c < commands.size(); ++c) {
    CLI::App* sub = app.add_subcommand(commands[c], descriptions[c]);
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--level", level_override, "grid level (overrides config)");
    sub->add_option("--seed", seed_override, "RNG seed (overrides config)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  cslab::RunConfig cfg;
  try {
    cfg = cslab::parse_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (level_override > 0) {
      cfg.level = level_override;
      cfg.canonical["grid"]["level"] = level_override;
    }
    if (seed_override >= 0) {
      cfg.seed = std::uint64_t(seed_override);
      cfg.canonical["seed"] = cfg.seed;
    }
  } catch (const cslab::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cslab::kExitConfig;
  }

  const cslab::CommandResult res = cslab::run_command(command, cfg);
  if (!res.message.empty()) std::cerr << res.message << "\n";
  std::cout << command << ": "
            << (res.exit_code == cslab::kExitOk ? "ok" : "failed") << ", artifacts in "
            << cfg.out_dir << "\n";
  return res.exit_code;
}
