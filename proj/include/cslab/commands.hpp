#ifndef CSLAB_COMMANDS_HPP_
#define CSLAB_COMMANDS_HPP_

#include <string>

#include "cslab/config.hpp"
#include "cslab/io.hpp"

namespace cslab {

// Exit codes shared by the CLI and the library-level dispatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitHypothesis = 3;

struct CommandResult {
  int exit_code = kExitOk;
  Json summary;  // also written into the output directory
  std::string message;
};

// Runs one CLI command against a parsed config, writing artifacts plus a
// manifest into cfg.out_dir. Commands: hypotheses, simplex, fixed-points,
// classify, convexity, cone, separation, sweep.
CommandResult run_command(const std::string& command, const RunConfig& cfg);

// Per-sample sweep pipeline result, exposed for tests.
struct SweepRow {
  int index = 0;
  LeslieGowerParams params;
  std::string convex_verdict;  // empty when not reached
  Real convex_margin = 0;
  std::string classify_verdict;
  Real min_eig_margin = 0;
  std::string flags;
  bool convex_with_margin = false;
  bool counterexample = false;
  std::string csv_row;
};

SweepRow sweep_one(const SweepSpec& spec, const RunConfig& cfg, int index);

}  // namespace cslab

#endif  // CSLAB_COMMANDS_HPP_
