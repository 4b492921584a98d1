#pragma once

#include <iosfwd>

#include "stokep/cli/config.hpp"

namespace stokep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumeric = 2,
  kExitInconclusive = 3,
  kExitTainted = 4,
};

/// Where a command writes. CSV goes to cfg.output ("-" is `out`); report
/// lines go to `out` when the CSV is a file and to `err` otherwise.
struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_simulate(const RunConfig& cfg, Streams io);
int cmd_ensemble(const RunConfig& cfg, Streams io);
int cmd_converge(const RunConfig& cfg, Streams io);
int cmd_gauss(const RunConfig& cfg, Streams io);
int cmd_check_structure(const RunConfig& cfg, Streams io);

/// Parses argv, dispatches, and maps errors onto the exit-code contract.
int run_cli(int argc, const char* const* argv, Streams io);

}  // namespace stokep::cli
