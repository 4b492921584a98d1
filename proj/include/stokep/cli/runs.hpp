#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stokep/cli/config.hpp"
#include "stokep/elements.hpp"
#include "stokep/montecarlo.hpp"
#include "stokep/sde.hpp"

// In-memory versions of the subcommands, shared by the CLI and the Python
// module. Each validates the config first.
namespace stokep::cli {

struct ModelSetup {
  SdeSystem sys;
  std::vector<double> x0;
};

ModelSetup setup_model(const RunConfig& cfg);

struct SimulationResult {
  Trajectory traj;
  /// Set when integration stopped early; traj then holds the computed nodes.
  std::optional<std::string> failure;
  std::size_t requested_nodes = 0;
};

SimulationResult simulate_run(const RunConfig& cfg);

/// Observables named in cfg, plus H_drift_residual whenever H is requested.
/// Langevin with the default list uses x and x2.
std::vector<Observable> ensemble_observables(const RunConfig& cfg);

EnsembleEstimate ensemble_run(const RunConfig& cfg);

WeakStudyConfig study_config(const RunConfig& cfg);

/// Throws InconclusiveStudy when the noise floor hides the error.
ConvergenceStudy converge_run(const RunConfig& cfg);

/// Throws PericenterSingularityError for (nearly) circular starts.
ComparisonReport gauss_run(const RunConfig& cfg);

/// Canonical-coordinate structure check at random bound states.
StructureReport structure_run(const RunConfig& cfg);

}  // namespace stokep::cli
