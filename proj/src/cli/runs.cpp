#include "stokep/cli/runs.hpp"

#include <algorithm>
#include <numbers>

#include "stokep/noise.hpp"

namespace stokep::cli {

namespace {

unsigned resolve_workers(const RunConfig& cfg) {
  return cfg.workers == 0 ? default_workers() : cfg.workers;
}

bool names_contain(const std::vector<std::string>& names, std::string_view name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace

ModelSetup setup_model(const RunConfig& cfg) {
  ModelSetup out;
  if (cfg.model == ModelKind::TwoBody) {
    out.sys = two_body_system(cfg.two_body_params());
    const auto a = cfg.initial_polar().to_array();
    out.x0.assign(a.begin(), a.end());
  } else {
    out.sys = langevin_system(cfg.langevin_params());
    out.x0 = {cfg.x0};
  }
  return out;
}

SimulationResult simulate_run(const RunConfig& cfg) {
  validate(cfg);
  const auto [sys, x0] = setup_model(cfg);
  const std::size_t steps = step_count(0.0, cfg.T, cfg.h);
  const NoiseGrid grid = steps == 0 ? NoiseGrid{}
                                    : generate_grid(SeedSpec{cfg.seed, 0}, steps, sys.noise_dim,
                                                    samples_per_step(cfg.scheme));
  SimulationResult out;
  out.requested_nodes = steps + 1;
  try {
    out.traj = integrate(sys, x0, 0.0, cfg.T, cfg.h, cfg.scheme_config(), grid);
  } catch (const IntegrationError& err) {
    out.traj = err.partial();
    out.failure = err.what();
  }
  return out;
}

std::vector<Observable> ensemble_observables(const RunConfig& cfg) {
  std::vector<Observable> obs;
  if (cfg.model == ModelKind::TwoBody) {
    const auto p = cfg.two_body_params();
    for (const auto& name : cfg.observables) obs.push_back(two_body_observable(p, name));
    if (names_contain(cfg.observables, "H") &&
        !names_contain(cfg.observables, "H_drift_residual")) {
      obs.push_back(two_body_observable(p, "H_drift_residual"));
    }
  } else {
    const std::vector<std::string> defaults = RunConfig{}.observables;
    const auto names =
        cfg.observables == defaults ? std::vector<std::string>{"x", "x2"} : cfg.observables;
    for (const auto& name : names) obs.push_back(langevin_observable(name));
  }
  return obs;
}

EnsembleEstimate ensemble_run(const RunConfig& cfg) {
  validate(cfg);
  const auto [sys, x0] = setup_model(cfg);
  const auto obs = ensemble_observables(cfg);
  EnsembleConfig ec;
  ec.T = cfg.T;
  ec.h = cfg.h;
  ec.scheme = cfg.scheme_config();
  ec.n = cfg.n;
  ec.master_seed = cfg.seed;
  ec.workers = resolve_workers(cfg);
  return run_ensemble(sys, x0, ec, obs);
}

WeakStudyConfig study_config(const RunConfig& cfg) {
  WeakStudyConfig wc;
  wc.T = cfg.T;
  wc.scheme = cfg.scheme_config();
  wc.steps = cfg.steps;
  wc.reference = cfg.reference.value_or(cfg.model == ModelKind::Langevin
                                            ? WeakReference::ExactSchemeExpectation
                                            : WeakReference::ReferenceSolution);
  wc.n = cfg.n;
  wc.master_seed = cfg.seed;
  wc.workers = resolve_workers(cfg);
  wc.h_ref = cfg.h_ref;
  return wc;
}

ConvergenceStudy converge_run(const RunConfig& cfg) {
  validate(cfg);
  const auto [sys, x0] = setup_model(cfg);
  return weak_error_study(sys, x0, study_config(cfg));
}

ComparisonReport gauss_run(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.model != ModelKind::TwoBody) {
    throw ConfigError("gauss requires model = two_body", 0, "model");
  }
  const std::size_t steps = step_count(0.0, cfg.T, cfg.h);
  const NoiseGrid grid = steps == 0 ? NoiseGrid{}
                                    : generate_grid(SeedSpec{cfg.seed, 0}, steps, 2,
                                                    samples_per_step(Scheme::EulerMaruyama));
  return compare_formulations(cfg.two_body_params(), cfg.initial_polar(), cfg.T, cfg.h, grid);
}

StructureReport structure_run(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.model != ModelKind::TwoBody) {
    throw ConfigError("check-structure requires model = two_body", 0, "model");
  }
  const auto p = cfg.two_body_params();
  RandomStream rng(SeedSpec{cfg.seed, 0});
  std::vector<StructureSample> points;
  points.reserve(cfg.structure_points);
  for (std::size_t i = 0; i < cfg.structure_points; ++i) {
    OrbitalState el;
    el.a = 0.5 + 1.5 * rng.uniform();
    el.e = 0.05 + 0.85 * rng.uniform();
    el.omega = wrap_angle(2.0 * std::numbers::pi * rng.uniform());
    el.f = wrap_angle(2.0 * std::numbers::pi * rng.uniform());
    const auto c = polar_to_canonical(p, reconstruct_polar(p, el));
    points.push_back({0.0, std::vector<double>(c.begin(), c.end())});
  }
  return check_hamiltonian_structure(two_body_canonical_system(p), canonical_split(), points,
                                     cfg.structure_tol);
}

}  // namespace stokep::cli
