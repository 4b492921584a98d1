#include "stokep/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include "stokep/cli/runs.hpp"
#include "stokep/csv.hpp"
#include "stokep/elements.hpp"
#include "stokep/montecarlo.hpp"
#include "stokep/sde.hpp"

namespace stokep::cli {

namespace {

/// CSV destination plus the stream that receives report lines.
class Sink {
 public:
  Sink(const std::string& path, Streams io) : io_(io) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'", 0, "output");
    }
  }
  std::ostream& csv() { return file_.is_open() ? static_cast<std::ostream&>(file_) : io_.out; }
  std::ostream& report() { return file_.is_open() ? io_.out : io_.err; }

 private:
  Streams io_;
  std::ofstream file_;
};

std::string_view model_name(ModelKind m) {
  return m == ModelKind::TwoBody ? "two_body" : "langevin";
}

void write_two_body_rows(std::ostream& os, const TwoBodyParams& p, const Trajectory& traj,
                         double& max_rel_H, double& max_rel_M) {
  csv::write_header(os, {"t", "r", "phi", "v", "w", "x", "y", "M", "H"});
  if (traj.size() == 0) return;
  const auto s0 = PolarState::from(traj.state(0));
  const double H0 = energy(p, s0);
  const double M0 = angular_momentum(p, s0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto s = PolarState::from(traj.state(i));
    const double M = angular_momentum(p, s);
    const double H = energy(p, s);
    max_rel_H = std::max(max_rel_H, std::abs(H - H0) / std::abs(H0));
    max_rel_M = std::max(max_rel_M, std::abs(M - M0) / std::abs(M0));
    csv::write_row(os, {traj.times[i], s.r, s.phi, s.v, s.w, s.r * std::cos(s.phi),
                        s.r * std::sin(s.phi), M, H});
  }
}

void write_scalar_rows(std::ostream& os, const Trajectory& traj) {
  csv::write_header(os, {"t", "x"});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    csv::write_row(os, {traj.times[i], traj.state(i)[0]});
  }
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, Streams io) {
  const auto result = simulate_run(cfg);
  Sink sink(cfg.output, io);
  const Trajectory& traj = result.traj;
  const auto& failure = result.failure;

  double max_rel_H = 0.0;
  double max_rel_M = 0.0;
  if (cfg.model == ModelKind::TwoBody) {
    write_two_body_rows(sink.csv(), cfg.two_body_params(), traj, max_rel_H, max_rel_M);
  } else {
    write_scalar_rows(sink.csv(), traj);
  }
  if (failure) {
    csv::write_comment(sink.csv(), "TRUNCATED after " + std::to_string(traj.size()) + " of " +
                                       std::to_string(result.requested_nodes) +
                                       " nodes: " + *failure);
  }
  sink.csv().flush();

  auto& rep = sink.report();
  rep << "nodes=" << traj.size() << '\n';
  if (cfg.model == ModelKind::TwoBody) {
    rep << "max_rel_energy_drift=" << csv::format_real(max_rel_H) << '\n';
    rep << "max_rel_angular_momentum_drift=" << csv::format_real(max_rel_M) << '\n';
  }
  if (failure) {
    io.err << "error: integration failed: " << *failure << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_ensemble(const RunConfig& cfg, Streams io) {
  const auto est = ensemble_run(cfg);
  Sink sink(cfg.output, io);

  write_estimate_csv(sink.csv(), est);
  sink.csv().flush();

  RunManifest manifest;
  manifest.seed = cfg.seed;
  manifest.model = std::string(model_name(cfg.model));
  manifest.scheme = cfg.scheme;
  manifest.coeffs = cfg.coeffs;
  manifest.h = cfg.h;
  manifest.T = cfg.T;
  manifest.n = cfg.n;
  manifest.n_excluded = est.n_excluded;
  manifest.tainted = est.tainted;
  if (cfg.output != "-") {
    std::ofstream mf(cfg.output + ".manifest");
    if (!mf) throw ConfigError("cannot write manifest next to '" + cfg.output + "'", 0, "output");
    write_manifest(mf, manifest);
  } else {
    write_manifest(io.err, manifest);
  }

  auto& rep = sink.report();
  rep << "n_realizations=" << est.n_realizations << '\n';
  rep << "n_excluded=" << est.n_excluded << '\n';
  for (const auto& o : est.observables) {
    rep << o.name << "_final_mean=" << csv::format_real(o.mean.back()) << '\n';
    rep << o.name << "_final_stderr=" << csv::format_real(o.std_error.back()) << '\n';
  }
  if (est.tainted) {
    io.err << "error: " << est.n_excluded << " of " << cfg.n
           << " realizations were excluded; the ensemble is tainted\n";
    return kExitTainted;
  }
  return kExitOk;
}

int cmd_converge(const RunConfig& cfg, Streams io) {
  validate(cfg);
  Sink sink(cfg.output, io);

  try {
    const auto study = converge_run(cfg);
    write_study_csv(sink.csv(), study);
    sink.csv().flush();
    io.out << "weak_order=" << csv::format_real(study.fitted_order) << '\n';
    return kExitOk;
  } catch (const InconclusiveStudy& err) {
    write_study_csv(sink.csv(), err.study());
    csv::write_comment(sink.csv(), "INCONCLUSIVE");
    sink.csv().flush();
    io.err << "error: " << err.what() << '\n'
           << "The weak error at some step is within " << study_config(cfg).resolve_sigmas
           << " standard errors of zero, so the Monte Carlo noise floor hides the "
              "discretization error. Increase n, use coarser steps, or choose the exact "
              "reference for affine models.\n";
    return kExitInconclusive;
  }
}

int cmd_gauss(const RunConfig& cfg, Streams io) {
  ComparisonReport report;
  try {
    report = gauss_run(cfg);
  } catch (const PericenterSingularityError& err) {
    io.err << "error: " << err.what() << '\n'
           << "The initial state is (nearly) circular, so the pericenter angle is undefined "
              "and the element equations are singular. Start from an orbit with "
              "eccentricity of at least "
           << kGaussMinEccentricity << " (for example change v0 or w0).\n";
    return kExitNumeric;
  }

  Sink sink(cfg.output, io);
  write_comparison_csv(sink.csv(), report);
  sink.csv().flush();
  auto& rep = sink.report();
  rep << "sup_rel_a=" << csv::format_real(report.sup_rel_a) << '\n';
  rep << "sup_rel_e=" << csv::format_real(report.sup_rel_e) << '\n';
  rep << "sup_abs_omega=" << csv::format_real(report.sup_abs_omega) << '\n';
  rep << "sup_rel_H=" << csv::format_real(report.sup_rel_H) << '\n';
  if (report.truncated) {
    io.err << "error: comparison truncated after " << report.t.size() << " of "
           << report.requested_nodes << " nodes\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_check_structure(const RunConfig& cfg, Streams io) {
  const auto report = structure_run(cfg);
  io.out << "hamiltonian=" << (report.is_hamiltonian ? "true" : "false") << '\n';
  io.out << "max_residual=" << csv::format_real(report.max_residual) << '\n';
  io.out << "violated_condition="
         << (report.is_hamiltonian ? std::string_view("none") : to_string(report.worst_condition))
         << '\n';
  io.out << "sample_points=" << report.sample_points << '\n';
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Stochastic Kepler problem: simulation, ensembles and weak convergence"};
  // "-h" is taken by the step-size override "--h".
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "Config file (flat key = value with [sections])");

  std::map<std::string, std::string, std::less<>> overrides;
  for (auto key : config_keys()) {
    std::string flag = "--" + std::string(key);
    if (key == "output") flag += ",--out";
    app.add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[std::string(key)] = v; },
        "Override config key '" + std::string(key) + "'");
  }

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, Streams);
  };
  const Command commands[] = {
      {"simulate", "Integrate one path and write the trajectory CSV", cmd_simulate},
      {"ensemble", "Monte Carlo estimates of observables", cmd_ensemble},
      {"converge", "Weak-error study over a list of step sizes", cmd_converge},
      {"gauss", "Compare direct and element formulations on shared noise", cmd_gauss},
      {"check-structure", "Test the stochastic Hamiltonian conditions", cmd_check_structure},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (auto key : config_keys()) {
      if (auto it = overrides.find(key); it != overrides.end()) {
        set_value(cfg, key, it->second);
      }
    }
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) return c.fn(cfg, io);
    }
    return kExitUsage;
  } catch (const ConfigError& e) {
    io.err << "config error";
    if (!e.field().empty()) io.err << " [" << e.field() << "]";
    io.err << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InconclusiveStudyError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitInconclusive;
  } catch (const NumericDomainError& e) {
    io.err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const EnsembleDegenerateError& e) {
    io.err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace stokep::cli
