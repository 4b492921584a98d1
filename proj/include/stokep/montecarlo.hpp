#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stokep/errors.hpp"
#include "stokep/integrators.hpp"
#include "stokep/models.hpp"
#include "stokep/sde.hpp"

namespace stokep {

/// Fills one value per trajectory node. Throwing NumericDomainError
/// excludes the realization.
struct Observable {
  std::string name;
  std::function<void(const Trajectory&, std::span<double> per_node)> eval;
};

Observable state_observable(std::string name,
                            std::function<double(std::span<const double>)> fn);

/// Cumulative trapezoidal integral of `integrand` from t0 to each node.
Observable integral_observable(std::string name,
                               std::function<double(std::span<const double>)> integrand);

/// Trapezoidal rule over a whole uniform trajectory.
double trapezoid_integral(const Trajectory& traj,
                          const std::function<double(std::span<const double>)>& integrand);

/// Observables of the polar two-body state by name: M, H, r, a, e, omega,
/// and H_drift_residual = H(t) - H(0) - (m/2) int_0^t (sigma_r^2 r^2 + sigma_phi^2) ds,
/// which has zero expectation.
Observable two_body_observable(const TwoBodyParams& p, std::string_view name);
/// x and x2 (second moment) for the scalar Langevin model.
Observable langevin_observable(std::string_view name);

unsigned default_workers();

struct EnsembleConfig {
  double t0 = 0.0;
  double T = 1.0;
  double h = 0.01;
  SchemeConfig scheme;
  std::size_t n = 10000;
  std::uint64_t master_seed = 0;
  /// 0 selects default_workers().
  unsigned workers = 0;
  /// Realizations buffered between ordered reductions.
  std::size_t chunk_size = 256;
  /// Excluded fraction above which the run is tainted.
  double taint_threshold = 0.01;
};

struct ObservableEstimate {
  std::string name;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> std_error;
};

struct EnsembleEstimate {
  std::vector<double> times;
  std::vector<ObservableEstimate> observables;
  std::size_t n_realizations = 0;  // included paths
  std::size_t n_excluded = 0;
  bool tainted = false;

  const ObservableEstimate& at(std::string_view name) const;
};

/**
 * Runs n realizations (realization i draws from SeedSpec{master_seed, i}),
 * evaluates the observables on every path, and reduces them in realization
 * order with compensated sums. The result is bitwise independent of the
 * worker count. Paths that raise NumericDomainError are excluded and counted.
 */
EnsembleEstimate run_ensemble(const SdeSystem& sys, std::span<const double> x0,
                              const EnsembleConfig& config,
                              std::span<const Observable> observables);

enum class WeakReference { Analytic, ReferenceSolution, ExactSchemeExpectation };
std::string_view to_string(WeakReference r);

struct ConvergenceStudy {
  std::vector<double> step_sizes;
  std::vector<double> weak_errors;
  /// Monte Carlo standard error of each weak error (0 when exact).
  std::vector<double> stderrs;
  double fitted_order = 0.0;
  double log_constant = 0.0;
  WeakReference reference = WeakReference::ExactSchemeExpectation;
};

struct WeakStudyConfig {
  double t0 = 0.0;
  double T = 1.0;
  SchemeConfig scheme;
  /// Strictly decreasing, each dividing T - t0.
  std::vector<double> steps;
  WeakReference reference = WeakReference::ExactSchemeExpectation;
  std::size_t n = 10000;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;
  double h_ref = kReferenceStep;
  /// A sampled weak error counts as resolved when it exceeds this many
  /// standard errors.
  double resolve_sigmas = 3.0;
};

class InconclusiveStudy : public InconclusiveStudyError {
 public:
  InconclusiveStudy(const std::string& what, ConvergenceStudy study)
      : InconclusiveStudyError(what), study_(std::move(study)) {}
  const ConvergenceStudy& study() const { return study_; }

 private:
  ConvergenceStudy study_;
};

/// Least-squares slope and intercept of log(err) against log(h).
std::pair<double, double> fit_log_log(std::span<const double> h, std::span<const double> err);

/**
 * Weak error |E(x_N) - E_ref(X_T)| (max over state components) per step.
 * ExactSchemeExpectation propagates the scheme mean exactly (affine systems)
 * against the closed-form mean; Analytic samples the scheme; ReferenceSolution
 * samples both the scheme and a fine-step SRK2 reference from independent
 * streams. Throws InconclusiveStudy when a sampled error is not resolved
 * above the Monte Carlo noise floor.
 */
ConvergenceStudy weak_error_study(const SdeSystem& sys, std::span<const double> x0,
                                  const WeakStudyConfig& config);

/// Columns t, then <name>_mean, <name>_stderr per observable.
void write_estimate_csv(std::ostream& os, const EnsembleEstimate& est);
/// Columns h, weak_error, stderr; fitted order as a comment line.
void write_study_csv(std::ostream& os, const ConvergenceStudy& study);

struct RunManifest {
  std::uint64_t seed = 0;
  std::string model;
  Scheme scheme = Scheme::Srk2;
  CoefficientSet coeffs = CoefficientSet::NumericalSearch;
  double h = 0.0;
  double T = 0.0;
  std::size_t n = 0;
  std::size_t n_excluded = 0;
  bool tainted = false;
};

/// key=value lines; the `created` timestamp is the only non-deterministic line.
void write_manifest(std::ostream& os, const RunManifest& manifest);

}  // namespace stokep
