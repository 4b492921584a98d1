#include "stokep/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "stokep/csv.hpp"
#include "stokep/elements.hpp"

namespace stokep {

Observable state_observable(std::string name,
                            std::function<double(std::span<const double>)> fn) {
  return {std::move(name), [fn = std::move(fn)](const Trajectory& traj, std::span<double> out) {
            for (std::size_t j = 0; j < traj.size(); ++j) out[j] = fn(traj.state(j));
          }};
}

Observable integral_observable(std::string name,
                               std::function<double(std::span<const double>)> integrand) {
  return {std::move(name),
          [integrand = std::move(integrand)](const Trajectory& traj, std::span<double> out) {
            double acc = 0.0;
            double prev = integrand(traj.state(0));
            out[0] = 0.0;
            for (std::size_t j = 1; j < traj.size(); ++j) {
              const double cur = integrand(traj.state(j));
              acc += 0.5 * (traj.times[j] - traj.times[j - 1]) * (prev + cur);
              out[j] = acc;
              prev = cur;
            }
          }};
}

double trapezoid_integral(const Trajectory& traj,
                          const std::function<double(std::span<const double>)>& integrand) {
  if (traj.size() < 2) return 0.0;
  double acc = 0.0;
  double prev = integrand(traj.state(0));
  for (std::size_t j = 1; j < traj.size(); ++j) {
    const double cur = integrand(traj.state(j));
    acc += 0.5 * (traj.times[j] - traj.times[j - 1]) * (prev + cur);
    prev = cur;
  }
  return acc;
}

Observable two_body_observable(const TwoBodyParams& p, std::string_view name) {
  auto polar = [](std::span<const double> x) { return PolarState::from(x); };
  if (name == "M") {
    return state_observable("M", [p, polar](auto x) { return angular_momentum(p, polar(x)); });
  }
  if (name == "H") {
    return state_observable("H", [p, polar](auto x) { return energy(p, polar(x)); });
  }
  if (name == "r") return state_observable("r", [](auto x) { return x[0]; });
  if (name == "a") {
    return state_observable("a", [p, polar](auto x) { return extract_elements(p, polar(x)).a; });
  }
  if (name == "e") {
    return state_observable("e", [p, polar](auto x) { return extract_elements(p, polar(x)).e; });
  }
  if (name == "omega") {
    return state_observable("omega",
                            [p, polar](auto x) { return extract_elements(p, polar(x)).omega; });
  }
  if (name == "H_drift_residual") {
    return {"H_drift_residual", [p, polar](const Trajectory& traj, std::span<double> out) {
              const double half_m = 0.5 * p.m();
              const double H0 = energy(p, polar(traj.state(0)));
              double integral = 0.0;
              double prev = energy_drift_rate(p, polar(traj.state(0)));
              out[0] = 0.0;
              for (std::size_t j = 1; j < traj.size(); ++j) {
                const auto s = polar(traj.state(j));
                const double cur = energy_drift_rate(p, s);
                integral += 0.5 * (traj.times[j] - traj.times[j - 1]) * (prev + cur);
                prev = cur;
                out[j] = energy(p, s) - H0 - half_m * integral;
              }
            }};
  }
  throw InvalidArgument("unknown two-body observable '" + std::string(name) +
                        "' (expected M, H, r, a, e, omega)");
}

Observable langevin_observable(std::string_view name) {
  if (name == "x") return state_observable("x", [](auto x) { return x[0]; });
  if (name == "x2") return state_observable("x2", [](auto x) { return x[0] * x[0]; });
  throw InvalidArgument("unknown Langevin observable '" + std::string(name) +
                        "' (expected x, x2)");
}

unsigned default_workers() {
  if (const char* env = std::getenv("STOKEP_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

const ObservableEstimate& EnsembleEstimate::at(std::string_view name) const {
  for (const auto& o : observables) {
    if (o.name == name) return o;
  }
  throw InvalidArgument("no observable named '" + std::string(name) + "'");
}

namespace {

/// Neumaier-compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct NodeAccumulator {
  double shift = 0.0;
  CompensatedSum first;
  CompensatedSum second;
};

}  // namespace

EnsembleEstimate run_ensemble(const SdeSystem& sys, std::span<const double> x0,
                              const EnsembleConfig& config,
                              std::span<const Observable> observables) {
  if (config.n < 2) throw InvalidArgument("run_ensemble: need at least 2 realizations");
  if (observables.empty()) throw InvalidArgument("run_ensemble: no observables");
  if (config.chunk_size == 0) throw InvalidArgument("run_ensemble: chunk_size must be >= 1");
  const std::size_t n_steps = step_count(config.t0, config.T, config.h);
  const std::size_t nodes = n_steps + 1;
  const std::size_t n_obs = observables.size();
  const std::size_t spp = samples_per_step(config.scheme.scheme);
  const unsigned workers = config.workers == 0 ? default_workers() : config.workers;

  const std::size_t chunk = std::min(config.chunk_size, config.n);
  const std::size_t slot_size = n_obs * nodes;
  std::vector<double> buffer(chunk * slot_size);
  std::vector<char> excluded(chunk);

  std::vector<NodeAccumulator> acc(n_obs * nodes);
  bool have_shift = false;
  std::size_t included = 0;
  std::size_t n_excluded = 0;
  std::mutex error_mutex;
  std::exception_ptr failure;

  auto simulate = [&](std::size_t realization, std::size_t slot) {
    excluded[slot] = 0;
    try {
      NoiseGrid grid;
      if (n_steps > 0) {
        grid = generate_grid(SeedSpec{config.master_seed, realization}, n_steps,
                             sys.noise_dim, spp);
      }
      const Trajectory traj =
          integrate(sys, x0, config.t0, config.T, config.h, config.scheme, grid);
      for (std::size_t o = 0; o < n_obs; ++o) {
        std::span<double> out(buffer.data() + slot * slot_size + o * nodes, nodes);
        observables[o].eval(traj, out);
        for (double v : out) {
          if (!std::isfinite(v)) throw NumericDomainError("non-finite observable");
        }
      }
    } catch (const NumericDomainError&) {
      excluded[slot] = 1;
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  for (std::size_t begin = 0; begin < config.n; begin += chunk) {
    const std::size_t count = std::min(chunk, config.n - begin);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < count; i = next++) simulate(begin + i, i);
    };
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (n_threads <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(n_threads);
      for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t i = 0; i < count; ++i) {
      if (excluded[i]) {
        ++n_excluded;
        continue;
      }
      const double* slot = buffer.data() + i * slot_size;
      if (!have_shift) {
        for (std::size_t k = 0; k < slot_size; ++k) acc[k].shift = slot[k];
        have_shift = true;
      }
      for (std::size_t k = 0; k < slot_size; ++k) {
        const double d = slot[k] - acc[k].shift;
        acc[k].first.add(d);
        acc[k].second.add(d * d);
      }
      ++included;
    }
  }

  if (included == 0) {
    throw EnsembleDegenerateError("run_ensemble: all " + std::to_string(config.n) +
                                  " realizations were excluded");
  }
  if (included < 2) {
    throw EnsembleDegenerateError("run_ensemble: fewer than 2 realizations survived");
  }

  EnsembleEstimate est;
  est.times.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    est.times[j] = config.t0 + static_cast<double>(j) * config.h;
  }
  est.n_realizations = included;
  est.n_excluded = n_excluded;
  est.tainted = static_cast<double>(n_excluded) >
                config.taint_threshold * static_cast<double>(config.n);
  const double n = static_cast<double>(included);
  for (std::size_t o = 0; o < n_obs; ++o) {
    ObservableEstimate oe;
    oe.name = observables[o].name;
    oe.mean.resize(nodes);
    oe.variance.resize(nodes);
    oe.std_error.resize(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
      const auto& a = acc[o * nodes + j];
      const double s1 = a.first.value();
      const double s2 = a.second.value();
      oe.mean[j] = a.shift + s1 / n;
      oe.variance[j] = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
      oe.std_error[j] = std::sqrt(oe.variance[j] / n);
    }
    est.observables.push_back(std::move(oe));
  }
  return est;
}

std::string_view to_string(WeakReference r) {
  switch (r) {
    case WeakReference::Analytic:
      return "analytic";
    case WeakReference::ReferenceSolution:
      return "reference";
    case WeakReference::ExactSchemeExpectation:
      return "exact";
  }
  return "unknown";
}

std::pair<double, double> fit_log_log(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw InvalidArgument("fit_log_log: need at least two matching points");
  }
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) {
      throw InvalidArgument("fit_log_log: values must be positive");
    }
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

namespace {

std::vector<Observable> component_observables(std::size_t dim) {
  std::vector<Observable> obs;
  for (std::size_t i = 0; i < dim; ++i) {
    obs.push_back(state_observable("x" + std::to_string(i), [i](auto x) { return x[i]; }));
  }
  return obs;
}

struct FinalMoments {
  std::vector<double> mean;
  std::vector<double> std_error;
};

FinalMoments sampled_final(const SdeSystem& sys, std::span<const double> x0,
                           const WeakStudyConfig& cfg, double h, SchemeConfig scheme,
                           std::uint64_t seed) {
  EnsembleConfig ec;
  ec.t0 = cfg.t0;
  ec.T = cfg.T;
  ec.h = h;
  ec.scheme = scheme;
  ec.n = cfg.n;
  ec.master_seed = seed;
  ec.workers = cfg.workers;
  const auto obs = component_observables(sys.dim);
  const auto est = run_ensemble(sys, x0, ec, obs);
  FinalMoments fm;
  for (const auto& o : est.observables) {
    fm.mean.push_back(o.mean.back());
    fm.std_error.push_back(o.std_error.back());
  }
  return fm;
}

}  // namespace

ConvergenceStudy weak_error_study(const SdeSystem& sys, std::span<const double> x0,
                                  const WeakStudyConfig& cfg) {
  if (cfg.steps.size() < 2) throw InvalidArgument("weak_error_study: need at least two steps");
  for (std::size_t i = 0; i < cfg.steps.size(); ++i) {
    step_count(cfg.t0, cfg.T, cfg.steps[i]);
    if (i > 0 && !(cfg.steps[i] < cfg.steps[i - 1])) {
      throw InvalidArgument("weak_error_study: steps must be strictly decreasing");
    }
  }
  if (x0.size() != sys.dim) throw InvalidArgument("weak_error_study: bad initial state");

  ConvergenceStudy study;
  study.reference = cfg.reference;

  // Reference expectation at T.
  std::vector<double> ref_mean(sys.dim, 0.0);
  std::vector<double> ref_se(sys.dim, 0.0);
  if (cfg.reference == WeakReference::ReferenceSolution) {
    const SchemeConfig ref_scheme{Scheme::Srk2, Srk2Coefficients::numerical_search(),
                                  cfg.scheme.brownian_variance};
    auto fm = sampled_final(sys, x0, cfg, cfg.h_ref, ref_scheme, cfg.master_seed);
    ref_mean = std::move(fm.mean);
    ref_se = std::move(fm.std_error);
  } else {
    if (!sys.exact_mean) {
      throw InvalidArgument("weak_error_study: system exposes no closed-form mean");
    }
    std::vector<double> start(x0.begin(), x0.end());
    sys.exact_mean(cfg.T - cfg.t0, start, ref_mean);
  }

  bool unresolved = false;
  for (std::size_t i = 0; i < cfg.steps.size(); ++i) {
    const double h = cfg.steps[i];
    std::vector<double> mean;
    std::vector<double> se(sys.dim, 0.0);
    if (cfg.reference == WeakReference::ExactSchemeExpectation) {
      const auto traj = propagate_scheme_mean(sys, x0, cfg.t0, cfg.T, h, cfg.scheme);
      const auto last = traj.back();
      mean.assign(last.begin(), last.end());
    } else {
      auto fm = sampled_final(sys, x0, cfg, h, cfg.scheme, cfg.master_seed + 1 + i);
      mean = std::move(fm.mean);
      se = std::move(fm.std_error);
    }
    double worst = -1.0;
    double worst_se = 0.0;
    for (std::size_t c = 0; c < sys.dim; ++c) {
      const double err = std::abs(mean[c] - ref_mean[c]);
      if (err > worst) {
        worst = err;
        worst_se = std::hypot(se[c], ref_se[c]);
      }
    }
    study.step_sizes.push_back(h);
    study.weak_errors.push_back(worst);
    study.stderrs.push_back(worst_se);
    if (cfg.reference != WeakReference::ExactSchemeExpectation &&
        !(worst > cfg.resolve_sigmas * worst_se)) {
      unresolved = true;
    }
  }

  const bool any_zero = std::any_of(study.weak_errors.begin(), study.weak_errors.end(),
                                    [](double e) { return !(e > 0.0); });
  if (!any_zero) {
    std::tie(study.fitted_order, study.log_constant) =
        fit_log_log(study.step_sizes, study.weak_errors);
  }
  if (unresolved) {
    throw InconclusiveStudy(
        "weak_error_study: Monte Carlo noise floor exceeds the weak error for at least one "
        "step; increase n or use larger steps",
        std::move(study));
  }
  if (any_zero) throw InconclusiveStudy("weak_error_study: zero weak error", std::move(study));
  return study;
}

void write_estimate_csv(std::ostream& os, const EnsembleEstimate& est) {
  std::vector<std::string> header{"t"};
  for (const auto& o : est.observables) {
    header.push_back(o.name + "_mean");
    header.push_back(o.name + "_stderr");
  }
  csv::write_header(os, header);
  std::vector<double> row(header.size());
  for (std::size_t j = 0; j < est.times.size(); ++j) {
    row[0] = est.times[j];
    for (std::size_t o = 0; o < est.observables.size(); ++o) {
      row[1 + 2 * o] = est.observables[o].mean[j];
      row[2 + 2 * o] = est.observables[o].std_error[j];
    }
    csv::write_row(os, row);
  }
  csv::write_comment(os, "n_realizations=" + std::to_string(est.n_realizations) +
                             " n_excluded=" + std::to_string(est.n_excluded) +
                             (est.tainted ? " TAINTED" : ""));
}

void write_study_csv(std::ostream& os, const ConvergenceStudy& study) {
  csv::write_header(os, {"h", "weak_error", "stderr"});
  for (std::size_t i = 0; i < study.step_sizes.size(); ++i) {
    csv::write_row(os, {study.step_sizes[i], study.weak_errors[i], study.stderrs[i]});
  }
  csv::write_comment(os, "reference=" + std::string(to_string(study.reference)) +
                             " weak_order=" + csv::format_real(study.fitted_order));
}

void write_manifest(std::ostream& os, const RunManifest& m) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  os << "model=" << m.model << '\n'
     << "seed=" << m.seed << '\n'
     << "scheme=" << to_string(m.scheme) << '\n'
     << "coeffs=" << to_string(m.coeffs) << '\n'
     << "h=" << csv::format_real(m.h) << '\n'
     << "T=" << csv::format_real(m.T) << '\n'
     << "n=" << m.n << '\n'
     << "n_excluded=" << m.n_excluded << '\n'
     << "tainted=" << (m.tainted ? "true" : "false") << '\n'
     << "created=" << stamp << '\n';
}

}  // namespace stokep
