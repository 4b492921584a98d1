#include "stokep/integrators.hpp"

#include <cmath>
#include <string>

namespace stokep {

std::string_view to_string(Scheme s) {
  return s == Scheme::EulerMaruyama ? "em" : "srk2";
}

std::string_view to_string(CoefficientSet c) {
  return c == CoefficientSet::HeunAnalog ? "heun" : "search";
}

Srk2Coefficients Srk2Coefficients::heun_analog() {
  Srk2Coefficients c;
  c.alpha = {1.0 / 4.0, 3.0 / 4.0};
  c.beta = {1.0, 1.0};
  c.c2 = 2.0 / 3.0;
  c.d2 = 3.0 / 2.0;
  c.a21 = 2.0 / 3.0;
  c.b21 = 1.0;
  c.e21 = 3.0 / 2.0;
  c.g21 = 3.0 / 2.0;
  c.q = {2.0 / 3.0, 1.0 / 3.0};
  c.label = CoefficientSet::HeunAnalog;
  return c;
}

Srk2Coefficients Srk2Coefficients::numerical_search() {
  Srk2Coefficients c;
  c.alpha = {0.136713, 0.863287};
  c.beta = {-1.512997, 1.112094};
  c.c2 = 0.579182;
  c.d2 = 1.18816;
  c.a21 = 0.579182;
  c.b21 = -1.512997;
  c.e21 = 1.18816;
  c.g21 = 2.16704;
  c.q = {0.25301, 0.34026};
  c.label = CoefficientSet::NumericalSearch;
  return c;
}

Srk2Coefficients Srk2Coefficients::from_label(CoefficientSet label) {
  return label == CoefficientSet::HeunAnalog ? heun_analog() : numerical_search();
}

std::size_t samples_per_step(Scheme s) { return s == Scheme::EulerMaruyama ? 1 : 2; }

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_stage(std::span<const double> v, const char* stage) {
  if (!all_finite(v)) {
    throw NumericDomainError(std::string("srk2_step: non-finite stage ") + stage);
  }
}

// out += scale * sigma * w, sigma row-major dim x m.
void add_diffusion(std::span<const double> sigma, std::span<const double> w,
                   std::span<double> out) {
  const std::size_t m = w.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += sigma[i * m + j] * w[j];
    out[i] = acc;
  }
}

}  // namespace

Stepper::Stepper(const SdeSystem& sys, SchemeConfig config)
    : sys_(sys),
      config_(config),
      k1_(sys.dim),
      k2_(sys.dim),
      j1_(sys.dim),
      j2_(sys.dim),
      stage_(sys.dim),
      sigma_(sys.dim * sys.noise_dim),
      w_(sys.noise_dim) {
  if (!(config.brownian_variance > 0.0)) {
    throw InvalidArgument("Stepper: brownian_variance must be positive");
  }
}

void Stepper::step(double t, std::span<const double> x, double h,
                   std::span<const double> draws, std::span<double> out) {
  if (!(h > 0.0)) throw InvalidArgument("step: h must be positive");
  const std::size_t expected = sys_.noise_dim * samples_per_step(config_.scheme);
  if (draws.size() != expected) {
    throw InvalidArgument("step: expected " + std::to_string(expected) +
                          " noise samples, got " + std::to_string(draws.size()));
  }
  if (config_.scheme == Scheme::EulerMaruyama) {
    euler(t, x, h, draws, out);
  } else {
    srk2(t, x, h, draws, out);
  }
}

void Stepper::euler(double t, std::span<const double> x, double h,
                    std::span<const double> draws, std::span<double> out) {
  const double scale = std::sqrt(config_.brownian_variance * h);
  for (std::size_t j = 0; j < w_.size(); ++j) w_[j] = scale * draws[j];
  sys_.drift(t, x, k1_);
  sys_.diffusion(t, x, sigma_);
  add_diffusion(sigma_, w_, j1_);
  for (std::size_t i = 0; i < sys_.dim; ++i) out[i] = x[i] + k1_[i] * h + j1_[i];
}

void Stepper::srk2(double t, std::span<const double> x, double h,
                   std::span<const double> draws, std::span<double> out) {
  const auto& c = config_.coeffs;
  const double qh = config_.brownian_variance * h;
  const double s1 = std::sqrt(c.q[0] * qh);
  const double s2 = std::sqrt(c.q[1] * qh);
  const std::size_t n = sys_.dim;

  sys_.drift(t, x, k1_);
  for (double& v : k1_) v *= h;
  check_stage(k1_, "k1");

  for (std::size_t j = 0; j < w_.size(); ++j) w_[j] = s1 * draws[2 * j];
  sys_.diffusion(t, x, sigma_);
  add_diffusion(sigma_, w_, j1_);
  check_stage(j1_, "j1");

  for (std::size_t i = 0; i < n; ++i) stage_[i] = x[i] + c.a21 * k1_[i] + c.b21 * j1_[i];
  sys_.drift(t + c.c2 * h, stage_, k2_);
  for (double& v : k2_) v *= h;
  check_stage(k2_, "k2");

  for (std::size_t i = 0; i < n; ++i) stage_[i] = x[i] + c.e21 * k1_[i] + c.g21 * j1_[i];
  for (std::size_t j = 0; j < w_.size(); ++j) w_[j] = s2 * draws[2 * j + 1];
  sys_.diffusion(t + c.d2 * h, stage_, sigma_);
  add_diffusion(sigma_, w_, j2_);
  check_stage(j2_, "j2");

  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x[i] + c.alpha[0] * k1_[i] + c.alpha[1] * k2_[i] + c.beta[0] * j1_[i] +
             c.beta[1] * j2_[i];
  }
}

std::vector<double> euler_maruyama_step(const SdeSystem& sys, double t,
                                        std::span<const double> x, double h,
                                        std::span<const double> dW) {
  if (!(h > 0.0)) throw InvalidArgument("euler_maruyama_step: h must be positive");
  if (dW.size() != sys.noise_dim || x.size() != sys.dim) {
    throw InvalidArgument("euler_maruyama_step: shape mismatch");
  }
  const auto mu = sys.eval_drift(t, x);
  const Matrix sigma = sys.eval_diffusion(t, x);
  std::vector<double> out(sys.dim);
  for (std::size_t i = 0; i < sys.dim; ++i) {
    double acc = x[i] + mu[i] * h;
    for (std::size_t j = 0; j < sys.noise_dim; ++j) acc += sigma(i, j) * dW[j];
    out[i] = acc;
  }
  if (!all_finite(out)) throw NumericDomainError("euler_maruyama_step: non-finite state");
  return out;
}

std::vector<double> srk2_step(const SdeSystem& sys, double t, std::span<const double> x,
                              double h, const Srk2Coefficients& coeffs,
                              std::span<const double> draws, double brownian_variance) {
  if (x.size() != sys.dim) throw InvalidArgument("srk2_step: shape mismatch");
  Stepper stepper(sys, SchemeConfig{Scheme::Srk2, coeffs, brownian_variance});
  std::vector<double> out(sys.dim);
  stepper.step(t, x, h, draws, out);
  return out;
}

std::size_t step_count(double t0, double T, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("step size must be positive");
  const double span = T - t0;
  if (!(span >= 0.0)) throw InvalidArgument("final time precedes initial time");
  const double ratio = span / h;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("(T - t0)/h = " + std::to_string(ratio) + " is not an integer");
  }
  return static_cast<std::size_t>(n);
}

namespace {

Trajectory start_trajectory(const SdeSystem& sys, std::span<const double> x0, double t0,
                            double h, Scheme scheme, std::size_t n_steps) {
  if (x0.size() != sys.dim) {
    throw InvalidArgument("integrate: initial state has wrong dimension");
  }
  Trajectory traj;
  traj.dim = sys.dim;
  traj.h = h;
  traj.scheme = scheme;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve((n_steps + 1) * sys.dim);
  traj.times.push_back(t0);
  traj.states.insert(traj.states.end(), x0.begin(), x0.end());
  return traj;
}

template <typename DrawsFn>
Trajectory run(const SdeSystem& sys, std::span<const double> x0, double t0, double h,
               std::size_t n_steps, const SchemeConfig& config, DrawsFn draws_for) {
  Trajectory traj = start_trajectory(sys, x0, t0, h, config.scheme, n_steps);
  Stepper stepper(sys, config);
  std::vector<double> next(sys.dim);
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    const auto x = traj.state(s);
    try {
      stepper.step(t, x, h, draws_for(s), next);
      if (!all_finite(next)) throw NumericDomainError("non-finite state");
    } catch (const NumericDomainError& e) {
      throw IntegrationError("integrate: step " + std::to_string(s) + " (t=" +
                                 std::to_string(t) + "): " + e.what(),
                             s, std::move(traj));
    }
    traj.times.push_back(t0 + static_cast<double>(s + 1) * h);
    traj.states.insert(traj.states.end(), next.begin(), next.end());
  }
  return traj;
}

}  // namespace

Trajectory integrate(const SdeSystem& sys, std::span<const double> x0, double t0,
                     double T, double h, const SchemeConfig& config,
                     const NoiseGrid& grid) {
  if (sys.interpretation != Interpretation::Ito) {
    throw InvalidArgument("integrate: schemes require an Ito system");
  }
  const std::size_t n_steps = step_count(t0, T, h);
  if (n_steps > 0) {
    if (grid.n_steps() != n_steps || grid.n_channels() != sys.noise_dim ||
        grid.samples_per_step() != samples_per_step(config.scheme)) {
      throw InvalidArgument(
          "integrate: noise grid shape (" + std::to_string(grid.n_steps()) + "x" +
          std::to_string(grid.n_channels()) + "x" + std::to_string(grid.samples_per_step()) +
          ") does not match steps/channels/samples (" + std::to_string(n_steps) + "x" +
          std::to_string(sys.noise_dim) + "x" +
          std::to_string(samples_per_step(config.scheme)) + ")");
    }
  }
  return run(sys, x0, t0, h, n_steps, config,
             [&grid](std::size_t s) { return grid.step(s); });
}

Trajectory reference_solution(const SdeSystem& sys, std::span<const double> x0,
                              double t0, double T, double h_ref, const NoiseGrid& grid,
                              double max_step) {
  if (h_ref > max_step) {
    throw InvalidArgument("reference_solution: h_ref exceeds the reference step bound");
  }
  return integrate(sys, x0, t0, T, h_ref,
                   SchemeConfig{Scheme::Srk2, Srk2Coefficients::numerical_search(), 1.0},
                   grid);
}

Trajectory propagate_scheme_mean(const SdeSystem& sys, std::span<const double> x0,
                                 double t0, double T, double h,
                                 const SchemeConfig& config) {
  if (!sys.affine) {
    throw InvalidArgument("propagate_scheme_mean: system is not declared affine");
  }
  if (sys.interpretation != Interpretation::Ito) {
    throw InvalidArgument("propagate_scheme_mean: schemes require an Ito system");
  }
  const std::size_t n_steps = step_count(t0, T, h);
  const std::vector<double> zeros(sys.noise_dim * samples_per_step(config.scheme), 0.0);
  return run(sys, x0, t0, h, n_steps, config,
             [&zeros](std::size_t) { return std::span<const double>(zeros); });
}

}  // namespace stokep
