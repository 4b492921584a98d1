#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stokep/errors.hpp"
#include "stokep/noise.hpp"
#include "stokep/sde.hpp"

namespace stokep {

enum class Scheme { EulerMaruyama, Srk2 };
enum class CoefficientSet { HeunAnalog, NumericalSearch };

std::string_view to_string(Scheme s);
std::string_view to_string(CoefficientSet c);

/**
 * Two-stage weak-order-2 stochastic Runge-Kutta tableau (Kasdin and
 * Stankievech):
 *
 *   k1 = h f(x, t)                        j1 = g(x, t) w1
 *   k2 = h f(x + a21 k1 + b21 j1, t + c2 h)
 *   j2 = g(x + e21 k1 + g21 j1, t + d2 h) w2
 *   x' = x + alpha1 k1 + alpha2 k2 + beta1 j1 + beta2 j2
 *
 * with independent w_l ~ N(0, q_l Q h). Note d2 > 1 for both published
 * sets: j2 samples g beyond the end of the step.
 */
struct Srk2Coefficients {
  std::array<double, 2> alpha{};
  std::array<double, 2> beta{};
  double c2 = 0.0;
  double d2 = 0.0;
  double a21 = 0.0;
  double b21 = 0.0;
  double e21 = 0.0;
  double g21 = 0.0;
  std::array<double, 2> q{};
  CoefficientSet label = CoefficientSet::NumericalSearch;

  static Srk2Coefficients heun_analog();
  static Srk2Coefficients numerical_search();
  static Srk2Coefficients from_label(CoefficientSet label);
};

struct SchemeConfig {
  Scheme scheme = Scheme::Srk2;
  Srk2Coefficients coeffs = Srk2Coefficients::numerical_search();
  /// Variance rate Q of the driving Brownian motion.
  double brownian_variance = 1.0;
};

/// Raw standard-normal samples each scheme consumes per step and channel.
std::size_t samples_per_step(Scheme s);

/// Uniform-grid solution; node 0 is the initial condition.
struct Trajectory {
  std::size_t dim = 0;
  double h = 0.0;
  Scheme scheme = Scheme::Srk2;
  std::vector<double> times;
  std::vector<double> states;  // node-major, dim entries per node

  std::size_t size() const { return times.size(); }
  std::span<const double> state(std::size_t node) const {
    return {states.data() + node * dim, dim};
  }
  std::span<const double> back() const { return state(size() - 1); }
};

/// Numeric failure during integration; carries every node computed so far.
class IntegrationError : public NumericDomainError {
 public:
  IntegrationError(const std::string& what, std::size_t step, Trajectory partial)
      : NumericDomainError(what), step_(step), partial_(std::move(partial)) {}

  std::size_t step() const { return step_; }
  const Trajectory& partial() const { return partial_; }

 private:
  std::size_t step_;
  Trajectory partial_;
};

/// x + mu(t, x) h + sigma(t, x) dW, with dW already scaled to variance h.
std::vector<double> euler_maruyama_step(const SdeSystem& sys, double t,
                                        std::span<const double> x, double h,
                                        std::span<const double> dW);

/// One SRK2 step; `draws` holds unscaled normals laid out [channel][sample].
std::vector<double> srk2_step(const SdeSystem& sys, double t, std::span<const double> x,
                              double h, const Srk2Coefficients& coeffs,
                              std::span<const double> draws,
                              double brownian_variance = 1.0);

/**
 * Reusable stepper that owns its stage buffers. Steps are written into
 * `out` (which may alias nothing in `x`).
 */
class Stepper {
 public:
  Stepper(const SdeSystem& sys, SchemeConfig config);

  /// `draws` are the raw grid samples of one step ([channel][sample]).
  void step(double t, std::span<const double> x, double h,
            std::span<const double> draws, std::span<double> out);

  const SchemeConfig& config() const { return config_; }

 private:
  void euler(double t, std::span<const double> x, double h,
             std::span<const double> draws, std::span<double> out);
  void srk2(double t, std::span<const double> x, double h,
            std::span<const double> draws, std::span<double> out);

  const SdeSystem& sys_;
  SchemeConfig config_;
  std::vector<double> k1_, k2_, j1_, j2_, stage_, sigma_, w_;
};

/// Number of uniform steps covering [t0, T]; throws when (T - t0)/h is not
/// an integer up to rounding.
std::size_t step_count(double t0, double T, double h);

Trajectory integrate(const SdeSystem& sys, std::span<const double> x0, double t0,
                     double T, double h, const SchemeConfig& config,
                     const NoiseGrid& grid);

inline constexpr double kReferenceStep = 0x1.0p-10;

/// SRK2 with the numerically searched coefficients at a fine step, used as
/// ground truth when no closed form exists. Only expectations of the
/// result may be compared against coarser runs.
Trajectory reference_solution(const SdeSystem& sys, std::span<const double> x0,
                              double t0, double T, double h_ref,
                              const NoiseGrid& grid, double max_step = kReferenceStep);

/**
 * Exact expectation of the numerical scheme for affine systems: the mean
 * recursion is the stepper applied to the mean with all noise samples set to
 * zero. Every returned node is E(x_n), free of Monte Carlo error.
 */
Trajectory propagate_scheme_mean(const SdeSystem& sys, std::span<const double> x0,
                                 double t0, double T, double h,
                                 const SchemeConfig& config);

}  // namespace stokep
