#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "stokep/models.hpp"
#include "stokep/noise.hpp"
#include "stokep/sde.hpp"

namespace stokep {

/// Osculating planar elements: semi-major axis, eccentricity, pericenter
/// angle and true anomaly. Angles are reported in (-pi, pi].
struct OrbitalState {
  double a = 1.0;
  double e = 0.0;
  double omega = 0.0;
  double f = 0.0;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Below this eccentricity the pericenter angle carries no information.
inline constexpr double kExtractionMinEccentricity = 1e-12;
/// The Gauss equations divide by e; states below this raise
/// PericenterSingularityError.
inline constexpr double kGaussMinEccentricity = 1e-6;

/**
 * Elements from a polar state:
 *   a = -k / (2H),  e = sqrt(1 + 2 M^2 H / (m k^2)),
 *   omega = atan2(A_y, A_x) from the Laplace-Runge-Lenz components,
 *   f = phi - omega.
 * Requires a bound (H < 0), prograde (M > 0) orbit.
 */
OrbitalState extract_elements(const TwoBodyParams& p, const PolarState& s);

/// Laplace-Runge-Lenz components (A_x, A_y); |A| = e m k.
std::array<double, 2> runge_lenz(const TwoBodyParams& p, const PolarState& s);

/// Inverse map: r = a(1-e^2)/(1+e cos f), v = sqrt(mu/(a(1-e^2))) e sin f,
/// w = sqrt(mu a (1-e^2)) / r^2, phi = wrap(omega + f).
PolarState reconstruct_polar(const TwoBodyParams& p, const OrbitalState& el);

/**
 * Perturbing acceleration split into a deterministic part (radial_accel,
 * transverse_accel) and stochastic intensities against the 2-channel
 * Brownian motion (radial_noise, transverse_noise):
 *   dv = (r w^2 - mu/r^2 + Rbar) dt + Rtilde . dB
 *   dw = (-2 v w / r + Tbar / r) dt + Ttilde / r . dB
 */
struct PerturbationSpec {
  std::function<double(const OrbitalState&)> radial_accel;
  std::function<double(const OrbitalState&)> transverse_accel;
  std::function<std::array<double, 2>(const OrbitalState&)> radial_noise;
  std::function<std::array<double, 2>(const OrbitalState&)> transverse_noise;
};

/// The two-body cloud force: Rtilde = (r sigma_r, 0), Ttilde = (0, sigma_phi).
PerturbationSpec cloud_perturbation(const TwoBodyParams& p);

/// Drift and dB-coefficients of one element.
struct ElementRate {
  double drift = 0.0;
  std::array<double, 2> diffusion{};
};

struct GaussRates {
  ElementRate a;
  ElementRate e;
  ElementRate omega;
  /// d(phi) = w dt
  double phi_drift = 0.0;
};

/// Stochastic Gauss equations for (a, e, omega), including every Ito
/// correction in Rtilde.Rtilde, Ttilde.Ttilde and Rtilde.Ttilde.
GaussRates gauss_rates(const TwoBodyParams& p, const PerturbationSpec& pert,
                       const OrbitalState& el);

/// 4-state (a, e, omega, phi), 2-channel Ito system; f = phi - omega.
SdeSystem gauss_system(const TwoBodyParams& p, PerturbationSpec pert);

/// Polar two-body SDE driven by a general perturbation (evaluated on the
/// osculating elements of the current state).
SdeSystem perturbed_polar_system(const TwoBodyParams& p, PerturbationSpec pert);

/// dM and dH expressed through elements and the perturbation.
struct ElementInvariantDifferentials {
  ElementRate dM;
  ElementRate dH;
};
ElementInvariantDifferentials element_invariant_differentials(const TwoBodyParams& p,
                                                              const PerturbationSpec& pert,
                                                              const OrbitalState& el);

/// Pathwise comparison of the polar SDE (elements extracted per node) with
/// the Gauss SDE integrated directly, both by Euler-Maruyama on one grid.
struct ComparisonReport {
  std::vector<double> t;
  std::vector<double> a_direct, a_gauss;
  std::vector<double> e_direct, e_gauss;
  std::vector<double> omega_direct, omega_gauss;
  std::vector<double> H_direct, H_from_a;
  double sup_rel_a = 0.0;
  double sup_rel_e = 0.0;
  double sup_abs_omega = 0.0;
  double sup_rel_H = 0.0;
  /// True when a path left the elliptic domain and the report stops early.
  bool truncated = false;
  std::size_t requested_nodes = 0;
};

ComparisonReport compare_formulations(const TwoBodyParams& p, const PolarState& s0,
                                      double T, double h, const NoiseGrid& grid);

/// Columns t, a_direct, a_gauss, e_direct, e_gauss, omega_direct,
/// omega_gauss, H_direct, H_from_a.
void write_comparison_csv(std::ostream& os, const ComparisonReport& report);

}  // namespace stokep
