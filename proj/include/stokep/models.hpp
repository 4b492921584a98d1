#pragma once

#include <array>
#include <span>

#include "stokep/sde.hpp"

namespace stokep {

/// Evaluations closer to the central body than this raise NumericDomainError.
inline constexpr double kCollisionRadius = 1e-6;

/**
 * Planar two-body parameters in canonical units: reduced mass m, potential
 * coefficient k = G M_S M_P, gravitational parameter mu = k/m, and the
 * radial (TU^-3/2) and tangential (AU TU^-3/2) noise intensities.
 */
class TwoBodyParams {
 public:
  TwoBodyParams(double m, double k, double sigma_r, double sigma_phi);

  /// m = k = 1 with the noise intensities of the reference study.
  static TwoBodyParams canonical();
  /// Same masses, different noise.
  TwoBodyParams with_noise(double sigma_r, double sigma_phi) const;

  double m() const { return m_; }
  double k() const { return k_; }
  double mu() const { return mu_; }
  double sigma_r() const { return sigma_r_; }
  double sigma_phi() const { return sigma_phi_; }

 private:
  double m_, k_, mu_, sigma_r_, sigma_phi_;
};

inline constexpr double kCanonicalSigmaR = 0.0121;
inline constexpr double kCanonicalSigmaPhi = 2.2e-4;

/// (r, phi, v, w): radius, position angle, radial velocity, angular velocity.
struct PolarState {
  double r = 1.0;
  double phi = 0.0;
  double v = 0.0;
  double w = 0.0;

  std::array<double, 4> to_array() const { return {r, phi, v, w}; }
  static PolarState from(std::span<const double> x) { return {x[0], x[1], x[2], x[3]}; }
};

/// r = 1, phi = 1, v = 0.01, w = 1.1 (canonical units).
PolarState canonical_initial_state();
inline constexpr double kCanonicalFinalTime = 15.0;

struct LangevinParams {
  double mu_ou = 1.0;
  double sigma = 0.001;
  double x0 = 1.0;
};

/// Ito system on (r, phi, v, w) with independent radial and tangential noise:
///   dv = (r w^2 - k/(m r^2)) dt + r sigma_r dB^r
///   dw = -2 v w / r dt + sigma_phi / r dB^phi
SdeSystem two_body_system(const TwoBodyParams& p);

/**
 * The same dynamics in canonical coordinates (r, phi, p_r, p_phi) with
 * p_r = m v and p_phi = m r^2 w, flagged as a Stratonovich system:
 *   dp_r   = (p_phi^2/(m r^3) - k/r^2) dt + m sigma_r r o dB^r
 *   dp_phi = m sigma_phi r o dB^phi
 * Its Wong-Zakai correction vanishes, so it is also the Ito form.
 */
SdeSystem two_body_canonical_system(const TwoBodyParams& p);

/// Momenta (p_r, p_phi) at indices 2, 3 paired with (r, phi) at 0, 1.
HamiltonianSplit canonical_split();

std::array<double, 4> polar_to_canonical(const TwoBodyParams& p, const PolarState& s);
PolarState canonical_to_polar(const TwoBodyParams& p, std::span<const double> c);

/// dX = -mu X dt + sigma dB; affine with a closed-form mean.
SdeSystem langevin_system(const LangevinParams& p);
double langevin_mean(const LangevinParams& p, double t);
double langevin_second_moment(const LangevinParams& p, double t);

/// M = m r^2 w
double angular_momentum(const TwoBodyParams& p, const PolarState& s);
/// H = m (v^2 + r^2 w^2)/2 - k/r
double energy(const TwoBodyParams& p, const PolarState& s);

struct InvariantDifferentials {
  ItoDifferential dM;
  ItoDifferential dH;
};

/// Closed-form Ito differentials of M and H along the two-body SDE.
InvariantDifferentials invariant_differentials(const TwoBodyParams& p, const PolarState& s);

/// sigma_r^2 r^2 + sigma_phi^2: the integrand of the energy drift,
/// E H(X_t) = H(X_0) + (m/2) E int_0^t (sigma_r^2 r^2 + sigma_phi^2) ds.
double energy_drift_rate(const TwoBodyParams& p, const PolarState& s);

}  // namespace stokep
