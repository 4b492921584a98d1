#include "stokep/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stokep/errors.hpp"

namespace stokep {

TwoBodyParams::TwoBodyParams(double m, double k, double sigma_r, double sigma_phi)
    : m_(m), k_(k), mu_(k / m), sigma_r_(sigma_r), sigma_phi_(sigma_phi) {
  if (!(m > 0.0) || !(k > 0.0) || !std::isfinite(m) || !std::isfinite(k)) {
    throw InvalidArgument("TwoBodyParams: m and k must be positive and finite");
  }
  if (!(sigma_r >= 0.0) || !(sigma_phi >= 0.0) || !std::isfinite(sigma_r) ||
      !std::isfinite(sigma_phi)) {
    throw InvalidArgument("TwoBodyParams: noise intensities must be >= 0");
  }
}

TwoBodyParams TwoBodyParams::canonical() {
  return {1.0, 1.0, kCanonicalSigmaR, kCanonicalSigmaPhi};
}

TwoBodyParams TwoBodyParams::with_noise(double sigma_r, double sigma_phi) const {
  return {m_, k_, sigma_r, sigma_phi};
}

PolarState canonical_initial_state() { return {1.0, 1.0, 0.01, 1.1}; }

namespace {

void guard_radius(double r) {
  if (!(r >= kCollisionRadius)) {
    throw NumericDomainError("two-body: radius " + std::to_string(r) +
                             " below collision guard");
  }
}

}  // namespace

SdeSystem two_body_system(const TwoBodyParams& p) {
  SdeSystem sys;
  sys.dim = 4;
  sys.noise_dim = 2;
  sys.interpretation = Interpretation::Ito;
  sys.drift = [mu = p.mu()](double, std::span<const double> x, std::span<double> out) {
    const double r = x[0], v = x[2], w = x[3];
    guard_radius(r);
    out[0] = v;
    out[1] = w;
    out[2] = r * w * w - mu / (r * r);
    out[3] = -2.0 * v * w / r;
  };
  sys.diffusion = [sr = p.sigma_r(), sp = p.sigma_phi()](double, std::span<const double> x,
                                                         std::span<double> out) {
    const double r = x[0];
    guard_radius(r);
    std::fill(out.begin(), out.end(), 0.0);
    out[2 * 2 + 0] = r * sr;
    out[3 * 2 + 1] = sp / r;
  };
  return sys;
}

SdeSystem two_body_canonical_system(const TwoBodyParams& p) {
  SdeSystem sys;
  sys.dim = 4;
  sys.noise_dim = 2;
  sys.interpretation = Interpretation::Stratonovich;
  sys.drift = [m = p.m(), k = p.k()](double, std::span<const double> x,
                                     std::span<double> out) {
    const double r = x[0], pr = x[2], pphi = x[3];
    guard_radius(r);
    out[0] = pr / m;
    out[1] = pphi / (m * r * r);
    out[2] = pphi * pphi / (m * r * r * r) - k / (r * r);
    out[3] = 0.0;
  };
  sys.diffusion = [m = p.m(), sr = p.sigma_r(), sp = p.sigma_phi()](
                      double, std::span<const double> x, std::span<double> out) {
    const double r = x[0];
    guard_radius(r);
    std::fill(out.begin(), out.end(), 0.0);
    out[2 * 2 + 0] = m * sr * r;
    out[3 * 2 + 1] = m * sp * r;
  };
  return sys;
}

HamiltonianSplit canonical_split() { return {{2, 3}, {0, 1}}; }

std::array<double, 4> polar_to_canonical(const TwoBodyParams& p, const PolarState& s) {
  return {s.r, s.phi, p.m() * s.v, p.m() * s.r * s.r * s.w};
}

PolarState canonical_to_polar(const TwoBodyParams& p, std::span<const double> c) {
  const double r = c[0];
  guard_radius(r);
  return {r, c[1], c[2] / p.m(), c[3] / (p.m() * r * r)};
}

SdeSystem langevin_system(const LangevinParams& p) {
  SdeSystem sys;
  sys.dim = 1;
  sys.noise_dim = 1;
  sys.interpretation = Interpretation::Ito;
  sys.affine = true;
  sys.drift = [mu = p.mu_ou](double, std::span<const double> x, std::span<double> out) {
    out[0] = -mu * x[0];
  };
  sys.diffusion = [sigma = p.sigma](double, std::span<const double>, std::span<double> out) {
    out[0] = sigma;
  };
  sys.exact_mean = [mu = p.mu_ou](double t, std::span<const double> x0,
                                  std::span<double> out) { out[0] = x0[0] * std::exp(-mu * t); };
  return sys;
}

double langevin_mean(const LangevinParams& p, double t) {
  return p.x0 * std::exp(-p.mu_ou * t);
}

double langevin_second_moment(const LangevinParams& p, double t) {
  const double decay = std::exp(-2.0 * p.mu_ou * t);
  return p.x0 * p.x0 * decay + p.sigma * p.sigma / (2.0 * p.mu_ou) * (1.0 - decay);
}

double angular_momentum(const TwoBodyParams& p, const PolarState& s) {
  if (!(s.r > 0.0)) throw NumericDomainError("angular_momentum: r must be positive");
  return p.m() * s.r * s.r * s.w;
}

double energy(const TwoBodyParams& p, const PolarState& s) {
  if (!(s.r > 0.0)) throw NumericDomainError("energy: r must be positive");
  return 0.5 * p.m() * (s.v * s.v + s.r * s.r * s.w * s.w) - p.k() / s.r;
}

InvariantDifferentials invariant_differentials(const TwoBodyParams& p, const PolarState& s) {
  if (!(s.r > 0.0)) throw NumericDomainError("invariant_differentials: r must be positive");
  const double m = p.m(), r = s.r, sr = p.sigma_r(), sp = p.sigma_phi();
  InvariantDifferentials d;
  d.dM.drift = 0.0;
  d.dM.diffusion = {0.0, m * r * sp};
  d.dH.drift = 0.5 * m * energy_drift_rate(p, s);
  d.dH.diffusion = {m * r * s.v * sr, m * r * s.w * sp};
  return d;
}

double energy_drift_rate(const TwoBodyParams& p, const PolarState& s) {
  return p.sigma_r() * p.sigma_r() * s.r * s.r + p.sigma_phi() * p.sigma_phi();
}

}  // namespace stokep
