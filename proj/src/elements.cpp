#include "stokep/elements.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "stokep/csv.hpp"
#include "stokep/errors.hpp"
#include "stokep/integrators.hpp"

namespace stokep {

double wrap_angle(double angle) {
  const double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  return wrapped <= -std::numbers::pi ? wrapped + 2.0 * std::numbers::pi : wrapped;
}

std::array<double, 2> runge_lenz(const TwoBodyParams& p, const PolarState& s) {
  const double m = p.m(), k = p.k(), r = s.r, v = s.v, w = s.w;
  const double radial = m * r * r * r * w * w - k;
  const double cross = m * r * r * w * v;
  const double c = std::cos(s.phi), sn = std::sin(s.phi);
  return {m * (c * radial + cross * sn), m * (sn * radial - cross * c)};
}

OrbitalState extract_elements(const TwoBodyParams& p, const PolarState& s) {
  if (!(s.r > 0.0)) throw NumericDomainError("extract_elements: r must be positive");
  const double H = energy(p, s);
  if (!(H < 0.0)) {
    throw UnboundOrbitError("extract_elements: orbit is not bound (H = " + std::to_string(H) + ")");
  }
  const double M = angular_momentum(p, s);
  if (!(M > 0.0)) {
    throw NumericDomainError("extract_elements: only prograde orbits (M > 0) are supported");
  }
  const double m = p.m(), k = p.k();
  OrbitalState el;
  el.a = -k / (2.0 * H);
  el.e = std::sqrt(std::max(0.0, 1.0 + 2.0 * M * M * H / (m * k * k)));
  if (el.e < kExtractionMinEccentricity) {
    throw PericenterSingularityError("extract_elements: eccentricity below " +
                                     std::to_string(kExtractionMinEccentricity) +
                                     ", pericenter undefined");
  }
  const auto A = runge_lenz(p, s);
  el.omega = std::atan2(A[1], A[0]);
  el.f = wrap_angle(s.phi - el.omega);
  return el;
}

PolarState reconstruct_polar(const TwoBodyParams& p, const OrbitalState& el) {
  const double semi_latus = el.a * (1.0 - el.e * el.e);
  if (!(semi_latus > 0.0)) throw UnboundOrbitError("reconstruct_polar: not an ellipse");
  const double mu = p.mu();
  PolarState s;
  s.r = semi_latus / (1.0 + el.e * std::cos(el.f));
  s.v = std::sqrt(mu / semi_latus) * el.e * std::sin(el.f);
  s.w = std::sqrt(mu * semi_latus) / (s.r * s.r);
  s.phi = wrap_angle(el.omega + el.f);
  return s;
}

PerturbationSpec cloud_perturbation(const TwoBodyParams& p) {
  PerturbationSpec pert;
  pert.radial_accel = [](const OrbitalState&) { return 0.0; };
  pert.transverse_accel = [](const OrbitalState&) { return 0.0; };
  pert.radial_noise = [sr = p.sigma_r()](const OrbitalState& el) {
    const double r = el.a * (1.0 - el.e * el.e) / (1.0 + el.e * std::cos(el.f));
    return std::array<double, 2>{r * sr, 0.0};
  };
  pert.transverse_noise = [sp = p.sigma_phi()](const OrbitalState&) {
    return std::array<double, 2>{0.0, sp};
  };
  return pert;
}

namespace {

void require_elliptic(const OrbitalState& el) {
  if (!std::isfinite(el.a) || !std::isfinite(el.e) || !(el.a > 0.0) || !(el.e < 1.0)) {
    throw UnboundOrbitError("Gauss equations: state left the elliptic domain (a = " +
                            std::to_string(el.a) + ", e = " + std::to_string(el.e) + ")");
  }
  if (!(el.e >= kGaussMinEccentricity)) {
    throw PericenterSingularityError("Gauss equations: eccentricity " + std::to_string(el.e) +
                                     " below singularity threshold");
  }
}

double dot(const std::array<double, 2>& x, const std::array<double, 2>& y) {
  return x[0] * y[0] + x[1] * y[1];
}

std::array<double, 2> combine(double cr, const std::array<double, 2>& R, double ct,
                              const std::array<double, 2>& T) {
  return {cr * R[0] + ct * T[0], cr * R[1] + ct * T[1]};
}

}  // namespace

GaussRates gauss_rates(const TwoBodyParams& p, const PerturbationSpec& pert,
                       const OrbitalState& el) {
  require_elliptic(el);
  const double mu = p.mu();
  const double a = el.a, e = el.e, f = el.f;
  const double sf = std::sin(f), cf = std::cos(f);
  const double s2f = std::sin(2.0 * f), c2f = std::cos(2.0 * f);
  const double one_e2 = 1.0 - e * e;
  const double semi_latus = a * one_e2;
  const double q = 1.0 + e * cf;
  const double root = std::sqrt(semi_latus / mu);

  const double Rbar = pert.radial_accel(el);
  const double Tbar = pert.transverse_accel(el);
  const auto R = pert.radial_noise(el);
  const auto T = pert.transverse_noise(el);
  const double RR = dot(R, R), TT = dot(T, T), RT = dot(R, T);

  GaussRates out;

  // Semi-major axis.
  {
    const double lead = 2.0 * std::pow(a, 1.5) / std::sqrt(mu * one_e2);
    out.a.drift = lead * (e * sf * Rbar + q * Tbar) +
                  a * a / mu *
                      ((1.0 + 4.0 * e * e * sf * sf / one_e2) * RR +
                       (1.0 + 4.0 * q * q / one_e2) * TT) +
                  8.0 * a * a / (mu * one_e2) * e * sf * q * RT;
    out.a.diffusion = combine(lead * e * sf, R, lead * q, T);
  }

  // Eccentricity.
  {
    const double K = cf + (e + cf) / q;
    out.e.drift = root * (sf * Rbar + K * Tbar) + semi_latus * cf * cf / (2.0 * e * mu) * RR +
                  semi_latus / (mu * e) * (2.0 - cf / 2.0 * ((2.0 + e * cf) / q) * K) * TT +
                  semi_latus / (mu * e * q) * (e * sf * sf * sf - s2f) * RT;
    out.e.diffusion = combine(root * sf, R, root * K, T);
  }

  // Pericenter.
  {
    const double cr = -cf / e;
    const double ct = sf / e * ((2.0 + e * cf) / q);
    out.omega.drift =
        root * (cr * Rbar + ct * Tbar) +
        semi_latus / (mu * e * e) *
            (s2f / 2.0 * RR - (e + cf * (2.0 + e * cf) * (2.0 + e * cf)) * sf / (q * q) * TT +
             ((2.0 + e * cf) / q) * c2f * RT);
    out.omega.diffusion = combine(root * cr, R, root * ct, T);
  }

  const double r = semi_latus / q;
  out.phi_drift = std::sqrt(mu * semi_latus) / (r * r);
  return out;
}

SdeSystem gauss_system(const TwoBodyParams& p, PerturbationSpec pert) {
  SdeSystem sys;
  sys.dim = 4;
  sys.noise_dim = 2;
  sys.interpretation = Interpretation::Ito;
  auto state_of = [](std::span<const double> x) {
    return OrbitalState{x[0], x[1], x[2], wrap_angle(x[3] - x[2])};
  };
  sys.drift = [p, pert, state_of](double, std::span<const double> x, std::span<double> out) {
    const auto rates = gauss_rates(p, pert, state_of(x));
    out[0] = rates.a.drift;
    out[1] = rates.e.drift;
    out[2] = rates.omega.drift;
    out[3] = rates.phi_drift;
  };
  sys.diffusion = [p, pert, state_of](double, std::span<const double> x,
                                      std::span<double> out) {
    const auto rates = gauss_rates(p, pert, state_of(x));
    out[0] = rates.a.diffusion[0];
    out[1] = rates.a.diffusion[1];
    out[2] = rates.e.diffusion[0];
    out[3] = rates.e.diffusion[1];
    out[4] = rates.omega.diffusion[0];
    out[5] = rates.omega.diffusion[1];
    out[6] = 0.0;
    out[7] = 0.0;
  };
  return sys;
}

SdeSystem perturbed_polar_system(const TwoBodyParams& p, PerturbationSpec pert) {
  SdeSystem sys;
  sys.dim = 4;
  sys.noise_dim = 2;
  sys.interpretation = Interpretation::Ito;
  sys.drift = [p, pert](double, std::span<const double> x, std::span<double> out) {
    const auto s = PolarState::from(x);
    if (!(s.r >= kCollisionRadius)) throw NumericDomainError("polar system: collision");
    const auto el = extract_elements(p, s);
    out[0] = s.v;
    out[1] = s.w;
    out[2] = s.r * s.w * s.w - p.mu() / (s.r * s.r) + pert.radial_accel(el);
    out[3] = -2.0 * s.v * s.w / s.r + pert.transverse_accel(el) / s.r;
  };
  sys.diffusion = [p, pert](double, std::span<const double> x, std::span<double> out) {
    const auto s = PolarState::from(x);
    if (!(s.r >= kCollisionRadius)) throw NumericDomainError("polar system: collision");
    const auto el = extract_elements(p, s);
    const auto R = pert.radial_noise(el);
    const auto T = pert.transverse_noise(el);
    out[0] = out[1] = out[2] = out[3] = 0.0;
    out[4] = R[0];
    out[5] = R[1];
    out[6] = T[0] / s.r;
    out[7] = T[1] / s.r;
  };
  return sys;
}

ElementInvariantDifferentials element_invariant_differentials(const TwoBodyParams& p,
                                                              const PerturbationSpec& pert,
                                                              const OrbitalState& el) {
  const double m = p.m(), mu = p.mu();
  const double semi_latus = el.a * (1.0 - el.e * el.e);
  if (!(semi_latus > 0.0)) throw UnboundOrbitError("element_invariant_differentials: not an ellipse");
  const double sf = std::sin(el.f), cf = std::cos(el.f);
  const double q = 1.0 + el.e * cf;
  const double r = semi_latus / q;
  const double speed = std::sqrt(mu / semi_latus);

  const double Rbar = pert.radial_accel(el);
  const double Tbar = pert.transverse_accel(el);
  const auto R = pert.radial_noise(el);
  const auto T = pert.transverse_noise(el);

  ElementInvariantDifferentials out;
  out.dM.drift = m * r * Tbar;
  out.dM.diffusion = {m * r * T[0], m * r * T[1]};
  out.dH.drift =
      m * (speed * (el.e * sf * Rbar + q * Tbar) + (dot(R, R) + dot(T, T)) / 2.0);
  out.dH.diffusion = combine(m * speed * el.e * sf, R, m * speed * q, T);
  return out;
}

ComparisonReport compare_formulations(const TwoBodyParams& p, const PolarState& s0,
                                      double T, double h, const NoiseGrid& grid) {
  const auto el0 = extract_elements(p, s0);
  if (el0.e < kGaussMinEccentricity) {
    throw PericenterSingularityError("compare_formulations: initial eccentricity too small");
  }
  const SchemeConfig em{Scheme::EulerMaruyama, Srk2Coefficients::numerical_search(), 1.0};
  const auto polar = two_body_system(p);
  const auto gauss = gauss_system(p, cloud_perturbation(p));

  ComparisonReport report;
  report.requested_nodes = step_count(0.0, T, h) + 1;

  auto run = [&](const SdeSystem& sys, std::span<const double> x0) {
    try {
      return integrate(sys, x0, 0.0, T, h, em, grid);
    } catch (const IntegrationError& err) {
      report.truncated = true;
      return err.partial();
    }
  };
  const auto x0_polar = s0.to_array();
  const std::array<double, 4> x0_gauss{el0.a, el0.e, el0.omega, s0.phi};
  const Trajectory direct = run(polar, x0_polar);
  const Trajectory viagauss = run(gauss, x0_gauss);

  const std::size_t nodes = std::min(direct.size(), viagauss.size());
  for (std::size_t j = 0; j < nodes; ++j) {
    const auto ps = PolarState::from(direct.state(j));
    OrbitalState el;
    try {
      el = extract_elements(p, ps);
    } catch (const NumericDomainError&) {
      report.truncated = true;
      break;
    }
    const auto g = viagauss.state(j);
    const double H = energy(p, ps);
    const double H_from_a = -p.k() / (2.0 * g[0]);
    report.t.push_back(direct.times[j]);
    report.a_direct.push_back(el.a);
    report.a_gauss.push_back(g[0]);
    report.e_direct.push_back(el.e);
    report.e_gauss.push_back(g[1]);
    report.omega_direct.push_back(el.omega);
    report.omega_gauss.push_back(wrap_angle(g[2]));
    report.H_direct.push_back(H);
    report.H_from_a.push_back(H_from_a);

    report.sup_rel_a = std::max(report.sup_rel_a, std::abs(el.a - g[0]) / std::abs(el.a));
    report.sup_rel_e = std::max(report.sup_rel_e, std::abs(el.e - g[1]) / std::abs(el.e));
    report.sup_abs_omega = std::max(report.sup_abs_omega, std::abs(wrap_angle(el.omega - g[2])));
    report.sup_rel_H = std::max(report.sup_rel_H, std::abs(H - H_from_a) / std::abs(H));
  }
  if (report.t.size() < report.requested_nodes) report.truncated = true;
  return report;
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& r) {
  csv::write_header(os, {"t", "a_direct", "a_gauss", "e_direct", "e_gauss", "omega_direct",
                         "omega_gauss", "H_direct", "H_from_a"});
  for (std::size_t j = 0; j < r.t.size(); ++j) {
    csv::write_row(os, {r.t[j], r.a_direct[j], r.a_gauss[j], r.e_direct[j], r.e_gauss[j],
                        r.omega_direct[j], r.omega_gauss[j], r.H_direct[j], r.H_from_a[j]});
  }
  if (r.truncated) {
    csv::write_comment(os, "TRUNCATED after " + std::to_string(r.t.size()) + " of " +
                               std::to_string(r.requested_nodes) + " nodes");
  }
}

}  // namespace stokep
