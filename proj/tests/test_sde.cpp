#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "stokep/elements.hpp"
#include "stokep/errors.hpp"
#include "stokep/models.hpp"
#include "stokep/noise.hpp"
#include "stokep/sde.hpp"

using namespace stokep;

namespace {

SdeSystem scalar_strat(std::function<double(double)> sigma) {
  SdeSystem sys;
  sys.dim = 1;
  sys.noise_dim = 1;
  sys.interpretation = Interpretation::Stratonovich;
  sys.drift = [](double, std::span<const double> x, std::span<double> out) { out[0] = -x[0]; };
  sys.diffusion = [sigma](double, std::span<const double> x, std::span<double> out) {
    out[0] = sigma(x[0]);
  };
  return sys;
}

std::vector<PolarState> random_states(std::uint64_t seed, std::size_t n) {
  const auto p = TwoBodyParams::canonical();
  RandomStream rng(SeedSpec{seed, 0});
  std::vector<PolarState> out;
  for (std::size_t i = 0; i < n; ++i) {
    OrbitalState el{0.5 + 1.5 * rng.uniform(), 0.05 + 0.85 * rng.uniform(),
                    wrap_angle(2 * std::numbers::pi * rng.uniform()),
                    wrap_angle(2 * std::numbers::pi * rng.uniform())};
    out.push_back(reconstruct_polar(p, el));
  }
  return out;
}

}  // namespace

TEST(WongZakai, LinearDiffusionGivesHalfX) {
  const auto sys = scalar_strat([](double x) { return x; });
  for (double x : {1.0, 2.0, 5.0}) {
    const std::array<double, 1> s{x};
    EXPECT_NEAR(wong_zakai_correction(sys, 0.0, s)[0], x / 2.0, 1e-8);
  }
  const auto ito = stratonovich_to_ito(sys);
  EXPECT_EQ(ito.interpretation, Interpretation::Ito);
  const std::array<double, 1> s{2.0};
  EXPECT_NEAR(ito.eval_drift(0.0, s)[0], -2.0 + 1.0, 1e-8);
}

TEST(WongZakai, ConstantDiffusionLeavesDriftUnchanged) {
  const auto sys = scalar_strat([](double) { return 0.3; });
  const auto ito = stratonovich_to_ito(sys);
  for (double x : {-3.0, 0.0, 0.7, 10.0}) {
    const std::array<double, 1> s{x};
    EXPECT_EQ(ito.eval_drift(0.0, s)[0], sys.eval_drift(0.0, s)[0]);
  }
}

TEST(WongZakai, VanishesForCanonicalTwoBody) {
  const auto p = TwoBodyParams::canonical();
  const auto sys = two_body_canonical_system(p);
  for (const auto& s : random_states(11, 100)) {
    const auto x = polar_to_canonical(p, s);
    for (double c : wong_zakai_correction(sys, 0.0, x, 1e-5)) EXPECT_LT(std::abs(c), 1e-8);
  }
}

TEST(WongZakai, RejectsItoInput) {
  EXPECT_THROW(stratonovich_to_ito(two_body_system(TwoBodyParams::canonical())), InvalidArgument);
}

TEST(ItoDifferential, LinearFormIsExact) {
  const auto p = TwoBodyParams::canonical().with_noise(0.3, 0.2);
  const auto sys = two_body_system(p);
  const std::array<double, 4> a{0.5, -1.0, 2.0, 3.0};
  const auto x = canonical_initial_state().to_array();
  const auto d = ito_differential(
      sys, [&](std::span<const double> y) { return a[0] * y[0] + a[1] * y[1] + a[2] * y[2] + a[3] * y[3]; },
      0.0, x);
  const auto mu = sys.eval_drift(0.0, x);
  const auto sig = sys.eval_diffusion(0.0, x);
  double expect = 0.0;
  for (int i = 0; i < 4; ++i) expect += a[i] * mu[i];
  // The Hessian of a linear form is zero; what remains is second-difference roundoff.
  EXPECT_NEAR(d.drift, expect, 1e-8);
  for (std::size_t j = 0; j < 2; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < 4; ++i) col += a[i] * sig(i, j);
    EXPECT_NEAR(d.diffusion[j], col, 1e-10);
  }
}

TEST(ItoDifferential, AngularMomentumAndEnergy) {
  const auto p = TwoBodyParams::canonical();
  const auto sys = two_body_system(p);
  for (const auto& s : random_states(12, 20)) {
    const auto x = s.to_array();
    const auto dM = ito_differential(
        sys, [&](std::span<const double> y) { return angular_momentum(p, PolarState::from(y)); },
        0.0, x);
    EXPECT_NEAR(dM.drift, 0.0, 1e-8);
    EXPECT_NEAR(dM.diffusion[0], 0.0, 1e-12);
    EXPECT_NEAR(dM.diffusion[1], p.m() * s.r * p.sigma_phi(), 1e-10);

    const auto dH = ito_differential(
        sys, [&](std::span<const double> y) { return energy(p, PolarState::from(y)); }, 0.0, x);
    const double want = 0.5 * p.m() *
                        (p.sigma_r() * p.sigma_r() * s.r * s.r + p.sigma_phi() * p.sigma_phi());
    // Normwise: the drift is ~1e-5 of the diffusion at these intensities.
    const double scale = std::max({want, std::abs(dH.diffusion[0]), std::abs(dH.diffusion[1])});
    EXPECT_NEAR(dH.drift, want, 1e-5 * scale);
    EXPECT_NEAR(dH.diffusion[0], p.m() * s.r * s.v * p.sigma_r(), 1e-10);
    EXPECT_NEAR(dH.diffusion[1], p.m() * s.r * s.w * p.sigma_phi(), 1e-10);
  }
}

TEST(ItoDifferential, ErrorShrinksWithStep) {
  // Plain central differences would shrink 4x per halving; the extrapolated
  // oracle should manage 64x. Small steps are swamped by roundoff, so the
  // reference uses a moderate step too.
  const auto p = TwoBodyParams::canonical().with_noise(0.2, 0.1);
  const auto sys = two_body_system(p);
  const auto s = canonical_initial_state();
  const auto x = s.to_array();
  auto g = [&](std::span<const double> y) { return std::exp(y[2]) * std::sin(y[0] * y[3]); };
  const auto fine = ito_differential(sys, g, 0.0, x, 0.025);
  const auto e1 = std::abs(ito_differential(sys, g, 0.0, x, 0.4).drift - fine.drift);
  const auto e2 = std::abs(ito_differential(sys, g, 0.0, x, 0.2).drift - fine.drift);
  EXPECT_GT(e1 / e2, 16.0);
}

TEST(ItoDifferential, NonFiniteProbeNamesCoordinate) {
  const auto sys = two_body_system(TwoBodyParams::canonical());
  const std::array<double, 4> x{1e-9, 0.0, 0.0, 1.0};
  try {
    ito_differential(sys, [](std::span<const double> y) { return 1.0 / std::sqrt(y[0]); }, 0.0,
                     x, 1e-5);
    FAIL() << "expected NumericDomainError";
  } catch (const NumericDomainError& e) {
    EXPECT_NE(std::string(e.what()).find("coordinate 0"), std::string::npos);
  }
}

TEST(Structure, TwoBodyIsHamiltonianIffNoTangentialNoise) {
  const auto base = TwoBodyParams::canonical();
  std::vector<StructureSample> pts;
  for (const auto& s : random_states(13, 100)) {
    const auto c = polar_to_canonical(base, s);
    pts.push_back({0.0, {c.begin(), c.end()}});
  }
  const auto noisy = check_hamiltonian_structure(two_body_canonical_system(base), canonical_split(), pts);
  EXPECT_FALSE(noisy.is_hamiltonian);
  EXPECT_GE(noisy.max_residual, base.m() * base.sigma_phi() - noisy.tolerance);
  EXPECT_NEAR(noisy.max_residual, base.m() * base.sigma_phi(), 0.01 * base.m() * base.sigma_phi());
  EXPECT_EQ(noisy.worst_condition, StructureCondition::MomentumNoiseSymmetry);
  EXPECT_EQ(noisy.sample_points, 100u);

  const auto quiet = check_hamiltonian_structure(
      two_body_canonical_system(base.with_noise(0.0121, 0.0)), canonical_split(), pts);
  EXPECT_TRUE(quiet.is_hamiltonian);
  const auto silent = check_hamiltonian_structure(
      two_body_canonical_system(base.with_noise(0.0, 0.0)), canonical_split(), pts);
  EXPECT_TRUE(silent.is_hamiltonian);
  EXPECT_EQ(silent.max_residual, 0.0);
}

TEST(Structure, ResidualScalesWithMassTimesSigmaPhi) {
  const TwoBodyParams p(2.0, 3.0, 0.01, 1e-3);
  std::vector<StructureSample> pts;
  for (const auto& s : random_states(14, 10)) {
    const auto c = polar_to_canonical(p, s);
    pts.push_back({0.0, {c.begin(), c.end()}});
  }
  const auto r = check_hamiltonian_structure(two_body_canonical_system(p), canonical_split(), pts);
  EXPECT_NEAR(r.max_residual, p.m() * p.sigma_phi(), 1e-3 * p.m() * p.sigma_phi());
}

TEST(Structure, VerdictMatchesTolerance) {
  const auto p = TwoBodyParams::canonical();
  const auto c = polar_to_canonical(p, canonical_initial_state());
  const std::vector<StructureSample> pts{{0.0, {c.begin(), c.end()}}};
  const auto loose = check_hamiltonian_structure(two_body_canonical_system(p), canonical_split(), pts, 1e-3);
  EXPECT_TRUE(loose.is_hamiltonian);
  EXPECT_LE(loose.max_residual, loose.tolerance);
}

TEST(Structure, RejectsBadInput) {
  const auto p = TwoBodyParams::canonical();
  const auto c = polar_to_canonical(p, canonical_initial_state());
  const std::vector<StructureSample> pts{{0.0, {c.begin(), c.end()}}};
  EXPECT_THROW(check_hamiltonian_structure(two_body_system(p), canonical_split(), pts), InvalidArgument);
  EXPECT_THROW(check_hamiltonian_structure(two_body_canonical_system(p), {{2, 3}, {0, 2}}, pts),
               InvalidArgument);
  EXPECT_THROW(check_hamiltonian_structure(two_body_canonical_system(p), canonical_split(), {}),
               InvalidArgument);
}
