#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "stokep/elements.hpp"
#include "stokep/errors.hpp"
#include "stokep/integrators.hpp"
#include "stokep/models.hpp"
#include "stokep/noise.hpp"

using namespace stokep;

namespace {

std::vector<OrbitalState> random_elements(std::uint64_t seed, std::size_t n) {
  RandomStream rng(SeedSpec{seed, 0});
  std::vector<OrbitalState> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({0.5 + 1.5 * rng.uniform(), 0.05 + 0.85 * rng.uniform(),
                   wrap_angle(2 * std::numbers::pi * rng.uniform()),
                   wrap_angle(2 * std::numbers::pi * rng.uniform())});
  }
  return out;
}

PerturbationSpec zero_perturbation() {
  return {[](const OrbitalState&) { return 0.0; }, [](const OrbitalState&) { return 0.0; },
          [](const OrbitalState&) { return std::array<double, 2>{}; },
          [](const OrbitalState&) { return std::array<double, 2>{}; }};
}

}  // namespace

TEST(Elements, ReferenceStateHandValues) {
  const auto p = TwoBodyParams::canonical();
  const auto el = extract_elements(p, canonical_initial_state());
  EXPECT_NEAR(energy(p, canonical_initial_state()), -0.39495, 1e-12);
  EXPECT_NEAR(el.a, 1.26598, 5e-6);
  EXPECT_NEAR(el.e, 0.21029, 5e-6);
}

TEST(Elements, CircularOrbitHasNoPericenter) {
  const auto p = TwoBodyParams::canonical();
  EXPECT_THROW(extract_elements(p, {1.0, 0.3, 0.0, 1.0}), PericenterSingularityError);
}

TEST(Elements, UnboundAndRetrogradeRejected) {
  const auto p = TwoBodyParams::canonical();
  EXPECT_THROW(extract_elements(p, {1.0, 0.0, 0.0, 2.0}), UnboundOrbitError);
  EXPECT_THROW(extract_elements(p, {1.0, 0.0, 0.0, -0.9}), NumericDomainError);
}

TEST(Elements, RoundTrip) {
  const TwoBodyParams p(1.0, 2.0, 0.0, 0.0);
  for (const auto& el : random_elements(31, 200)) {
    const auto s = reconstruct_polar(p, el);
    const auto back = extract_elements(p, s);
    EXPECT_NEAR(back.a, el.a, 1e-10 * el.a);
    EXPECT_NEAR(back.e, el.e, 1e-10);
    EXPECT_NEAR(wrap_angle(back.omega - el.omega), 0.0, 1e-9);
    EXPECT_NEAR(wrap_angle(back.f - el.f), 0.0, 1e-9);
    const auto again = reconstruct_polar(p, back);
    EXPECT_NEAR(again.v, s.v, 1e-10);
    EXPECT_NEAR(again.w, s.w, 1e-10 * s.w);
    EXPECT_NEAR(again.r, s.r, 1e-10 * s.r);
  }
}

TEST(Elements, RungeLenzMagnitude) {
  const TwoBodyParams p(1.7, 0.9, 0.0, 0.0);
  for (const auto& el : random_elements(32, 50)) {
    const auto A = runge_lenz(p, reconstruct_polar(p, el));
    EXPECT_NEAR(std::hypot(A[0], A[1]), el.e * p.m() * p.k(), 1e-10);
  }
}

TEST(Gauss, ZeroPerturbationIsKeplerian) {
  const auto p = TwoBodyParams::canonical();
  const auto sys = gauss_system(p, zero_perturbation());
  for (const auto& el : random_elements(33, 20)) {
    const auto s = reconstruct_polar(p, el);
    const std::array<double, 4> g{el.a, el.e, el.omega, s.phi};
    const auto mu = sys.eval_drift(0.0, g);
    EXPECT_EQ(mu[0], 0.0);
    EXPECT_EQ(mu[1], 0.0);
    EXPECT_EQ(mu[2], 0.0);
    EXPECT_NEAR(mu[3], s.w, 1e-12 * s.w);
    for (double v : sys.eval_diffusion(0.0, g).data) EXPECT_EQ(v, 0.0);
  }
}

TEST(Gauss, CloudForceMapping) {
  const auto p = TwoBodyParams::canonical();
  const auto pert = cloud_perturbation(p);
  for (const auto& el : random_elements(34, 20)) {
    const double r = el.a * (1 - el.e * el.e) / (1 + el.e * std::cos(el.f));
    const auto R = pert.radial_noise(el);
    const auto T = pert.transverse_noise(el);
    EXPECT_NEAR(R[0], r * 0.0121, 1e-15);
    EXPECT_EQ(R[1], 0.0);
    EXPECT_EQ(T[0], 0.0);
    EXPECT_EQ(T[1], 2.2e-4);
    EXPECT_EQ(pert.radial_accel(el), 0.0);
    EXPECT_EQ(pert.transverse_accel(el), 0.0);
    const auto rates = gauss_rates(p, pert, el);
    const double lead = 2 * std::pow(el.a, 1.5) / std::sqrt(p.mu() * (1 - el.e * el.e));
    EXPECT_NEAR(rates.a.diffusion[0], lead * el.e * std::sin(el.f) * r * 0.0121, 1e-14);
    EXPECT_NEAR(rates.a.diffusion[1], lead * (1 + el.e * std::cos(el.f)) * 2.2e-4, 1e-14);
  }
  const OrbitalState at_unit{1.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(pert.radial_noise(at_unit)[0], 0.0121);
  const auto quiet = cloud_perturbation(p.with_noise(0.0, 0.0));
  EXPECT_EQ(quiet.radial_noise(at_unit)[0], 0.0);
  EXPECT_EQ(quiet.transverse_noise(at_unit)[1], 0.0);
}

TEST(Gauss, SingularEccentricityRejected) {
  const auto p = TwoBodyParams::canonical();
  EXPECT_THROW(gauss_rates(p, cloud_perturbation(p), {1.0, 1e-9, 0.0, 0.0}), PericenterSingularityError);
  EXPECT_THROW(gauss_rates(p, cloud_perturbation(p), {-1.0, 0.5, 0.0, 0.0}), UnboundOrbitError);
}

TEST(Gauss, MatchesItoOracle) {
  const auto p = TwoBodyParams::canonical().with_noise(0.08, 0.04);
  const auto pert = cloud_perturbation(p);
  const auto polar = perturbed_polar_system(p, pert);
  for (const auto& el : random_elements(35, 50)) {
    const auto s = reconstruct_polar(p, el);
    const auto rates = gauss_rates(p, pert, el);
    const std::array<const ElementRate*, 3> got{&rates.a, &rates.e, &rates.omega};
    for (int i = 0; i < 3; ++i) {
      const auto o = ito_differential(
          polar,
          [&](std::span<const double> y) {
            const auto e = extract_elements(p, PolarState::from(y));
            return i == 0 ? e.a : i == 1 ? e.e : el.omega + wrap_angle(e.omega - el.omega);
          },
          0.0, s.to_array());
      const double scale = std::max({std::abs(o.drift), std::abs(o.diffusion[0]), std::abs(o.diffusion[1])});
      EXPECT_NEAR(got[i]->drift, o.drift, 1e-5 * scale) << "element " << i;
      EXPECT_NEAR(got[i]->diffusion[0], o.diffusion[0], 1e-5 * scale);
      EXPECT_NEAR(got[i]->diffusion[1], o.diffusion[1], 1e-5 * scale);
    }
  }
}

TEST(Gauss, ElementInvariantsMatchPolarForms) {
  const auto p = TwoBodyParams::canonical().with_noise(0.05, 0.02);
  const auto pert = cloud_perturbation(p);
  for (const auto& el : random_elements(36, 50)) {
    const auto s = reconstruct_polar(p, el);
    const auto viael = element_invariant_differentials(p, pert, el);
    const auto direct = invariant_differentials(p, s);
    EXPECT_NEAR(viael.dM.drift, direct.dM.drift, 1e-10);
    EXPECT_NEAR(viael.dH.drift, direct.dH.drift, 1e-10);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(viael.dM.diffusion[j], direct.dM.diffusion[j], 1e-10);
      EXPECT_NEAR(viael.dH.diffusion[j], direct.dH.diffusion[j], 1e-10);
    }
  }
}

TEST(Compare, NoiselessDiscrepancyShrinksWithStep) {
  const auto p = TwoBodyParams::canonical().with_noise(0.0, 0.0);
  const auto s0 = canonical_initial_state();
  auto run = [&](double h) {
    const std::size_t n = step_count(0.0, 5.0, h);
    return compare_formulations(p, s0, 5.0, h, NoiseGrid(n, 2, 1, std::vector<double>(2 * n, 0.0)));
  };
  const auto coarse = run(0.01);
  const auto fine = run(0.005);
  EXPECT_FALSE(coarse.truncated);
  EXPECT_GT(coarse.sup_rel_a / fine.sup_rel_a, 1.7);
  EXPECT_GT(coarse.sup_rel_e / fine.sup_rel_e, 1.7);
}

TEST(Compare, SeedsGiveDifferentPathsButSmallDiscrepancy) {
  const auto p = TwoBodyParams::canonical();
  const auto s0 = canonical_initial_state();
  const auto a = compare_formulations(p, s0, 15.0, 1e-3, generate_grid(SeedSpec{1, 0}, 15000, 2, 1));
  const auto b = compare_formulations(p, s0, 15.0, 1e-3, generate_grid(SeedSpec{2, 0}, 15000, 2, 1));
  EXPECT_NE(a.a_direct.back(), b.a_direct.back());
  for (const auto* r : {&a, &b}) {
    EXPECT_LT(r->sup_rel_a, 1e-2);
    EXPECT_LT(r->sup_rel_e, 1e-2);
    EXPECT_EQ(r->t.size(), 15001u);
  }
}

TEST(Compare, CircularStartIsSingular) {
  const auto p = TwoBodyParams::canonical();
  EXPECT_THROW(compare_formulations(p, {1.0, 0.0, 0.0, 1.0}, 1.0, 0.1,
                                    generate_grid(SeedSpec{1, 0}, 10, 2, 1)),
               PericenterSingularityError);
}
