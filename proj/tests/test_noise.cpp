#include <gtest/gtest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "stokep/errors.hpp"
#include "stokep/noise.hpp"

using namespace stokep;

namespace {

std::vector<double> draws(SeedSpec spec, std::size_t count) {
  auto s = derive_stream(spec);
  std::vector<double> out(count);
  for (auto& v : out) v = s.normal();
  return out;
}

}  // namespace

TEST(Noise, SameSeedGivesIdenticalStream) {
  EXPECT_EQ(draws({42, 0}, 1000), draws({42, 0}, 1000));
}

TEST(Noise, DifferentRealizationsDiffer) {
  const auto a = draws({42, 0}, 1000);
  const auto b = draws({42, 1}, 1000);
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.size(); ++i) equal += a[i] == b[i];
  EXPECT_EQ(equal, 0u);
}

TEST(Noise, DifferentMasterSeedsDiffer) {
  EXPECT_NE(draws({1, 5}, 10), draws({2, 5}, 10));
  // Halves must not be interchangeable.
  EXPECT_NE(draws({5, 1}, 10), draws({1, 5}, 10));
}

TEST(Noise, GridIsIndependentOfGeneratingThread) {
  const auto here = generate_grid(SeedSpec{42, 7}, 100, 2, 2);
  std::vector<NoiseGrid> there(8);
  std::vector<std::thread> threads;
  for (auto& g : there) {
    threads.emplace_back([&g] { g = generate_grid(SeedSpec{42, 7}, 100, 2, 2); });
  }
  for (auto& t : threads) t.join();
  for (const auto& g : there) {
    ASSERT_EQ(g.values().size(), here.values().size());
    EXPECT_TRUE(std::equal(g.values().begin(), g.values().end(), here.values().begin()));
  }
}

TEST(Noise, GridShape) {
  const auto g = generate_grid(SeedSpec{1, 0}, 1500, 2, 2);
  EXPECT_EQ(g.values().size(), 6000u);
  EXPECT_EQ(g.n_steps(), 1500u);
  EXPECT_EQ(g.n_channels(), 2u);
  EXPECT_EQ(g.samples_per_step(), 2u);
  EXPECT_EQ(g.step(3).size(), 4u);
  EXPECT_EQ(g.step(3)[1 * 2 + 1], g.at(3, 1, 1));
}

TEST(Noise, GridRejectsZeroCounts) {
  RandomStream s(SeedSpec{1, 0});
  EXPECT_THROW(generate_grid(s, 0, 2, 2), InvalidArgument);
  EXPECT_THROW(generate_grid(s, 2, 0, 2), InvalidArgument);
  EXPECT_THROW(generate_grid(s, 2, 2, 0), InvalidArgument);
  EXPECT_THROW(NoiseGrid(2, 2, 2, std::vector<double>(7)), InvalidArgument);
}

TEST(Noise, MomentsOfAMillionDraws) {
  const std::size_t n = 1'000'000;
  const auto g = generate_grid(SeedSpec{2024, 0}, n / 2, 2, 1);
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n / 2; ++i) {
      const double v = g.at(i, c, 0);
      sum += v;
      sq += v * v;
    }
    const double m = n / 2.0;
    const double mean = sum / m;
    const double var = sq / m - mean * mean;
    // 5 standard errors: sqrt(1/m) for the mean, sqrt(2/m) for the variance.
    EXPECT_LT(std::abs(mean), 5.0 * std::sqrt(1.0 / m));
    EXPECT_LT(std::abs(var - 1.0), 5.0 * std::sqrt(2.0 / m));
  }
  double sum = 0.0, sq = 0.0;
  for (double v : g.values()) {
    sum += v;
    sq += v * v;
  }
  EXPECT_LT(std::abs(sum / n), 4e-3);
  const double var = sq / n - (sum / n) * (sum / n);
  EXPECT_GE(var, 0.99);
  EXPECT_LE(var, 1.01);
}

TEST(Noise, ChannelsAreUncorrelated) {
  const std::size_t n = 100'000;
  const auto g = generate_grid(SeedSpec{99, 3}, n, 2, 2);
  // Every pair of (channel, sample) slots.
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      double sab = 0.0, sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = g.step(i)[a], y = g.step(i)[b];
        sab += x * y;
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
      }
      const double cov = sab / n - (sa / n) * (sb / n);
      const double corr = cov / std::sqrt((saa / n - sa * sa / (n * n)) * (sbb / n - sb * sb / (n * n)));
      EXPECT_LT(std::abs(corr), 0.02) << "slots " << a << "," << b;
    }
  }
}

TEST(Noise, UniformIsInHalfOpenUnitInterval) {
  RandomStream s(SeedSpec{3, 3});
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}
