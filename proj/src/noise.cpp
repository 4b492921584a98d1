#include "stokep/noise.hpp"

#include <cmath>
#include <numbers>

#include "stokep/errors.hpp"

namespace stokep {

namespace {

std::seed_seq make_seed_seq(SeedSpec spec) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  // The trailing tag keeps these streams apart from any plain seed_seq{a, b}.
  return std::seed_seq{lo(spec.master_seed), hi(spec.master_seed),
                       lo(spec.realization_index), hi(spec.realization_index),
                       0x5702e9u};
}

}  // namespace

RandomStream::RandomStream(SeedSpec spec) {
  auto seq = make_seed_seq(spec);
  engine_.seed(seq);
}

double RandomStream::uniform() {
  constexpr double kScale = 0x1.0p-53;
  return static_cast<double>((engine_() >> 11) + 1) * kScale;
}

double RandomStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

RandomStream derive_stream(SeedSpec spec) { return RandomStream(spec); }

NoiseGrid::NoiseGrid(std::size_t n_steps, std::size_t n_channels,
                     std::size_t samples_per_step, std::vector<double> values)
    : n_steps_(n_steps),
      n_channels_(n_channels),
      samples_per_step_(samples_per_step),
      values_(std::move(values)) {
  if (n_steps == 0 || n_channels == 0 || samples_per_step == 0) {
    throw InvalidArgument("NoiseGrid: shape counts must be positive");
  }
  if (values_.size() != n_steps * n_channels * samples_per_step) {
    throw InvalidArgument("NoiseGrid: value count does not match shape");
  }
}

NoiseGrid generate_grid(RandomStream& stream, std::size_t n_steps,
                        std::size_t n_channels, std::size_t samples_per_step) {
  if (n_steps == 0 || n_channels == 0 || samples_per_step == 0) {
    throw InvalidArgument("generate_grid: all counts must be >= 1");
  }
  std::vector<double> values(n_steps * n_channels * samples_per_step);
  for (double& v : values) v = stream.normal();
  return NoiseGrid(n_steps, n_channels, samples_per_step, std::move(values));
}

}  // namespace stokep
