#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace stokep {

/// Identifies the random stream of one Monte Carlo realization.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
};

/**
 * Deterministic stream of standard-normal draws.
 *
 * The engine is a 64-bit Mersenne twister whose state is produced by
 * std::seed_seq from the four 32-bit halves of (master_seed,
 * realization_index). Realization k is therefore reachable directly,
 * without generating realizations 0..k-1, and the mapping is fully
 * specified by the standard library.
 *
 * Normals use the Box-Muller transform on 53-bit uniforms in (0, 1];
 * both outputs of each transform are used, cosine branch first.
 * The stream is not safe for concurrent consumers.
 */
class RandomStream {
 public:
  explicit RandomStream(SeedSpec spec);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in (0, 1].
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

RandomStream derive_stream(SeedSpec spec);

/**
 * Raw standard-normal samples for one realization, laid out step-major,
 * channel-minor, sample-innermost. Variance scaling happens in the
 * integrator so a single grid can drive any scheme.
 */
class NoiseGrid {
 public:
  NoiseGrid() = default;
  NoiseGrid(std::size_t n_steps, std::size_t n_channels,
            std::size_t samples_per_step, std::vector<double> values);

  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_channels() const { return n_channels_; }
  std::size_t samples_per_step() const { return samples_per_step_; }
  bool empty() const { return values_.empty(); }

  double at(std::size_t step, std::size_t channel, std::size_t sample) const {
    return values_[(step * n_channels_ + channel) * samples_per_step_ + sample];
  }
  /// All samples of one step: [channel][sample].
  std::span<const double> step(std::size_t step) const {
    const std::size_t stride = n_channels_ * samples_per_step_;
    return {values_.data() + step * stride, stride};
  }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t n_steps_ = 0;
  std::size_t n_channels_ = 0;
  std::size_t samples_per_step_ = 0;
  std::vector<double> values_;
};

NoiseGrid generate_grid(RandomStream& stream, std::size_t n_steps,
                        std::size_t n_channels, std::size_t samples_per_step);

inline NoiseGrid generate_grid(SeedSpec spec, std::size_t n_steps,
                               std::size_t n_channels,
                               std::size_t samples_per_step) {
  RandomStream stream(spec);
  return generate_grid(stream, n_steps, n_channels, samples_per_step);
}

}  // namespace stokep
