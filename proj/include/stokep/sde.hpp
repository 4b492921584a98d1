#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace stokep {

enum class Interpretation { Ito, Stratonovich };

/// Dense row-major matrix; only used for small diffusion blocks.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Writes mu(t, x) into `out` (size dim).
using DriftFn =
    std::function<void(double t, std::span<const double> x, std::span<double> out)>;
/// Writes sigma(t, x) into `out`, row-major dim x noise_dim.
using DiffusionFn =
    std::function<void(double t, std::span<const double> x, std::span<double> out)>;
/// Writes E(X_t) given X_{t0} = x0 at t0 = 0.
using MeanFn =
    std::function<void(double t, std::span<const double> x0, std::span<double> out)>;

/**
 * dX = mu(t, X) dt + sigma(t, X) dB with B an m-dimensional Brownian motion.
 *
 * Drift and diffusion must be pure: integrators evaluate them at stage
 * points and finite-difference operators probe them around a state.
 */
struct SdeSystem {
  std::size_t dim = 0;
  std::size_t noise_dim = 0;
  DriftFn drift;
  DiffusionFn diffusion;
  Interpretation interpretation = Interpretation::Ito;
  /// Drift and diffusion are affine in x (enables exact scheme-mean propagation).
  bool affine = false;
  /// Closed-form expectation, when the model has one.
  MeanFn exact_mean;

  std::vector<double> eval_drift(double t, std::span<const double> x) const;
  Matrix eval_diffusion(double t, std::span<const double> x) const;
};

inline constexpr double kDefaultFdStep = 1e-6;
/// Second derivatives lose accuracy as eps/h^2, so the Ito oracle uses a
/// larger default step than first-derivative operators. With two rounds of
/// Richardson extrapolation, 1e-4 keeps both truncation and roundoff near
/// 1e-6 relative for the orbital element maps up to e = 0.9.
inline constexpr double kDefaultHessianStep = 1e-4;
inline constexpr double kDefaultStructureTol = 1e-8;

/// 0.5 * sum_j sum_k d(sigma_ij)/d(x_k) * sigma_kj, by central differences.
std::vector<double> wong_zakai_correction(const SdeSystem& sys, double t,
                                          std::span<const double> x,
                                          double fd_step = kDefaultFdStep);

/// Ito system with the same solutions as the given Stratonovich system.
SdeSystem stratonovich_to_ito(const SdeSystem& sys, double fd_step = kDefaultFdStep);

using ScalarFn = std::function<double(std::span<const double> x)>;

/// dt- and dB-coefficients of g(X_t) from the multi-dimensional Ito formula.
struct ItoDifferential {
  double drift = 0.0;
  std::vector<double> diffusion;
};

ItoDifferential ito_differential(const SdeSystem& sys, const ScalarFn& g, double t,
                                 std::span<const double> x,
                                 double fd_step = kDefaultHessianStep);

/// Partition of state indices into conjugate momenta P and coordinates Q;
/// p_indices[i] is conjugate to q_indices[i].
struct HamiltonianSplit {
  std::vector<std::size_t> p_indices;
  std::vector<std::size_t> q_indices;
};

enum class StructureCondition {
  /// d(sigma_ir)/d(p^a) + d(gamma_ar)/d(q^i) = 0
  MixedDerivatives,
  /// d(sigma_ir)/d(q^a) = d(sigma_ar)/d(q^i), a != i
  MomentumNoiseSymmetry,
  /// d(gamma_ir)/d(p^a) = d(gamma_ar)/d(p^i), a != i
  CoordinateNoiseSymmetry,
};

std::string_view to_string(StructureCondition c);

struct StructureSample {
  double t = 0.0;
  std::vector<double> x;
};

struct StructureReport {
  bool is_hamiltonian = true;
  double max_residual = 0.0;
  StructureCondition worst_condition = StructureCondition::MixedDerivatives;
  std::size_t sample_points = 0;
  double tolerance = kDefaultStructureTol;
};

/**
 * Checks the Milstein conditions for a stochastic Hamiltonian formulation of
 * a Stratonovich system written as dP = f dt + sigma o dB, dQ = g dt + gamma o dB.
 * Only the diffusion coefficients are constrained; the deterministic part is
 * assumed Hamiltonian.
 */
StructureReport check_hamiltonian_structure(const SdeSystem& sys,
                                            const HamiltonianSplit& split,
                                            std::span<const StructureSample> points,
                                            double tol = kDefaultStructureTol,
                                            double fd_step = kDefaultFdStep);

}  // namespace stokep
