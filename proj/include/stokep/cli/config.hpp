#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stokep/errors.hpp"
#include "stokep/integrators.hpp"
#include "stokep/models.hpp"
#include "stokep/montecarlo.hpp"

namespace stokep::cli {

/// Config problem; `line` is 0 for command-line overrides.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& what, std::size_t line, std::string field)
      : InvalidArgument(what), line_(line), field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

enum class ModelKind { TwoBody, Langevin };

/**
 * Every knob of a run. Defaults reproduce the reference two-body study:
 * canonical units, r = 1, phi = 1, v = 0.01, w = 1.1, sigma_r = 0.0121,
 * sigma_phi = 2.2e-4, T = 15, h = 0.01, SRK2 with searched coefficients.
 */
struct RunConfig {
  ModelKind model = ModelKind::TwoBody;

  // [two_body]
  double m = 1.0;
  double k = 1.0;
  double sigma_r = kCanonicalSigmaR;
  double sigma_phi = kCanonicalSigmaPhi;
  double r0 = 1.0;
  double phi0 = 1.0;
  double v0 = 0.01;
  double w0 = 1.1;

  // [langevin]
  double mu_ou = 1.0;
  double sigma = 0.001;
  double x0 = 1.0;

  // [run]
  double T = kCanonicalFinalTime;
  double h = 0.01;
  Scheme scheme = Scheme::Srk2;
  CoefficientSet coeffs = CoefficientSet::NumericalSearch;
  double brownian_variance = 1.0;
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string output = "-";

  // [ensemble] / [converge] / [structure]
  std::vector<std::string> observables{"M", "H"};
  std::vector<double> steps{0x1.0p-3, 0x1.0p-4, 0x1.0p-5, 0x1.0p-6, 0x1.0p-7};
  /// Unset: exact scheme expectation for Langevin, reference solution otherwise.
  std::optional<WeakReference> reference;
  double h_ref = kReferenceStep;
  std::size_t structure_points = 100;
  double structure_tol = kDefaultStructureTol;

  TwoBodyParams two_body_params() const;
  PolarState initial_polar() const;
  LangevinParams langevin_params() const;
  SchemeConfig scheme_config() const;
};

/// Every accepted key, in canonical order.
std::vector<std::string_view> config_keys();

/// Sets one key from text; throws ConfigError for unknown keys or bad values.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value,
               std::size_t line = 0);

/// Flat key = value text with [section] headers; `#` starts a comment.
/// Unknown sections and keys are rejected with their line number.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Range checks across fields; throws ConfigError.
void validate(const RunConfig& cfg);

/// Writes the config back in the file format.
void write_config(std::ostream& os, const RunConfig& cfg);

/// Accepts decimal or `2^-k` tokens separated by commas.
std::vector<double> parse_real_list(std::string_view text);

}  // namespace stokep::cli
