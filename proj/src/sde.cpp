#include "stokep/sde.hpp"

#include <cmath>
#include <string>

#include "stokep/errors.hpp"

namespace stokep {

std::vector<double> SdeSystem::eval_drift(double t, std::span<const double> x) const {
  std::vector<double> out(dim, 0.0);
  drift(t, x, out);
  return out;
}

Matrix SdeSystem::eval_diffusion(double t, std::span<const double> x) const {
  Matrix out(dim, noise_dim);
  diffusion(t, x, out.data);
  return out;
}

namespace {

void require_step(double fd_step, const char* who) {
  if (!(fd_step > 0.0) || !std::isfinite(fd_step)) {
    throw InvalidArgument(std::string(who) + ": fd_step must be positive");
  }
}

void require_shape(const SdeSystem& sys, std::span<const double> x, const char* who) {
  if (x.size() != sys.dim) {
    throw InvalidArgument(std::string(who) + ": state size " + std::to_string(x.size()) +
                          " does not match system dimension " + std::to_string(sys.dim));
  }
}

// d(sigma)/d(x_k) for every k, each a dim x noise_dim matrix.
std::vector<Matrix> diffusion_jacobian(const SdeSystem& sys, double t,
                                       std::span<const double> x, double fd_step) {
  std::vector<Matrix> jac;
  jac.reserve(sys.dim);
  std::vector<double> probe(x.begin(), x.end());
  Matrix plus(sys.dim, sys.noise_dim);
  Matrix minus(sys.dim, sys.noise_dim);
  for (std::size_t k = 0; k < sys.dim; ++k) {
    probe[k] = x[k] + fd_step;
    sys.diffusion(t, probe, plus.data);
    probe[k] = x[k] - fd_step;
    sys.diffusion(t, probe, minus.data);
    probe[k] = x[k];
    Matrix d(sys.dim, sys.noise_dim);
    for (std::size_t i = 0; i < d.data.size(); ++i) {
      d.data[i] = (plus.data[i] - minus.data[i]) / (2.0 * fd_step);
    }
    jac.push_back(std::move(d));
  }
  return jac;
}

}  // namespace

std::vector<double> wong_zakai_correction(const SdeSystem& sys, double t,
                                          std::span<const double> x, double fd_step) {
  require_step(fd_step, "wong_zakai_correction");
  require_shape(sys, x, "wong_zakai_correction");
  const Matrix sigma = sys.eval_diffusion(t, x);
  const auto jac = diffusion_jacobian(sys, t, x, fd_step);
  std::vector<double> corr(sys.dim, 0.0);
  for (std::size_t i = 0; i < sys.dim; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < sys.noise_dim; ++j) {
      for (std::size_t k = 0; k < sys.dim; ++k) {
        acc += jac[k](i, j) * sigma(k, j);
      }
    }
    corr[i] = 0.5 * acc;
  }
  return corr;
}

SdeSystem stratonovich_to_ito(const SdeSystem& sys, double fd_step) {
  if (sys.interpretation != Interpretation::Stratonovich) {
    throw InvalidArgument("stratonovich_to_ito: system is already in Ito form");
  }
  require_step(fd_step, "stratonovich_to_ito");
  SdeSystem out = sys;
  out.interpretation = Interpretation::Ito;
  out.exact_mean = nullptr;
  out.drift = [base = sys, fd_step](double t, std::span<const double> x,
                                    std::span<double> mu) {
    base.drift(t, x, mu);
    const auto corr = wong_zakai_correction(base, t, x, fd_step);
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += corr[i];
  };
  return out;
}

ItoDifferential ito_differential(const SdeSystem& sys, const ScalarFn& g, double t,
                                 std::span<const double> x, double fd_step) {
  if (sys.interpretation != Interpretation::Ito) {
    throw InvalidArgument("ito_differential: system must be in Ito form");
  }
  require_step(fd_step, "ito_differential");
  require_shape(sys, x, "ito_differential");

  const std::size_t n = sys.dim;
  std::vector<double> probe(x.begin(), x.end());
  auto eval = [&](std::size_t coord) {
    const double v = g(probe);
    if (!std::isfinite(v)) {
      throw NumericDomainError("ito_differential: observable is non-finite when probing "
                               "coordinate " + std::to_string(coord));
    }
    return v;
  };

  const double g0 = eval(0);
  // Central differences at steps h, h/2 and h/4 combined by two rounds of
  // Richardson extrapolation, so truncation error is O(h^6). Near pericenter
  // the element maps have derivatives growing like r^-k and lower orders
  // leave visible truncation error.
  auto derivatives = [&](double h, std::vector<double>& grad, std::vector<double>& hess) {
    for (std::size_t k = 0; k < n; ++k) {
      probe[k] = x[k] + h;
      const double gp = eval(k);
      probe[k] = x[k] - h;
      const double gm = eval(k);
      probe[k] = x[k];
      grad[k] = (gp - gm) / (2.0 * h);
      hess[k * n + k] = (gp - 2.0 * g0 + gm) / (h * h);
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = k + 1; l < n; ++l) {
        double acc = 0.0;
        for (int sk : {1, -1}) {
          for (int sl : {1, -1}) {
            probe[k] = x[k] + sk * h;
            probe[l] = x[l] + sl * h;
            acc += sk * sl * eval(k);
          }
        }
        probe[k] = x[k];
        probe[l] = x[l];
        hess[k * n + l] = hess[l * n + k] = acc / (4.0 * h * h);
      }
    }
  };
  std::vector<double> grad(n), hess(n * n), grad2(n), hess2(n * n), grad4(n), hess4(n * n);
  derivatives(fd_step, grad, hess);
  derivatives(0.5 * fd_step, grad2, hess2);
  derivatives(0.25 * fd_step, grad4, hess4);
  auto extrapolate = [](double d1, double d2, double d4) {
    return (64.0 * d4 - 20.0 * d2 + d1) / 45.0;
  };
  for (std::size_t i = 0; i < n; ++i) grad[i] = extrapolate(grad[i], grad2[i], grad4[i]);
  for (std::size_t i = 0; i < n * n; ++i) hess[i] = extrapolate(hess[i], hess2[i], hess4[i]);

  const auto mu = sys.eval_drift(t, x);
  const Matrix sigma = sys.eval_diffusion(t, x);

  ItoDifferential out;
  out.diffusion.assign(sys.noise_dim, 0.0);
  for (std::size_t k = 0; k < n; ++k) out.drift += grad[k] * mu[k];
  for (std::size_t j = 0; j < sys.noise_dim; ++j) {
    double quad = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      out.diffusion[j] += grad[k] * sigma(k, j);
      if (sigma(k, j) == 0.0) continue;
      for (std::size_t l = 0; l < n; ++l) {
        quad += sigma(k, j) * hess[k * n + l] * sigma(l, j);
      }
    }
    out.drift += 0.5 * quad;
  }
  return out;
}

std::string_view to_string(StructureCondition c) {
  switch (c) {
    case StructureCondition::MixedDerivatives:
      return "mixed-derivatives";
    case StructureCondition::MomentumNoiseSymmetry:
      return "momentum-noise-symmetry";
    case StructureCondition::CoordinateNoiseSymmetry:
      return "coordinate-noise-symmetry";
  }
  return "unknown";
}

StructureReport check_hamiltonian_structure(const SdeSystem& sys,
                                            const HamiltonianSplit& split,
                                            std::span<const StructureSample> points,
                                            double tol, double fd_step) {
  if (sys.interpretation != Interpretation::Stratonovich) {
    throw InvalidArgument("check_hamiltonian_structure: system must be in Stratonovich form");
  }
  if (sys.dim % 2 != 0) {
    throw InvalidArgument("check_hamiltonian_structure: state dimension must be even");
  }
  const auto& p = split.p_indices;
  const auto& q = split.q_indices;
  if (p.size() != q.size() || p.size() * 2 != sys.dim) {
    throw InvalidArgument("check_hamiltonian_structure: split must pair every state index");
  }
  std::vector<bool> seen(sys.dim, false);
  for (const auto* list : {&p, &q}) {
    for (std::size_t idx : *list) {
      if (idx >= sys.dim || seen[idx]) {
        throw InvalidArgument("check_hamiltonian_structure: split indices overlap or are out of range");
      }
      seen[idx] = true;
    }
  }
  if (points.empty()) {
    throw InvalidArgument("check_hamiltonian_structure: no sample points");
  }
  if (!(tol >= 0.0)) throw InvalidArgument("check_hamiltonian_structure: tol must be >= 0");
  require_step(fd_step, "check_hamiltonian_structure");

  StructureReport report;
  report.tolerance = tol;
  report.sample_points = points.size();
  auto record = [&](double residual, StructureCondition c) {
    residual = std::abs(residual);
    if (!std::isfinite(residual)) {
      throw NumericDomainError("check_hamiltonian_structure: non-finite derivative");
    }
    if (residual > report.max_residual) {
      report.max_residual = residual;
      report.worst_condition = c;
    }
  };

  const std::size_t n = p.size();
  for (const auto& pt : points) {
    require_shape(sys, pt.x, "check_hamiltonian_structure");
    const auto jac = diffusion_jacobian(sys, pt.t, pt.x, fd_step);
    // jac[k](row, r): derivative of sigma(row, r) with respect to x_k.
    for (std::size_t r = 0; r < sys.noise_dim; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
          record(jac[p[a]](p[i], r) + jac[q[i]](q[a], r),
                 StructureCondition::MixedDerivatives);
          if (a == i) continue;
          record(jac[q[a]](p[i], r) - jac[q[i]](p[a], r),
                 StructureCondition::MomentumNoiseSymmetry);
          record(jac[p[a]](q[i], r) - jac[p[i]](q[a], r),
                 StructureCondition::CoordinateNoiseSymmetry);
        }
      }
    }
  }
  report.is_hamiltonian = report.max_residual <= tol;
  return report;
}

}  // namespace stokep
