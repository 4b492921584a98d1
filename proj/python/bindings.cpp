#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "stokep/cli/commands.hpp"
#include "stokep/cli/runs.hpp"
#include "stokep/elements.hpp"
#include "stokep/errors.hpp"
#include "stokep/models.hpp"
#include "stokep/sde.hpp"

namespace py = pybind11;
using namespace stokep;
using namespace stokep::cli;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> states_array(const Trajectory& traj) {
  py::array_t<double> out({static_cast<py::ssize_t>(traj.size()),
                           static_cast<py::ssize_t>(traj.dim)});
  std::copy(traj.states.begin(), traj.states.end(), out.mutable_data());
  return out;
}

// Lists become comma-joined text so every value goes through the config parser.
std::string config_text(const py::handle& value) {
  if (py::isinstance<py::str>(value)) return value.cast<std::string>();
  if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
    std::string out;
    for (const auto& item : value) {
      if (!out.empty()) out += ',';
      out += config_text(item);
    }
    return out;
  }
  if (py::isinstance<py::float_>(value)) {
    std::ostringstream os;
    os.precision(17);
    os << value.cast<double>();
    return os.str();
  }
  return py::str(value).cast<std::string>();
}

RunConfig make_config(const py::kwargs& kwargs, RunConfig base = {}) {
  for (const auto& [key, value] : kwargs) {
    set_value(base, key.cast<std::string>(), config_text(value));
  }
  return base;
}

py::dict comparison_dict(const ComparisonReport& r) {
  py::dict d;
  d["t"] = to_numpy(r.t);
  d["a_direct"] = to_numpy(r.a_direct);
  d["a_gauss"] = to_numpy(r.a_gauss);
  d["e_direct"] = to_numpy(r.e_direct);
  d["e_gauss"] = to_numpy(r.e_gauss);
  d["omega_direct"] = to_numpy(r.omega_direct);
  d["omega_gauss"] = to_numpy(r.omega_gauss);
  d["H_direct"] = to_numpy(r.H_direct);
  d["H_from_a"] = to_numpy(r.H_from_a);
  d["sup_rel_a"] = r.sup_rel_a;
  d["sup_rel_e"] = r.sup_rel_e;
  d["sup_abs_omega"] = r.sup_abs_omega;
  d["sup_rel_H"] = r.sup_rel_H;
  d["truncated"] = r.truncated;
  return d;
}

py::dict study_dict(const ConvergenceStudy& s) {
  py::dict d;
  d["steps"] = to_numpy(s.step_sizes);
  d["errors"] = to_numpy(s.weak_errors);
  d["stderrs"] = to_numpy(s.stderrs);
  d["order"] = s.fitted_order;
  d["log_constant"] = s.log_constant;
  d["reference"] = std::string(to_string(s.reference));
  return d;
}

}  // namespace

PYBIND11_MODULE(_stokep, mod) {
  mod.doc() = "Stochastic Kepler problem: integrators, ensembles and orbital elements";

  auto base = py::register_exception<std::runtime_error>(mod, "StokepError");
  py::register_exception<InvalidArgument>(mod, "InvalidArgument", PyExc_ValueError);
  auto numeric = py::register_exception<NumericDomainError>(mod, "NumericDomainError", base);
  py::register_exception<PericenterSingularityError>(mod, "PericenterSingularityError", numeric);
  py::register_exception<UnboundOrbitError>(mod, "UnboundOrbitError", numeric);
  py::register_exception<EnsembleDegenerateError>(mod, "EnsembleDegenerateError", base);
  py::register_exception<InconclusiveStudyError>(mod, "InconclusiveStudyError", base);

  py::class_<RunConfig>(mod, "Config")
      .def(py::init([](const py::kwargs& kw) { return make_config(kw); }),
           "Defaults reproduce the reference two-body run; keyword arguments override keys.")
      .def_static(
          "load", [](const std::string& path, const py::kwargs& kw) {
            return make_config(kw, load_config(path));
          },
          py::arg("path"))
      .def_static("from_text",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return parse_config(in);
                  })
      .def_static("keys",
                  [] {
                    std::vector<std::string> out;
                    for (auto k : config_keys()) out.emplace_back(k);
                    return out;
                  })
      .def("set", [](RunConfig& c, const std::string& key,
                     const py::object& value) { set_value(c, key, config_text(value)); })
      .def("replace", [](const RunConfig& c, const py::kwargs& kw) { return make_config(kw, c); })
      .def("validate", [](const RunConfig& c) { validate(c); })
      .def("to_text",
           [](const RunConfig& c) {
             std::ostringstream os;
             write_config(os, c);
             return os.str();
           })
      .def("__repr__", [](const RunConfig& c) {
        std::ostringstream os;
        write_config(os, c);
        return "Config(\n" + os.str() + ")";
      });

  mod.def(
      "simulate",
      [](const RunConfig& cfg) {
        const auto res = simulate_run(cfg);
        py::dict d;
        d["t"] = to_numpy(res.traj.times);
        d["states"] = states_array(res.traj);
        d["failure"] = res.failure ? py::object(py::str(*res.failure)) : py::object(py::none());
        d["requested_nodes"] = res.requested_nodes;
        return d;
      },
      py::arg("config"), "One sample path. A numeric failure returns the computed prefix.");

  mod.def(
      "ensemble",
      [](const RunConfig& cfg) {
        EnsembleEstimate est;
        {
          py::gil_scoped_release release;
          est = ensemble_run(cfg);
        }
        py::dict obs;
        for (const auto& o : est.observables) {
          py::dict e;
          e["mean"] = to_numpy(o.mean);
          e["variance"] = to_numpy(o.variance);
          e["stderr"] = to_numpy(o.std_error);
          obs[py::str(o.name)] = e;
        }
        py::dict d;
        d["t"] = to_numpy(est.times);
        d["observables"] = obs;
        d["n_realizations"] = est.n_realizations;
        d["n_excluded"] = est.n_excluded;
        d["tainted"] = est.tainted;
        return d;
      },
      py::arg("config"));

  mod.def(
      "converge",
      [](const RunConfig& cfg) {
        ConvergenceStudy study;
        {
          py::gil_scoped_release release;
          study = converge_run(cfg);
        }
        return study_dict(study);
      },
      py::arg("config"),
      "Weak error study over config steps; raises InconclusiveStudyError at the noise floor.");

  mod.def(
      "gauss", [](const RunConfig& cfg) { return comparison_dict(gauss_run(cfg)); },
      py::arg("config"), "Direct polar run against the element equations on shared noise.");

  mod.def(
      "check_structure",
      [](const RunConfig& cfg) {
        const auto r = structure_run(cfg);
        py::dict d;
        d["hamiltonian"] = r.is_hamiltonian;
        d["max_residual"] = r.max_residual;
        d["violated_condition"] =
            r.is_hamiltonian ? std::string("none") : std::string(to_string(r.worst_condition));
        d["sample_points"] = r.sample_points;
        return d;
      },
      py::arg("config"));

  mod.def(
      "extract_elements",
      [](std::array<double, 4> s, double m, double k) {
        const auto el = extract_elements(TwoBodyParams(m, k, 0.0, 0.0), PolarState::from(s));
        return std::array<double, 4>{el.a, el.e, el.omega, el.f};
      },
      py::arg("state"), py::arg("m") = 1.0, py::arg("k") = 1.0,
      "(a, e, omega, f) from a polar state (r, phi, v, w).");

  mod.def(
      "reconstruct_polar",
      [](std::array<double, 4> el, double m, double k) {
        return reconstruct_polar(TwoBodyParams(m, k, 0.0, 0.0),
                                 OrbitalState{el[0], el[1], el[2], el[3]})
            .to_array();
      },
      py::arg("elements"), py::arg("m") = 1.0, py::arg("k") = 1.0);

  mod.def(
      "invariants",
      [](std::array<double, 4> s, double m, double k) {
        const TwoBodyParams p(m, k, 0.0, 0.0);
        const auto ps = PolarState::from(s);
        return std::pair<double, double>{angular_momentum(p, ps), energy(p, ps)};
      },
      py::arg("state"), py::arg("m") = 1.0, py::arg("k") = 1.0,
      "(M, H) for a polar state.");

  mod.def(
      "canonical_wong_zakai",
      [](std::array<double, 4> s, double m, double k, double sigma_r, double sigma_phi) {
        const TwoBodyParams p(m, k, sigma_r, sigma_phi);
        const auto c = polar_to_canonical(p, PolarState::from(s));
        return wong_zakai_correction(two_body_canonical_system(p), 0.0, c);
      },
      py::arg("state"), py::arg("m") = 1.0, py::arg("k") = 1.0,
      py::arg("sigma_r") = kCanonicalSigmaR, py::arg("sigma_phi") = kCanonicalSigmaPhi,
      "Stratonovich-to-Ito drift correction of the canonical system at a polar state.");

  mod.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"stokep"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), Streams{out, err});
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");
}
