#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "decaylab/acceptance.hpp"
#include "decaylab/agbr.hpp"
#include "decaylab/core.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/experiment.hpp"
#include "decaylab/io.hpp"
#include "decaylab/spectral.hpp"
#include "decaylab/zeno.hpp"

namespace py = pybind11;
using namespace decaylab;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict series(const AmplitudeSeries& s) {
  py::dict d;
  d["times"] = to_array(s.times);
  d["amplitudes"] = to_array(s.amplitudes);
  d["errors"] = to_array(s.errors);
  return d;
}

Picture picture_from(const std::string& name) {
  if (name == "interaction") return Picture::interaction;
  if (name == "heisenberg") return Picture::heisenberg;
  throw ArgumentError("picture must be 'interaction' or 'heisenberg'");
}

py::object json_to_py(const io::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Survival probabilities, Zeno effect and the AgBr model";

  static py::exception<ArgumentError> arg_error(m, "ArgumentError", PyExc_ValueError);
  static py::exception<NumericalError> num_error(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ArgumentError& e) {
      PyErr_SetString(arg_error.ptr(), e.what());
    } catch (const NumericalError& e) {
      PyErr_SetString(num_error.ptr(), e.what());
    }
  });

  py::class_<FiniteModel>(m, "FiniteModel")
      .def(py::init<std::vector<double>, Eigen::MatrixXcd, int>(), py::arg("h0_diag"),
           py::arg("h_prime"), py::arg("initial_index") = 0)
      .def_property_readonly("dim", &FiniteModel::dim)
      .def_property_readonly("initial_index", &FiniteModel::initial_index)
      .def_property_readonly("e_a", &FiniteModel::e_a)
      .def("hamiltonian", &FiniteModel::hamiltonian);

  m.def("two_level_model", &two_level_model, py::arg("mu_b0"), py::arg("mu_b"));
  m.def("neutron_model", &neutron_model, py::arg("omega"));
  m.def(
      "survival_exact",
      [](const FiniteModel& model, const std::vector<double>& times, const std::string& picture) {
        return series(survival_exact(model, times, picture_from(picture)));
      },
      py::arg("model"), py::arg("times"), py::arg("picture") = "interaction");
  m.def(
      "short_time_coefficients",
      [](const FiniteModel& model) {
        const ShortTimeCoefficients s = short_time_coefficients(model);
        py::dict d;
        d["mean_energy"] = s.mean_energy;
        d["variance"] = s.variance;
        d["tau_gaussian"] = s.tau_gaussian ? py::cast(*s.tau_gaussian) : py::none();
        return d;
      },
      py::arg("model"));
  m.def(
      "resolvent_amplitude",
      [](const FiniteModel& model, const std::vector<double>& times, double offset, double tol) {
        return series(resolvent_amplitude(model, times, offset, tol));
      },
      py::arg("model"), py::arg("times"), py::arg("contour_offset"), py::arg("tol") = 1e-8);

  m.def("neutron_survival_closed_form", &neutron_survival_closed_form, py::arg("n"), py::arg("m") = 0);
  m.def("pulsed_survival", &pulsed_survival, py::arg("model"), py::arg("n"), py::arg("total_time"),
        py::arg("indices") = std::vector<int>{});
  m.def(
      "n_for_half", [](double ratio) { return n_for_half({ratio, 1.0}); }, py::arg("ratio"));
  m.def(
      "uncertainty_bounded_survival",
      [](double ratio, std::int64_t n) { return uncertainty_bounded_survival({ratio, 1.0}, n); },
      py::arg("ratio"), py::arg("n"));

  py::class_<SpectralModel>(m, "SpectralModel")
      .def(py::init([](double e_g, double e_a, double lambda, double delta, double e_c) {
             return SpectralModel(e_g, e_a, lambda, delta, e_c);
           }),
           py::arg("e_g"), py::arg("e_a"), py::arg("lambda_"), py::arg("delta"), py::arg("e_c"))
      .def_property_readonly("e_g", &SpectralModel::e_g)
      .def_property_readonly("e_a", &SpectralModel::e_a)
      .def_property_readonly("lambda_", &SpectralModel::lambda)
      .def_property_readonly("delta", &SpectralModel::delta)
      .def_property_readonly("e_c", &SpectralModel::e_c)
      .def("form_factor", py::overload_cast<double>(&SpectralModel::form_factor, py::const_));

  m.def(
      "self_energy",
      [](const SpectralModel& model, cplx E, const std::string& sheet, const std::string& approach) {
        const Sheet s = sheet == "second" ? Sheet::second : Sheet::first;
        const Approach a = approach == "above"   ? Approach::above
                           : approach == "below" ? Approach::below
                                                 : Approach::none;
        return self_energy_continuum(model, E, s, a);
      },
      py::arg("model"), py::arg("E"), py::arg("sheet") = "first", py::arg("approach") = "none");
  m.def("golden_rule_rate", &golden_rule_rate, py::arg("model"));
  m.def(
      "pole_solve",
      [](const SpectralModel& model) {
        const PoleSolution p = pole_solve(model);
        py::dict d;
        d["delta_e"] = p.delta_e;
        d["gamma"] = p.gamma;
        d["residue_z"] = p.residue_z;
        d["pole"] = p.pole;
        d["residual"] = p.residual;
        return d;
      },
      py::arg("model"));
  m.def(
      "direct_amplitude",
      [](const SpectralModel& model, const std::vector<double>& times) {
        return series(direct_amplitude(model, times));
      },
      py::arg("model"), py::arg("times"));
  m.def(
      "branch_cut_amplitude",
      [](const SpectralModel& model, const std::vector<double>& times) {
        return series(branch_cut_amplitude(model, times));
      },
      py::arg("model"), py::arg("times"));
  m.def(
      "fit_tail",
      [](const SpectralModel& model, double horizon) {
        const TailFit f = fit_tail(model, horizon);
        py::dict d;
        d["exponent"] = f.exponent;
        d["expected"] = f.expected;
        d["r_squared"] = f.r_squared;
        return d;
      },
      py::arg("model"), py::arg("horizon"));

  py::class_<AgBrConfig>(m, "AgBrConfig")
      .def(py::init([](int n_spins, double x1, double spacing, double coupling, double omega,
                       std::optional<double> packet_a) {
             AgBrConfig c;
             c.n_spins = n_spins;
             c.x1 = x1;
             c.spacing = spacing;
             c.coupling = coupling;
             c.omega = omega;
             if (packet_a) c.wave_packet = WavePacket{*packet_a, 0.0};
             c.validate();
             return c;
           }),
           py::arg("n_spins"), py::arg("x1"), py::arg("spacing"), py::arg("coupling"),
           py::arg("omega") = 0.0, py::arg("packet_size") = py::none())
      .def_property_readonly("q", &AgBrConfig::q)
      .def_property_readonly("nbar", &AgBrConfig::nbar)
      .def_property_readonly("length", &AgBrConfig::length);

  m.def("exact_propagator_delta", &exact_propagator_delta, py::arg("config"), py::arg("t"));
  m.def(
      "wavepacket_propagator",
      [](const AgBrConfig& c, double t) {
        const PropagatorValue v = wavepacket_propagator(c, t);
        return py::make_tuple(v.value, regime_label(v.regime));
      },
      py::arg("config"), py::arg("t"));
  m.def(
      "brute_force_oracle",
      [](const AgBrConfig& c, double t, const std::string& mode) {
        return brute_force_oracle(c, t, mode == "factorized" ? OracleMode::factorized
                                                             : OracleMode::full_hilbert);
      },
      py::arg("config"), py::arg("t"), py::arg("mode") = "full_hilbert");
  m.def(
      "final_state",
      [](const AgBrConfig& c) {
        const FinalStateStats s = final_state(c);
        py::dict d;
        d["visibility"] = s.visibility;
        d["mean_energy"] = s.mean_energy;
        d["energy_fluctuation"] = s.energy_fluctuation;
        d["coefficients"] = to_array(s.coefficients);
        return d;
      },
      py::arg("config"));

  m.def(
      "run",
      [](py::object config) {
        const std::string text = py::module_::import("json").attr("dumps")(config).cast<std::string>();
        const RunOutcome r = run_experiment(io::parse_json(text));
        return py::make_tuple(r.summary, r.written);
      },
      py::arg("config"), "Run an experiment config given as a dict.");
  m.def(
      "verify",
      [](const std::string& suite) {
        std::vector<acceptance::CriterionResult> r;
        {
          py::gil_scoped_release release;
          r = acceptance::run_suite(suite);
        }
        return json_to_py(acceptance_report(r));
      },
      py::arg("suite"));
  m.def("list_suites", [] {
    std::vector<std::string> names;
    for (const auto& s : acceptance::suites()) names.push_back(s.name);
    return names;
  });
}
