#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "qdot_erasure/cli_app.hpp"
#include "qdot_erasure/errors.hpp"
#include "qdot_erasure/mad_oracle.hpp"

namespace py = pybind11;
using namespace qdot;

namespace {

// Divergent energies surface as +inf.
double as_float(const FiniteOrDivergent& v) {
  return v.is_divergent() ? std::numeric_limits<double>::infinity() : v.value();
}

py::dict costs_dict(const ErasureCosts& c) {
  py::dict d;
  d["w_zero"] = as_float(c.w_zero);
  d["w_one"] = as_float(c.w_one);
  d["w_bar"] = as_float(c.w_bar);
  d["mu_half"] = c.mu_half;
  d["mu_half_ambiguous"] = c.mu_half_ambiguous;
  d["divergent"] = c.divergent;
  d["w_bar_mad"] = as_float(c.w_bar_mad);
  return d;
}

py::dict scales_dict(const EnergyScales& s) {
  py::dict d;
  d["e_therm"] = s.e_therm;
  d["e_bias"] = s.e_bias;
  d["e_broad"] = as_float(s.e_broad);
  return d;
}

DotSystem make_system(double kt_s, double kt_d, double mu_s, double mu_d, double rate_s, double rate_d,
                      const BroadeningKernel& kernel) {
  DotSystem sys{{kt_s, mu_s}, {kt_d, mu_d}, {rate_s, rate_d}, kernel};
  sys.validate();
  return sys;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Erasure cost of a quantum-dot charge bit";

  auto base = py::register_exception<Error>(m, "QdotError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InvalidSystem>(m, "InvalidSystem", base.ptr());
  py::register_exception<DivergentTail>(m, "DivergentTail", base.ptr());
  py::register_exception<StepTooLarge>(m, "StepTooLarge", base.ptr());

  py::enum_<KernelKind>(m, "KernelKind")
      .value("DELTA", KernelKind::Delta)
      .value("GAUSSIAN", KernelKind::Gaussian)
      .value("LORENTZIAN", KernelKind::Lorentzian);
  py::enum_<ErasureTarget>(m, "ErasureTarget").value("ZERO", ErasureTarget::Zero).value("ONE", ErasureTarget::One);
  py::enum_<RampProfile>(m, "RampProfile")
      .value("LINEAR", RampProfile::Linear)
      .value("THERMODYNAMIC_LENGTH", RampProfile::ThermodynamicLength);

  py::class_<BroadeningKernel>(m, "BroadeningKernel")
      .def_static("delta", &BroadeningKernel::delta)
      .def_static("gaussian", &BroadeningKernel::gaussian, py::arg("sigma"))
      .def_static("lorentzian", &BroadeningKernel::lorentzian, py::arg("width"))
      .def_property_readonly("kind", &BroadeningKernel::kind)
      .def_property_readonly("width", &BroadeningKernel::width)
      .def("mad", [](const BroadeningKernel& k) { return as_float(kernel_mad(k)); });

  py::class_<DotSystem>(m, "DotSystem")
      .def(py::init(&make_system), py::kw_only(), py::arg("kt_source"), py::arg("kt_drain"), py::arg("mu_source"),
           py::arg("mu_drain") = 0.0, py::arg("rate_source") = 1.0, py::arg("rate_drain") = 1.0,
           py::arg("kernel") = BroadeningKernel::delta())
      .def_property_readonly("bias", &DotSystem::bias)
      .def_property_readonly("gamma_source", [](const DotSystem& s) { return s.rates.gamma_source(); })
      .def_property_readonly("kernel", [](const DotSystem& s) { return s.kernel; });

  m.def("occupation", [](double mu, const DotSystem& sys) { return occupation(mu, sys); }, py::arg("mu"),
        py::arg("system"));
  m.def("unbroadened_occupation", &unbroadened_occupation, py::arg("mu"), py::arg("system"));
  m.def("half_occupation_level", [](const DotSystem& sys) { return half_occupation_level(sys).value; },
        py::arg("system"));
  m.def("erasure_costs", [](const DotSystem& sys) { return costs_dict(erasure_costs(sys)); }, py::arg("system"));
  m.def("energy_scales", [](const DotSystem& sys) { return scales_dict(energy_scales(sys)); }, py::arg("system"));
  m.def(
      "check_bound",
      [](const DotSystem& sys) {
        const BoundReport b = check_bound(erasure_costs(sys), energy_scales(sys));
        py::dict d;
        d["lower"] = b.lower;
        d["upper"] = b.upper;
        d["w_bar"] = b.w_bar;
        d["satisfied"] = b.satisfied;
        return d;
      },
      py::arg("system"));
  m.def("deviation_about", [](const DotSystem& sys, double ref) { return deviation_about(sys, ref); },
        py::arg("system"), py::arg("reference"));
  m.def(
      "eta_erasure_work",
      [](const DotSystem& sys, double eta) {
        const EtaErasure e = eta_erasure_work(sys, eta);
        py::dict d;
        d["work"] = e.work;
        d["mu_eta"] = e.mu_eta;
        d["closed_form"] = e.closed_form ? py::cast(*e.closed_form) : py::none();
        return d;
      },
      py::arg("system"), py::arg("eta"));
  m.def("lorentzian_eta_work", &lorentzian_eta_work, py::arg("width"), py::arg("eta"));

  py::class_<DeviceSpec>(m, "DeviceSpec")
      .def(py::init([](double t_s, double t_d, double bias, double r_s, double r_d, KernelKind kernel) {
             DeviceSpec s{t_s, t_d, bias, r_s, r_d, kernel};
             s.validate();
             return s;
           }),
           py::kw_only(), py::arg("temperature_source"), py::arg("temperature_drain"), py::arg("bias"),
           py::arg("rate_source"), py::arg("rate_drain"), py::arg("kernel") = KernelKind::Gaussian)
      .def_readonly("temperature_source", &DeviceSpec::temperature_source)
      .def_readonly("temperature_drain", &DeviceSpec::temperature_drain)
      .def_readonly("bias", &DeviceSpec::bias)
      .def_readonly("rate_source", &DeviceSpec::rate_source)
      .def_readonly("rate_drain", &DeviceSpec::rate_drain)
      .def_readonly("kernel", &DeviceSpec::kernel)
      .def("hbar_gamma_tot", &DeviceSpec::hbar_gamma_tot)
      .def("to_system", &DeviceSpec::to_system, py::arg("unit_rate_time") = false);

  m.def("thermal_energy_ueV", &thermal_energy_ueV, py::arg("kelvin"));
  m.def("hbar_gamma_ueV", &hbar_gamma_ueV, py::arg("rate_hz"));
  m.def("parse_quantity", &parse_quantity, py::arg("text"), py::arg("unit"));
  m.def("load_config", &load_config, py::arg("path"));

  m.def(
      "analyze",
      [](const DeviceSpec& spec, const std::vector<double>& etas) {
        const AnalysisReport r = analyze(spec, etas);
        py::dict d;
        d["costs"] = costs_dict(r.costs);
        d["scales"] = scales_dict(r.scales);
        d["hbar_gamma_tot"] = r.hbar_gamma_tot;
        d["bound_satisfied"] = r.bound_checked ? py::cast(r.bound.satisfied) : py::none();
        py::list eta;
        for (const auto& row : r.eta) eta.append(py::make_tuple(row.eta, row.work, row.mu_eta));
        d["eta"] = eta;
        return d;
      },
      py::arg("spec"), py::arg("etas") = std::vector<double>{});
  m.def(
      "sweep",
      [](const DeviceSpec& spec, double bias_max, double width_max, int points) {
        py::list rows;
        for (const auto& r : sweep(spec, bias_max, width_max, points)) {
          py::dict d;
          d["bias"] = r.bias;
          d["hbar_gamma_tot"] = r.hbar_gamma_tot;
          d["w_bar"] = as_float(r.w_bar);
          d["e_therm"] = r.e_therm;
          d["e_bias"] = r.e_bias;
          d["e_broad"] = as_float(r.e_broad);
          d["bound_lower"] = as_float(r.bound_lower);
          d["bound_upper"] = as_float(r.bound_upper);
          rows.append(d);
        }
        return rows;
      },
      py::arg("spec"), py::arg("bias_max"), py::arg("width_max"), py::arg("points"));
  m.def(
      "occupation_curve",
      [](const DeviceSpec& spec, double mu_min, double mu_max, int points) {
        py::list rows;
        for (const auto& r : occupation_curve(spec, mu_min, mu_max, points)) {
          rows.append(py::make_tuple(r.mu, r.p_unbroadened, r.p_broadened));
        }
        return rows;
      },
      py::arg("spec"), py::arg("mu_min"), py::arg("mu_max"), py::arg("points"));
  m.def(
      "run_protocol",
      [](const DeviceSpec& spec, ErasureTarget target, double duration, RampProfile profile) {
        const ProtocolRun run = run_protocol(spec, target, duration, profile);
        std::vector<double> t, mu, p, work;
        for (const auto& s : run.trajectory.samples) {
          t.push_back(s.t);
          mu.push_back(s.mu);
          p.push_back(s.p);
          work.push_back(s.work);
        }
        py::dict d;
        d["work"] = run.work;
        d["final_p"] = run.final_p;
        d["reference"] = as_float(run.reference);
        d["t"] = t;
        d["mu"] = mu;
        d["p"] = p;
        d["work_trace"] = work;
        return d;
      },
      py::arg("spec"), py::arg("target"), py::arg("duration"),
      py::arg("profile") = RampProfile::ThermodynamicLength);
  m.def(
      "run_lemma_suite",
      [](int trials, std::uint64_t seed, bool near_delta) {
        const LemmaSuiteReport r = [&] {
          py::gil_scoped_release release;
          return run_lemma_suite(trials, seed, near_delta);
        }();
        py::dict d;
        d["trials"] = r.trials;
        d["lemma1_violations"] = r.lemma1_violations;
        d["lemma2_violations"] = r.lemma2_violations;
        d["ok"] = r.ok();
        d["text"] = r.text;
        return d;
      },
      py::arg("trials"), py::arg("seed"), py::arg("near_delta") = false);

  m.def(
      "grid_mad",
      [](double origin, double step, std::vector<double> densities) {
        return grid_mad(GridPdf{origin, step, std::move(densities)});
      },
      py::arg("origin"), py::arg("step"), py::arg("densities"));
}
