#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "embamp/config.hpp"
#include "embamp/freqplan.hpp"
#include "embamp/gaussian.hpp"
#include "embamp/metrics.hpp"
#include "embamp/optimizer.hpp"
#include "embamp/protocols.hpp"
#include "embamp/snr_models.hpp"
#include "embamp/units.hpp"

namespace py = pybind11;
using namespace embamp;

namespace {

py::dict simulate_ea(const DeviceParams& dev, const EffectiveRates& rates, double squeeze_db, double eta_mhz,
                     double gain, int record_every) {
  EaOptions opt;
  opt.gain = gain;
  const auto [s, cal] = build_ea_sequence(dev, rates, squeeze_db, units::mhz(eta_mhz), opt);
  const double dt = default_dt(s, dev);
  const Trajectory tr = simulate_protocol(s, dev, dt, record_every, 10.0 / dev.gamma(kOutput));
  std::vector<double> d2(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k)
    d2[k] = fisher_discriminant({tr.states_e[k].means, tr.states_g[k].means, tr.states_e[k].cov, tr.states_g[k].cov});
  py::dict out;
  out["times"] = tr.times;
  out["photons_e"] = tr.photons_e;
  out["photons_g"] = tr.photons_g;
  out["d2"] = d2;
  out["total_duration"] = s.total_duration;
  out["dead_time"] = s.dead_time;
  out["transfer_prob"] = cal.transfer_prob;
  return out;
}

}  // namespace

PYBIND11_MODULE(_impl, m) {
  m.doc() = "Gaussian simulator for embedded-amplification qubit readout";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ConstraintViolation>(m, "ConstraintViolation", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());

  m.attr("READOUT") = static_cast<int>(kReadout);
  m.attr("SNAIL") = static_cast<int>(kSnail);
  m.attr("OUTPUT") = static_cast<int>(kOutput);

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("chi_mhz", &DeviceParams::chi_mhz)
      .def_readwrite("g3_mhz", &DeviceParams::g3_mhz)
      .def_readwrite("n_crit", &DeviceParams::n_crit)
      .def_readwrite("t1_us", &DeviceParams::t1_us)
      .def("gamma", &DeviceParams::gamma, py::arg("mode"))
      .def("chi", &DeviceParams::chi)
      .def("set_gamma_mhz", [](DeviceParams& d, int mode, double g) { d.modes.at(mode).gamma_mhz = g; })
      .def("validate", &DeviceParams::validate);

  py::class_<EffectiveRates>(m, "EffectiveRates")
      .def(py::init<>())
      .def_readwrite("squeeze_readout", &EffectiveRates::squeeze_readout)
      .def_readwrite("convert_readout_snail", &EffectiveRates::convert_readout_snail)
      .def_readwrite("amplify_snail", &EffectiveRates::amplify_snail)
      .def_readwrite("convert_snail_output", &EffectiveRates::convert_snail_output);

  m.def("propagate_squeeze_analytic",
        [](double r, double phi, double chi, double gamma, double t) {
          return propagate_squeeze_analytic(r, phi, chi, gamma, t).matrix;
        },
        py::arg("r"), py::arg("phi"), py::arg("chi"), py::arg("gamma"), py::arg("t"));
  m.def("uncertainty_min_eigenvalue", &uncertainty_min_eigenvalue, py::arg("cov"));

  m.def("fisher_discriminant",
        [](const Vec& mu_e, const Vec& mu_g, const Mat& v_e, const Mat& v_g) {
          return fisher_discriminant({mu_e, mu_g, v_e, v_g});
        },
        py::arg("mu_e"), py::arg("mu_g"), py::arg("v_e"), py::arg("v_g"));
  m.def("error_probability", &error_probability, py::arg("d2"));
  m.def("assignment_fidelity", &assignment_fidelity, py::arg("d2"), py::arg("total_T"), py::arg("t1"));
  m.def("nines", &nines, py::arg("fidelity"));

  m.def("conversion_transfer",
        [](double g, double chi) {
          const auto c = conversion_transfer(g, chi);
          return py::dict(py::arg("p_a") = c.p_a, py::arg("p_s") = c.p_s, py::arg("theta_chi") = c.theta_chi,
                          py::arg("t_pi") = c.t_pi);
        },
        py::arg("g"), py::arg("chi"));
  m.def("simulate_ea", &simulate_ea, py::arg("device") = DeviceParams{}, py::arg("rates") = EffectiveRates{},
        py::arg("squeeze_db") = 0.0, py::arg("eta_mhz") = 1.0, py::arg("gain") = 1.0, py::arg("record_every") = 10);

  m.def("cdr_d2",
        [](const DeviceParams& d, double n_tot, double T) { return cdr_readout(cdr_readout_for(d), n_tot, T).d2; },
        py::arg("device"), py::arg("n_tot"), py::arg("T"));
  m.def("ea_d2",
        [](const DeviceParams& d, double n_tot, double T, double gain, double squeeze_db, double t_dead) {
          EaReadout r = ea_readout_for(d);
          r.gain = gain;
          r.squeeze_db = squeeze_db;
          r.t_dead = t_dead;
          return ea_readout(r, n_tot, T).d2;
        },
        py::arg("device"), py::arg("n_tot"), py::arg("T"), py::arg("gain") = 1.0, py::arg("squeeze_db") = 0.0,
        py::arg("t_dead") = 0.3e-6);

  m.def("budget_squeeze_db", &budget_squeeze_db, py::arg("photon_budget"));
  m.def("optimal_squeezing",
        [](const DeviceParams& d, double budget, double gain) {
          const EaReadout r = ea_readout_for(d);
          const auto o = optimal_squeezing(budget, gain, ea_squeeze_evaluator(r, std::numbers::pi / (2 * r.chi), 1e-6));
          return py::make_tuple(o.db, o.snr);
        },
        py::arg("device"), py::arg("photon_budget"), py::arg("gain") = 100.0);

  m.def("mixing_set", &mixing_set, py::arg("freqs"));
  m.def("bandwidth_bound", &bandwidth_bound, py::arg("n"), py::arg("guard_mhz"));
  m.def("validate_plan",
        [](std::vector<double> freqs, double guard_mhz, double band_lo, double band_hi) {
          FrequencyPlan p;
          p.freqs = std::move(freqs);
          p.guard_mhz = guard_mhz;
          p.band_lo = band_lo;
          p.band_hi = band_hi;
          py::list out;
          for (const auto& c : validate_plan(p).collisions)
            out.append(py::dict(py::arg("kind") = collision_kind_name(c.kind), py::arg("tones") = c.tones,
                                py::arg("gap_mhz") = c.gap_mhz));
          return out;
        },
        py::arg("freqs"), py::arg("guard_mhz") = 50.0, py::arg("band_lo") = 4.0, py::arg("band_hi") = 8.0);
  m.def("search_plan",
        [](int n, double lo, double hi, double guard, std::uint64_t seed) {
          return search_plan(n, lo, hi, guard, seed).freqs;
        },
        py::arg("n"), py::arg("band_lo") = 4.0, py::arg("band_hi") = 8.0, py::arg("guard_mhz") = 50.0,
        py::arg("seed") = 0);

  m.def("parse_config",
        [](const std::string& text) {
          const RunConfig c = parse_config(text);
          return py::dict(py::arg("protocol") = protocol_name(c.protocol), py::arg("n_tot") = c.budgets.n_tot,
                          py::arg("total_time_us") = c.budgets.total_time_us, py::arg("chi_mhz") = c.device.chi_mhz,
                          py::arg("seed") = c.seed);
        },
        py::arg("text"));
}
