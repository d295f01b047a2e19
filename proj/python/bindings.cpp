#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dqpass/compliance.hpp"
#include "dqpass/device_models.hpp"
#include "dqpass/error.hpp"
#include "dqpass/io.hpp"
#include "dqpass/network.hpp"
#include "dqpass/passivity.hpp"
#include "dqpass/transforms.hpp"
#include "dqpass/vector_fit.hpp"

namespace py = pybind11;
using namespace dqpass;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

FreqResponse to_response(const std::vector<double>& freq_hz, const CArray& samples,
                         ModelKind kind) {
  if (samples.ndim() != 3 || samples.shape(1) != 2 || samples.shape(2) != 2) {
    throw InputError("samples must have shape (N, 2, 2)");
  }
  if (static_cast<std::size_t>(samples.shape(0)) != freq_hz.size()) {
    throw InputError("one sample per frequency is required");
  }
  std::vector<double> omega;
  for (double f : freq_hz) omega.push_back(kTwoPi * f);
  FreqResponse r;
  r.grid = FreqGrid(std::move(omega), Spacing::log);
  r.kind = kind;
  auto s = samples.unchecked<3>();
  for (py::ssize_t k = 0; k < samples.shape(0); ++k) {
    CMatrix m(2, 2);
    for (py::ssize_t i = 0; i < 2; ++i) {
      for (py::ssize_t j = 0; j < 2; ++j) m(i, j) = s(k, i, j);
    }
    r.samples.push_back(m);
  }
  r.validate();
  return r;
}

CArray samples_array(const std::vector<CMatrix>& samples) {
  const auto n = static_cast<py::ssize_t>(samples.size());
  CArray out({n, py::ssize_t{2}, py::ssize_t{2}});
  auto w = out.mutable_unchecked<3>();
  for (py::ssize_t k = 0; k < n; ++k) {
    for (py::ssize_t i = 0; i < 2; ++i) {
      for (py::ssize_t j = 0; j < 2; ++j) w(k, i, j) = samples[static_cast<std::size_t>(k)](i, j);
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Passivity-based compliance checks for grid-connected devices";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      PyErr_SetString(input_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::enum_<ModelKind>(m, "ModelKind")
      .value("I", ModelKind::I)
      .value("II", ModelKind::II)
      .value("III", ModelKind::III);
  py::enum_<Side>(m, "Side").value("device", Side::device).value("network", Side::network);

  py::class_<RationalModel>(m, "RationalModel")
      .def(py::init([](Matrix a, Matrix b, Matrix c, Matrix d, ModelKind kind) {
             RationalModel g{std::move(a), std::move(b), std::move(c), std::move(d), kind};
             g.validate();
             return g;
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"), py::arg("kind") = ModelKind::I)
      .def_readwrite("A", &RationalModel::A)
      .def_readwrite("B", &RationalModel::B)
      .def_readwrite("C", &RationalModel::C)
      .def_readwrite("D", &RationalModel::D)
      .def_readwrite("kind", &RationalModel::kind)
      .def_property_readonly("states", &RationalModel::states)
      .def("to_json", &model_to_json)
      .def_static("from_json", &parse_model);

  py::class_<OperatingPoint>(m, "OperatingPoint")
      .def(py::init<double, double, double, double>(), py::arg("v_d"), py::arg("v_q"),
           py::arg("i_d"), py::arg("i_q"))
      .def_static("from_power", &OperatingPoint::from_power)
      .def_property_readonly("v_d", &OperatingPoint::v_d)
      .def_property_readonly("v_q", &OperatingPoint::v_q)
      .def_property_readonly("i_d", &OperatingPoint::i_d)
      .def_property_readonly("i_q", &OperatingPoint::i_q)
      .def_property_readonly("voltage", &OperatingPoint::voltage)
      .def("e_matrix", &OperatingPoint::e_matrix)
      .def("c_matrix", &OperatingPoint::c_matrix)
      .def("f_matrix", &OperatingPoint::f_matrix);

  py::class_<DroopParams>(m, "DroopParams")
      .def(py::init([](double k_pf, double k_qv, double tau) {
             DroopParams p{k_pf, k_qv, tau};
             validate(p);
             return p;
           }),
           py::arg("k_pf"), py::arg("k_qv"), py::arg("tau"))
      .def_readonly("k_pf", &DroopParams::k_pf)
      .def_readonly("k_qv", &DroopParams::k_qv)
      .def_readonly("tau", &DroopParams::tau);

  py::class_<VsgParams>(m, "VsgParams")
      .def_static("at", &VsgParams::at, py::arg("inertia"), py::arg("damping"), py::arg("emf"),
                  py::arg("reactance"), py::arg("rotor_angle"), py::arg("op"))
      .def_readonly("inertia", &VsgParams::inertia)
      .def_readonly("damping", &VsgParams::damping)
      .def_readonly("zeta", &VsgParams::zeta);

  py::class_<LoadParams>(m, "LoadParams")
      .def(py::init([](double k_pf, double k_pv, double k_qf, double k_qv, double tau) {
             LoadParams p{k_pf, k_pv, k_qf, k_qv, tau};
             validate(p);
             return p;
           }),
           py::arg("k_pf"), py::arg("k_pv"), py::arg("k_qf"), py::arg("k_qv"),
           py::arg("tau") = 0.01);

  m.def("vsg_operating_point", &vsg_operating_point, py::arg("emf"), py::arg("reactance"),
        py::arg("rotor_angle"), py::arg("v_d"), py::arg("v_q"));

  m.def("eval_tf", &eval_tf, py::arg("model"), py::arg("omega"));
  m.def("eval_at", &eval_at, py::arg("model"), py::arg("s"));
  m.def("make_grid_hz", [](double f_min, double f_max, std::size_t n, bool linear) {
    const FreqGrid g = make_grid(f_min, f_max, n, linear ? Spacing::linear : Spacing::log);
    std::vector<double> hz;
    for (std::size_t i = 0; i < g.size(); ++i) hz.push_back(g.hz(i));
    return hz;
  }, py::arg("f_min"), py::arg("f_max"), py::arg("n_points"), py::arg("linear") = false);
  m.def("sample", [](const RationalModel& g, const std::vector<double>& freq_hz) {
    std::vector<CMatrix> out;
    for (double f : freq_hz) out.push_back(eval_tf(g, kTwoPi * f));
    return samples_array(out);
  }, py::arg("model"), py::arg("freq_hz"));
  m.def("eig_general", [](const Matrix& a) { return eig_general(a).values; });
  m.def("eig_hermitian", &eig_hermitian);

  m.def("droop_js", &droop_js);
  m.def("droop_ns", &droop_ns);
  m.def("droop_nsd", &droop_nsd);
  m.def("vsg_ys", &vsg_ys);
  m.def("vsg_ns", &vsg_ns);
  m.def("vsg_nsd", &vsg_nsd, py::arg("params"), py::arg("op"), py::arg("tau"));
  m.def("load_js", &load_js);
  m.def("load_nsd", &load_nsd);
  m.def("device_ys", [](const DroopParams& p, const OperatingPoint& op) { return device_ys(p, op); });
  m.def("device_ys", [](const VsgParams& p, const OperatingPoint& op) { return device_ys(p, op); });
  m.def("device_ys", [](const LoadParams& p, const OperatingPoint& op) { return device_ys(p, op); });

  m.def("modelI_to_II", &modelI_to_II, py::arg("model"), py::arg("op"),
        py::arg("side") = Side::device);
  m.def("modelII_to_I", &modelII_to_I, py::arg("model"), py::arg("op"),
        py::arg("side") = Side::device);
  m.def("modelII_to_III", &modelII_to_III, py::arg("model"), py::arg("tau"));
  m.def("invert_tf", &invert_tf);
  m.def("add_series_resistance", &add_series_resistance);
  m.def("extract_kqvc", [](const RationalModel& js, double k) { return extract_kqvc(js, k); });
  m.def("check_properness", [](const Matrix& d, const OperatingPoint& op) {
    return check_properness(Matrix2(d), op);
  });
  m.def("pole_identity_check", [](const RationalModel& yn, const RationalModel& ys,
                                  const OperatingPoint& op, double tau) {
    const PoleIdentityReport r = pole_identity_check(yn, ys, op, tau);
    py::dict d;
    d["distance"] = r.distance;
    d["identical"] = r.identical;
    d["extra_pole_only"] = r.extra_pole_only;
    d["extra_pole_error"] = r.extra_pole_error;
    d["repeated_zero_pole"] = r.repeated_zero_pole;
    d["g1"] = r.g1.values;
    d["g2"] = r.g2.values;
    d["g3"] = r.g3.values;
    return d;
  });

  m.def("_verdict_json", [](const RationalModel& g, const std::string& band, double f_min,
                            double f_max, std::size_t points) {
    VerdictOptions opts;
    opts.low_min_hz = f_min;
    opts.high_max_hz = f_max;
    opts.points = points;
    return verdict_to_json(passivity_verdict(g, parse_band(band), opts));
  });

  m.def("_vector_fit", [](const std::vector<double>& freq_hz, const CArray& samples,
                          std::size_t order, bool auto_order, double tol, bool uniform) {
    FitConfig cfg;
    cfg.order = order;
    cfg.weighting = uniform ? Weighting::uniform : Weighting::inverse_magnitude;
    const FreqResponse r = to_response(freq_hz, samples, ModelKind::I);
    FitResult fit = auto_order ? vector_fit_auto(r, cfg, tol) : vector_fit(r, cfg);
    return py::make_tuple(fit.model, fit_report_to_json(fit.report));
  });

  m.def("_jacobian_json", [](const std::string& network_json, const std::string& kqvc_json,
                             bool lossless) {
    NetworkSpec net = parse_network(network_json);
    if (lossless) net = net.lossless();
    JacobianReport rep = build_jlf(net);
    if (!kqvc_json.empty()) rep = apply_kqvc(rep, parse_contributions(kqvc_json));
    return jacobian_to_json(rep);
  });

  m.def("_comply_json", [](const std::vector<double>& freq_hz, const CArray& samples,
                           const OperatingPoint& op, double tau, double kqvc, std::size_t order,
                           bool auto_order) {
    PipelineConfig cfg;
    cfg.spec = {tau, kqvc, Side::device};
    cfg.fit.order = order;
    cfg.auto_order = auto_order;
    return compliance_to_json(run_pipeline(to_response(freq_hz, samples, ModelKind::I), op, cfg));
  });

  m.def("_cluster_check", [](const std::vector<Complex>& eigs) {
    const ClusterReport r = cluster_check(eigs);
    py::dict d;
    d["ok"] = r.ok;
    d["slow"] = r.slow;
    d["fast"] = r.fast;
    d["gap_violations"] = r.gap_violations;
    return d;
  });
}
