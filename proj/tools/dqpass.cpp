// dqpass: passivity-based compliance checks for grid-connected devices.
//
// Exit status: 0 pass, 1 criteria not met, 2 input error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dqpass/compliance.hpp"
#include "dqpass/device_models.hpp"
#include "dqpass/error.hpp"
#include "dqpass/io.hpp"
#include "dqpass/network.hpp"
#include "dqpass/passivity.hpp"
#include "dqpass/transforms.hpp"
#include "dqpass/vector_fit.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    dqpass::write_text(out_path, text);
  }
}

struct ScanArgs {
  std::string device;
  std::string params;
  double fmin = 0.2;
  double fmax = 200.0;
  std::size_t points = 400;
  std::string spacing = "log";
  std::string out;
};

int run_scan(const ScanArgs& a) {
  std::string text = dqpass::read_text(a.params);
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw dqpass::InputError("invalid JSON in " + a.params);
  if (!j.contains("kind")) {
    j["kind"] = a.device;
  } else if (j.at("kind") != a.device) {
    throw dqpass::InputError("--device " + a.device + " does not match the params file kind");
  }
  const dqpass::DeviceSpec dev = dqpass::parse_device(j.dump());
  if (const auto* d = std::get_if<dqpass::DroopParams>(&dev.params)) {
    for (const auto& w : dqpass::warnings(*d)) std::cerr << "warning: " << w << '\n';
  }
  const auto grid = dqpass::make_grid(
      a.fmin, a.fmax, a.points, a.spacing == "linear" ? dqpass::Spacing::linear : dqpass::Spacing::log);
  const auto ys = dqpass::device_ys(dev.params, dev.op);
  emit(a.out, dqpass::scan_to_csv(dqpass::sample(ys, grid)));
  return kPass;
}

struct FitArgs {
  std::string input;
  std::size_t order = 10;
  bool auto_order = false;
  double tol = 1e-4;
  std::size_t max_iters = 30;
  std::string weighting = "inverse-magnitude";
  std::string out;
  std::string report;
};

int run_fit(const FitArgs& a) {
  const auto scan = dqpass::parse_scan_csv(dqpass::read_text(a.input));
  dqpass::FitConfig cfg;
  cfg.order = a.order;
  cfg.max_iters = a.max_iters;
  cfg.weighting = a.weighting == "uniform" ? dqpass::Weighting::uniform
                                           : dqpass::Weighting::inverse_magnitude;
  const auto fit = a.auto_order ? dqpass::vector_fit_auto(scan, cfg, a.tol)
                                : dqpass::vector_fit(scan, cfg);
  emit(a.out, dqpass::model_to_json(fit.model));
  if (!a.report.empty()) dqpass::write_text(a.report, dqpass::fit_report_to_json(fit.report));
  std::cerr << "order " << fit.report.order << ", max relative error "
            << fit.report.max_rel_error << '\n';
  return fit.report.max_rel_error <= a.tol ? kPass : kFail;
}

struct CheckArgs {
  std::string model;
  std::string range = "full";
  double fmin = 0.01;
  double fmax = 200.0;
  std::size_t points = 400;
  std::string out;
};

int run_check(const CheckArgs& a) {
  const auto model = dqpass::parse_model(dqpass::read_text(a.model));
  dqpass::VerdictOptions opts;
  opts.low_min_hz = a.fmin;
  opts.high_max_hz = a.fmax;
  opts.points = a.points;
  const auto v = dqpass::passivity_verdict(model, dqpass::parse_band(a.range), opts);
  emit(a.out, dqpass::verdict_to_json(v));
  std::cerr << "passivity (" << a.range << "): " << (v.overall ? "pass" : "fail") << '\n';
  return v.overall ? kPass : kFail;
}

struct TransformArgs {
  std::string model;
  std::string to;
  std::string op;
  double tau = 0.01;
  double kqvc = 0.0;
  std::string side = "device";
  bool invert = false;
  std::string out;
};

int run_transform(const TransformArgs& a) {
  using dqpass::ModelKind;
  auto model = dqpass::parse_model(dqpass::read_text(a.model));
  const ModelKind target = dqpass::parse_model_kind(a.to);
  const dqpass::Side side = a.side == "network" ? dqpass::Side::network : dqpass::Side::device;
  dqpass::TransformSpec spec{a.tau, a.kqvc, side};
  spec.validate();

  std::optional<dqpass::OperatingPoint> op;
  auto need_op = [&]() -> const dqpass::OperatingPoint& {
    if (!op) {
      if (a.op.empty()) throw dqpass::InputError("--op is required for Model I <-> II");
      op = dqpass::parse_operating_point(dqpass::read_text(a.op));
    }
    return *op;
  };

  if (model.kind == ModelKind::I && target != ModelKind::I) {
    model = dqpass::modelI_to_II(model, need_op(), side);
  } else if (model.kind == ModelKind::II && target == ModelKind::I) {
    model = dqpass::modelII_to_I(model, need_op(), side);
  } else if (model.kind == ModelKind::III && target != ModelKind::III) {
    throw dqpass::InputError("conversion out of Model III is not supported");
  }
  if (model.kind == ModelKind::II && a.kqvc > 0.0) {
    model = dqpass::extract_kqvc(model, a.kqvc);
  }
  if (target == ModelKind::III && model.kind == ModelKind::II) {
    model = dqpass::modelII_to_III(model, a.tau);
  }
  if (a.invert) model = dqpass::invert_tf(model);
  emit(a.out, dqpass::model_to_json(model));
  return kPass;
}

struct JacobianArgs {
  std::string network;
  std::string kqvc;
  bool lossless = false;
  std::string out;
};

int run_jacobian(const JacobianArgs& a) {
  auto net = dqpass::parse_network(dqpass::read_text(a.network));
  if (a.lossless) net = net.lossless();
  auto rep = dqpass::build_jlf(net);
  if (!a.kqvc.empty()) {
    rep = dqpass::apply_kqvc(rep, dqpass::parse_contributions(dqpass::read_text(a.kqvc)));
  }
  emit(a.out, dqpass::jacobian_to_json(rep));
  std::cerr << "J_LF^R: min eigenvalue " << rep.min_eig << ", " << rep.zero_count
            << " zero, " << rep.negative_count << " negative\n";
  return rep.negative_count == 0 ? kPass : kFail;
}

struct ComplyArgs {
  std::string scan;
  std::string op;
  double tau = 0.01;
  double kqvc = 0.0;
  std::size_t order = 10;
  bool auto_order = false;
  double fmax_high = 0.0;
  std::string out;
};

int run_comply(const ComplyArgs& a) {
  const auto scan = dqpass::parse_scan_csv(dqpass::read_text(a.scan));
  const auto op = dqpass::parse_operating_point(dqpass::read_text(a.op));
  dqpass::PipelineConfig cfg;
  cfg.spec = {a.tau, a.kqvc, dqpass::Side::device};
  cfg.fit.order = a.order;
  cfg.auto_order = a.auto_order;
  cfg.high_max_hz = a.fmax_high;
  const auto rep = dqpass::run_pipeline(scan, op, cfg);
  emit(a.out, dqpass::compliance_to_json(rep));
  for (const auto& s : rep.steps) {
    std::cerr << "step " << s.index << " " << s.name << ": " << (s.pass ? "pass" : "FAIL");
    if (!s.cause.empty()) std::cerr << " (" << s.cause << ")";
    std::cerr << '\n';
  }
  std::cerr << "overall: " << (rep.overall ? "pass" : "FAIL") << '\n';
  return rep.overall ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Passivity-based compliance checks for grid-connected converter devices"};
  app.require_subcommand(1);

  ScanArgs scan;
  auto* s = app.add_subcommand("scan", "Sample the Model-I admittance of an analytic device");
  s->add_option("--device", scan.device, "droop|vsg|load")
      ->required()
      ->check(CLI::IsMember({"droop", "vsg", "load"}));
  s->add_option("--params", scan.params, "device JSON")->required();
  s->add_option("--fmin", scan.fmin, "Hz");
  s->add_option("--fmax", scan.fmax, "Hz");
  s->add_option("--points", scan.points);
  s->add_option("--spacing", scan.spacing)->check(CLI::IsMember({"log", "linear"}));
  s->add_option("--out", scan.out, "scan CSV (stdout if omitted)");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Vector-fit a scan CSV");
  f->add_option("--input", fit.input, "scan CSV")->required();
  f->add_option("--order", fit.order);
  f->add_flag("--auto-order", fit.auto_order, "double the order until the error target is met");
  f->add_option("--tol", fit.tol, "target max relative error");
  f->add_option("--max-iters", fit.max_iters);
  f->add_option("--weighting", fit.weighting)
      ->check(CLI::IsMember({"uniform", "inverse-magnitude"}));
  f->add_option("--out", fit.out, "model JSON");
  f->add_option("--report", fit.report, "fit report JSON");

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Passivity verdict of a rational model");
  c->add_option("--model", check.model, "model JSON")->required();
  c->add_option("--range", check.range)->check(CLI::IsMember({"low", "high", "full"}));
  c->add_option("--fmin", check.fmin, "lower edge of low/full grids, Hz");
  c->add_option("--fmax", check.fmax, "upper edge of high/full grids, Hz");
  c->add_option("--points", check.points);
  c->add_option("--out", check.out, "verdict JSON");

  TransformArgs tr;
  auto* t = app.add_subcommand("transform", "Convert between Models I, II and III");
  t->add_option("--model", tr.model, "model JSON")->required();
  t->add_option("--to", tr.to, "I|II|III")->required()->check(CLI::IsMember({"I", "II", "III"}));
  t->add_option("--op", tr.op, "operating point JSON");
  t->add_option("--tau", tr.tau, "derivative filter time constant, s");
  t->add_option("--kqvc", tr.kqvc, "Q-V contribution to extract, pu");
  t->add_option("--side", tr.side)->check(CLI::IsMember({"device", "network"}));
  t->add_flag("--invert", tr.invert, "write the inverse system");
  t->add_option("--out", tr.out, "model JSON");

  JacobianArgs jac;
  auto* j = app.add_subcommand("jacobian", "Load-flow Jacobian and its passivity");
  j->add_option("--network", jac.network, "network JSON")->required();
  j->add_option("--kqvc", jac.kqvc, "contributions JSON");
  j->add_flag("--lossless", jac.lossless, "drop series resistance and shunt conductance");
  j->add_option("--out", jac.out, "Jacobian report JSON");

  ComplyArgs comply;
  auto* p = app.add_subcommand("comply", "Run the eight-step compliance procedure");
  p->add_option("--scan", comply.scan, "scan CSV")->required();
  p->add_option("--op", comply.op, "operating point JSON")->required();
  p->add_option("--tau", comply.tau);
  p->add_option("--kqvc", comply.kqvc);
  p->add_option("--order", comply.order);
  p->add_flag("--auto-order", comply.auto_order);
  p->add_option("--fmax-high", comply.fmax_high, "upper edge of the high band (default: scan max)");
  p->add_option("--out", comply.out, "report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (*s) return run_scan(scan);
    if (*f) return run_fit(fit);
    if (*c) return run_check(check);
    if (*t) return run_transform(tr);
    if (*j) return run_jacobian(jac);
    if (*p) return run_comply(comply);
  } catch (const dqpass::InsufficientKqv& e) {
    std::cerr << "fail: " << e.what() << '\n';
    return kFail;
  } catch (const dqpass::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const dqpass::Error& e) {
    std::cerr << "fail: " << e.what() << '\n';
    return kFail;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
