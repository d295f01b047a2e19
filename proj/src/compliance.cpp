#include "dqpass/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <exception>
#include <sstream>

#include "dqpass/error.hpp"

namespace dqpass {

namespace {

constexpr double kSlowEdge = kTwoPi * kLowBandEdgeHz;    // 62.8 rad/s
constexpr double kFastEdge = kTwoPi * kHighBandEdgeHz;   // 220 rad/s
constexpr double kCoverageSlack = 1e-9;

const char* const kStepNames[8] = {
    "frequency scan",
    "rational fit",
    "slow-fast separation",
    "high-frequency passivity of Y_s",
    "Q-V contribution margin",
    "frequency regulation",
    "properness of the inverse",
    "low-frequency passivity of N_sd",
};

ComplianceReport blank_report() {
  ComplianceReport r;
  for (int i = 0; i < 8; ++i) {
    r.steps[static_cast<std::size_t>(i)].index = i + 1;
    r.steps[static_cast<std::size_t>(i)].name = kStepNames[i];
  }
  return r;
}

void mark(ComplianceReport& r, int step, bool pass, std::string cause = {}) {
  StepOutcome& s = r.steps[static_cast<std::size_t>(step - 1)];
  s.evaluated = true;
  s.pass = pass;
  s.cause = std::move(cause);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void finish(ComplianceReport& r) {
  r.overall = true;
  for (const StepOutcome& s : r.steps) r.overall = r.overall && s.evaluated && s.pass;
}

/// Steps 3-8 on a rational admittance.
void model_steps(ComplianceReport& r, const RationalModel& ys, const OperatingPoint& op,
                 const PipelineConfig& cfg, double high_max_hz) {
  r.ys = ys;
  const FreqGrid low = make_grid(0.01, kLowBandEdgeHz, cfg.low_points);

  // (3) slow-fast separation
  try {
    r.cluster = cluster_check(ys);
    mark(r, 3, r.cluster->ok,
         r.cluster->ok ? "" : std::to_string(r.cluster->gap_violations.size()) +
                                  " eigenvalue(s) between 62.8 and 220 rad/s");
  } catch (const std::exception& e) {
    mark(r, 3, false, e.what());
  }

  // (4) condition (2) on Y_s above 35 Hz
  try {
    if (!(high_max_hz > kHighBandEdgeHz)) {
      throw BadRange("scan does not extend above " + fmt(kHighBandEdgeHz) + " Hz");
    }
    const FreqGrid high = make_grid(kHighBandEdgeHz, high_max_hz, cfg.high_points);
    r.high_verdict = passivity_verdict(ys, high, Band::high);
    const bool ok = r.high_verdict->psd.ok();
    mark(r, 4, ok,
         ok ? "" : "Hermitian part of Y_s has eigenvalue " + fmt(r.high_verdict->psd.minimum()) +
                       " in the high band");
  } catch (const std::exception& e) {
    mark(r, 4, false, e.what());
  }

  // (5) Q-V contribution margin of J_s
  std::optional<RationalModel> js;
  try {
    js = modelI_to_II(ys, op, Side::device);
    r.kqv = kqv_margin(*js, low, cfg.spec.k_qv_c);
    mark(r, 5, r.kqv->ok,
         r.kqv->ok ? "" : "device can export at most k_qv = " + fmt(r.kqv->minimum) +
                              " pu, requested " + fmt(cfg.spec.k_qv_c));
  } catch (const std::exception& e) {
    mark(r, 5, false, e.what());
  }

  // (6) frequency regulation of J_sd after extraction. A failed margin does
  // not stop the extraction, so later diagnostics stay available.
  std::optional<RationalModel> jsd;
  if (js) {
    try {
      RationalModel extracted = *js;
      extracted.D(1, 1) -= cfg.spec.k_qv_c;
      jsd = modelII_to_III(extracted, cfg.spec.tau);
      r.freq_regulation = freq_regulation_check(*jsd, low);
      mark(r, 6, r.freq_regulation->ok,
           r.freq_regulation->ok ? "" : "min Re J_sd(1,1) = " +
                                            fmt(r.freq_regulation->minimum) + " is not positive");
    } catch (const std::exception& e) {
      mark(r, 6, false, e.what());
    }
  } else {
    mark(r, 6, false, "J_s unavailable");
  }

  // (7) properness: both sign conventions reported, pass on the realized J_sd.
  std::optional<RationalModel> nsd;
  try {
    r.properness = properness_report(Matrix2(ys.D), op);
    if (!jsd) throw ImproperInverse("J_sd unavailable");
    r.jsd_feedthrough_det = jsd->D.determinant();
    nsd = invert_tf(*jsd);
    mark(r, 7, true);
  } catch (const std::exception& e) {
    mark(r, 7, false, e.what());
  }

  // (8) passivity of 𝒩_sd below 10 Hz
  if (nsd) {
    try {
      r.nsd = *nsd;
      r.nsd_verdict = passivity_verdict(*nsd, low, Band::low);
      std::string cause;
      if (!r.nsd_verdict->rhp.ok) cause = "right-half-plane poles";
      else if (!r.nsd_verdict->psd.ok()) {
        cause = "Hermitian part not PSD (min " + fmt(r.nsd_verdict->psd.minimum()) + ")";
      } else if (!r.nsd_verdict->axis_ok) {
        cause = "axis pole not simple or residue not PSD";
      }
      mark(r, 8, r.nsd_verdict->overall, cause);
    } catch (const std::exception& e) {
      mark(r, 8, false, e.what());
    }
  } else {
    mark(r, 8, false, "N_sd unavailable");
  }
}

}  // namespace

ClusterReport cluster_check(const std::vector<Complex>& eigenvalues) {
  ClusterReport r;
  for (Complex v : eigenvalues) {
    const double mag = std::abs(v);
    if (mag <= kSlowEdge) {
      r.slow.push_back(v);
    } else if (mag >= kFastEdge) {
      r.fast.push_back(v);
    } else {
      r.gap_violations.push_back(v);
    }
  }
  r.ok = r.gap_violations.empty();
  return r;
}

ClusterReport cluster_check(const RationalModel& model) {
  return cluster_check(eig_general(model.A).values);
}

MarginCurve kqv_margin(const RationalModel& js, const FreqGrid& low_grid, double k_qv_c) {
  MarginCurve c;
  c.grid = low_grid;
  c.threshold = k_qv_c;
  c.minimum = std::numeric_limits<double>::infinity();
  for (double w : low_grid.omega()) {
    const double v = eval_tf(js, w)(1, 1).real();
    c.values.push_back(v);
    c.minimum = std::min(c.minimum, v);
  }
  c.ok = c.minimum >= k_qv_c;
  return c;
}

MarginCurve freq_regulation_check(const RationalModel& jsd, const FreqGrid& low_grid) {
  MarginCurve c;
  c.grid = low_grid;
  c.threshold = 0.0;
  c.minimum = std::numeric_limits<double>::infinity();
  for (double w : low_grid.omega()) {
    const double v = eval_tf(jsd, w)(0, 0).real();
    c.values.push_back(v);
    c.minimum = std::min(c.minimum, v);
  }
  c.ok = c.minimum > 0.0;
  return c;
}

ComplianceReport run_pipeline(const FreqResponse& scan, const OperatingPoint& op,
                              const PipelineConfig& cfg) {
  cfg.spec.validate();
  ComplianceReport r = blank_report();

  // (1) scan coverage
  try {
    scan.validate();
    if (scan.grid.empty()) throw BadRange("empty scan");
    const double lo = scan.grid.hz(0);
    const double hi = scan.grid.hz(scan.grid.size() - 1);
    const bool ok = lo <= cfg.scan_min_hz * (1.0 + kCoverageSlack) &&
                    hi >= cfg.scan_max_hz * (1.0 - kCoverageSlack);
    mark(r, 1, ok,
         ok ? "" : "scan covers " + fmt(lo) + "-" + fmt(hi) + " Hz, required " +
                       fmt(cfg.scan_min_hz) + "-" + fmt(cfg.scan_max_hz) + " Hz");
  } catch (const std::exception& e) {
    mark(r, 1, false, e.what());
    finish(r);
    return r;
  }

  // (2) rational fit
  std::optional<RationalModel> ys;
  try {
    FitResult fit = cfg.auto_order ? vector_fit_auto(scan, cfg.fit, cfg.fit_tolerance)
                                   : vector_fit(scan, cfg.fit);
    r.fit = fit.report;
    ys = std::move(fit.model);
    ys->kind = ModelKind::I;
    const bool ok = r.fit->max_rel_error <= cfg.fit_tolerance;
    mark(r, 2, ok,
         ok ? "" : "max relative fit error " + fmt(r.fit->max_rel_error) + " exceeds " +
                       fmt(cfg.fit_tolerance));
  } catch (const std::exception& e) {
    mark(r, 2, false, e.what());
  }

  const double high_max =
      cfg.high_max_hz > 0.0 ? cfg.high_max_hz : scan.grid.hz(scan.grid.size() - 1);
  if (ys) {
    model_steps(r, *ys, op, cfg, high_max);
  } else {
    for (int s = 3; s <= 8; ++s) mark(r, s, false, "no rational model");
  }
  finish(r);
  return r;
}

ComplianceReport run_pipeline(const RationalModel& ys, const OperatingPoint& op,
                              const PipelineConfig& cfg) {
  cfg.spec.validate();
  ys.validate();
  ComplianceReport r = blank_report();
  mark(r, 1, true);
  mark(r, 2, true);
  const double high_max = cfg.high_max_hz > 0.0 ? cfg.high_max_hz : cfg.scan_max_hz;
  model_steps(r, ys, op, cfg, high_max);
  finish(r);
  return r;
}

}  // namespace dqpass
