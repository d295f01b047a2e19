#pragma once

// The eight-step device compliance procedure: scan, fit, slow/fast separation,
// high-frequency passivity of the admittance, Q-V contribution, frequency
// regulation, properness, and low-frequency passivity of 𝒩_sd.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dqpass/lti.hpp"
#include "dqpass/operating_point.hpp"
#include "dqpass/passivity.hpp"
#include "dqpass/transforms.hpp"
#include "dqpass/vector_fit.hpp"

namespace dqpass {

/// |λ| <= 62.8 rad/s is slow, |λ| >= 220 rad/s is fast; anything between
/// breaks the separation.
struct ClusterReport {
  std::vector<Complex> slow;
  std::vector<Complex> fast;
  std::vector<Complex> gap_violations;
  bool ok = true;
};

ClusterReport cluster_check(const std::vector<Complex>& eigenvalues);
ClusterReport cluster_check(const RationalModel& model);

struct MarginCurve {
  FreqGrid grid;
  std::vector<double> values;
  double minimum = 0.0;
  double threshold = 0.0;
  bool ok = false;
};

/// Re J_s(2,2)(jΩ) over the grid; ok iff the minimum is >= k_qv_c.
MarginCurve kqv_margin(const RationalModel& js, const FreqGrid& low_grid, double k_qv_c);

/// Re J_sd(1,1)(jΩ) over the grid; ok iff the minimum is > 0.
MarginCurve freq_regulation_check(const RationalModel& jsd, const FreqGrid& low_grid);

struct PipelineConfig {
  TransformSpec spec;
  FitConfig fit;
  bool auto_order = false;
  double fit_tolerance = 1e-4;
  double scan_min_hz = 0.2;   ///< required scan coverage
  double scan_max_hz = 200.0;
  /// Upper end of the high band; 0 means the scan maximum.
  double high_max_hz = 0.0;
  std::size_t low_points = 200;
  std::size_t high_points = 400;
};

struct StepOutcome {
  int index = 0;
  std::string name;
  bool evaluated = false;
  bool pass = false;
  std::string cause;  ///< empty on success
};

struct ComplianceReport {
  std::array<StepOutcome, 8> steps;
  std::optional<FitReport> fit;
  std::optional<ClusterReport> cluster;
  std::optional<PassivityVerdict> high_verdict;
  std::optional<MarginCurve> kqv;
  std::optional<MarginCurve> freq_regulation;
  std::optional<PropernessReport> properness;
  std::optional<double> jsd_feedthrough_det;
  std::optional<PassivityVerdict> nsd_verdict;
  std::optional<RationalModel> ys;   ///< fitted admittance
  std::optional<RationalModel> nsd;  ///< 𝒩_sd used in the last step
  bool overall = false;
};

/// Full procedure starting from a sampled Model-I admittance.
ComplianceReport run_pipeline(const FreqResponse& scan, const OperatingPoint& op,
                              const PipelineConfig& cfg);

/// Same procedure on an admittance that is already rational (steps 1-2 are
/// recorded as passed without fitting).
ComplianceReport run_pipeline(const RationalModel& ys, const OperatingPoint& op,
                              const PipelineConfig& cfg);

}  // namespace dqpass
