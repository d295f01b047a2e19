#pragma once

// File formats: device / operating point / network JSON, scan CSV, model JSON,
// and the report documents written by the command-line tool. Readers throw
// InputError (or a subclass) on malformed content.

#include <map>
#include <string>

#include "dqpass/compliance.hpp"
#include "dqpass/device_models.hpp"
#include "dqpass/network.hpp"
#include "dqpass/passivity.hpp"
#include "dqpass/vector_fit.hpp"

namespace dqpass {

struct DeviceSpec {
  DeviceParams params;
  OperatingPoint op;
};

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// {"kind": "droop|vsg|load", "params": {...}, "operating_point": {...}}
/// VSG currents may be omitted; they are then taken from the stator equation.
DeviceSpec parse_device(const std::string& json_text);

/// {"vD0":…, "vQ0":…, "iD0":…, "iQ0":…}, optionally wrapped in "operating_point".
OperatingPoint parse_operating_point(const std::string& json_text);

NetworkSpec parse_network(const std::string& json_text);
std::map<int, double> parse_contributions(const std::string& json_text);

/// Header freq_hz,re_y11,im_y11,re_y12,im_y12,re_y21,im_y21,re_y22,im_y22.
FreqResponse parse_scan_csv(const std::string& csv_text, ModelKind kind = ModelKind::I);
std::string scan_to_csv(const FreqResponse& response);

RationalModel parse_model(const std::string& json_text);
std::string model_to_json(const RationalModel& model);

std::string verdict_to_json(const PassivityVerdict& verdict);
std::string fit_report_to_json(const FitReport& report);
std::string jacobian_to_json(const JacobianReport& report);
std::string compliance_to_json(const ComplianceReport& report);

}  // namespace dqpass
