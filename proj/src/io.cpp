#include "dqpass/io.hpp"

#include <fstream>
#include <sstream>
#include <string_view>

#include "json.hpp"

#include "dqpass/error.hpp"

namespace dqpass {

using nlohmann::json;

namespace {

constexpr const char* kScanHeader =
    "freq_hz,re_y11,im_y11,re_y12,im_y12,re_y21,im_y21,re_y22,im_y22";

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

double number(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InputError(std::string("missing field '") + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.is_object() && obj.contains(key) ? number(obj, key) : fallback;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json& v, const char* name, Eigen::Index rows_hint,
                   Eigen::Index cols_hint) {
  if (!v.is_array()) throw InputError(std::string(name) + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  if (rows == 0) return Matrix::Zero(0, std::max<Eigen::Index>(cols_hint, 0));
  Eigen::Index cols = -1;
  for (const json& row : v) {
    if (!row.is_array()) throw InputError(std::string(name) + " rows must be arrays");
    if (cols < 0) cols = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(std::string(name) + " has ragged rows");
    }
  }
  if (cols == 0 && rows_hint >= 0) return Matrix::Zero(rows, 0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const json& x = v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!x.is_number()) throw InputError(std::string(name) + " entries must be numbers");
      m(i, j) = x.get<double>();
    }
  }
  return m;
}

json complex_list(const std::vector<Complex>& values) {
  json out = json::array();
  for (Complex v : values) out.push_back({v.real(), v.imag()});
  return out;
}

json verdict_json(const PassivityVerdict& v) {
  json out;
  out["overall"] = v.overall;
  out["band"] = std::string(to_string(v.band));
  out["rhp_poles"] = complex_list(v.rhp.poles);
  json curve = json::array();
  for (std::size_t i = 0; i < v.psd.eigs.size(); ++i) {
    json row = json::array();
    row.push_back(v.psd.grid.hz(i));
    for (double e : v.psd.eigs[i]) row.push_back(e);
    curve.push_back(std::move(row));
  }
  out["min_eig_curve"] = std::move(curve);
  json axis = json::array();
  for (const AxisPole& p : v.axis_poles) {
    axis.push_back({{"f_hz", p.omega / kTwoPi},
                    {"multiplicity", p.multiplicity},
                    {"simple", p.simple},
                    {"residue_psd", p.residue_psd}});
  }
  out["axis_poles"] = std::move(axis);
  json viol = json::array();
  for (const ViolationBand& b : v.psd.violations) {
    viol.push_back({{"f_lo", b.f_lo_hz}, {"f_hi", b.f_hi_hz}, {"worst", b.worst}});
  }
  out["violations"] = std::move(viol);
  out["psd_ok_low"] = v.psd_ok_low;
  out["psd_ok_high"] = v.psd_ok_high;
  return out;
}

json fit_json(const FitReport& r) {
  return {{"order", r.order},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"max_rel_error", r.max_rel_error},
          {"rms_error", r.rms_error},
          {"pole_movement", r.pole_movement},
          {"poles", complex_list(r.poles)}};
}

json margin_json(const MarginCurve& c) {
  json curve = json::array();
  for (std::size_t i = 0; i < c.values.size(); ++i) curve.push_back({c.grid.hz(i), c.values[i]});
  return {{"minimum", c.minimum}, {"threshold", c.threshold}, {"ok", c.ok}, {"curve", curve}};
}

void split_csv(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

OperatingPoint parse_operating_point(const std::string& json_text) {
  json j = parse_json(json_text);
  if (j.is_object() && j.contains("operating_point")) j = j.at("operating_point");
  return {number(j, "vD0"), number(j, "vQ0"), number(j, "iD0"), number(j, "iQ0")};
}

DeviceSpec parse_device(const std::string& json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw InputError("device JSON needs a string field 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (!j.contains("params")) throw InputError("device JSON needs 'params'");
  if (!j.contains("operating_point")) throw InputError("device JSON needs 'operating_point'");
  const json& p = j.at("params");
  const json& o = j.at("operating_point");

  if (kind == "droop") {
    DroopParams d{number(p, "k_pf"), number(p, "k_qv"), number(p, "tau")};
    validate(d);
    return {d, OperatingPoint(number(o, "vD0"), number(o, "vQ0"), number(o, "iD0"),
                              number(o, "iQ0"))};
  }
  if (kind == "vsg") {
    const double vd = number(o, "vD0");
    const double vq = number(o, "vQ0");
    const double emf = number(p, "E_g");
    const double x = number(p, "x_g");
    const double delta = number(p, "delta_o");
    OperatingPoint op = (o.contains("iD0") || o.contains("iQ0"))
                            ? OperatingPoint(vd, vq, number(o, "iD0"), number(o, "iQ0"))
                            : vsg_operating_point(emf, x, delta, vd, vq);
    VsgParams v = VsgParams::at(number(p, "M"), number(p, "D_m"), emf, x, delta, op);
    validate(v);
    return {v, op};
  }
  if (kind == "load") {
    LoadParams l{number(p, "k_pf"), number(p, "k_pv"), number(p, "k_qf"), number(p, "k_qv"),
                 number_or(p, "tau", 0.01)};
    validate(l);
    return {l, OperatingPoint(number(o, "vD0"), number(o, "vQ0"), number(o, "iD0"),
                              number(o, "iQ0"))};
  }
  throw InputError("unknown device kind '" + kind + "' (expected droop|vsg|load)");
}

NetworkSpec parse_network(const std::string& json_text) {
  const json j = parse_json(json_text);
  NetworkSpec net;
  net.base_mva = number_or(j, "base_mva", 100.0);
  if (!j.contains("buses") || !j.at("buses").is_array()) {
    throw InputError("network JSON needs a 'buses' array");
  }
  for (const json& b : j.at("buses")) {
    Bus bus;
    bus.id = static_cast<int>(number(b, "id"));
    bus.vm = number(b, "vm");
    bus.va = number_or(b, "va_rad", 0.0);
    bus.gs = number_or(b, "gs", 0.0);
    bus.bs = number_or(b, "bs", 0.0);
    net.buses.push_back(bus);
  }
  if (j.contains("branches")) {
    for (const json& b : j.at("branches")) {
      Branch br;
      br.from = static_cast<int>(number(b, "from"));
      br.to = static_cast<int>(number(b, "to"));
      br.r = number_or(b, "r", 0.0);
      br.x = number_or(b, "x", 0.0);
      br.b = number_or(b, "b", 0.0);
      net.branches.push_back(br);
    }
  }
  net.validate();
  return net;
}

std::map<int, double> parse_contributions(const std::string& json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw InputError("contributions JSON must be an object");
  std::map<int, double> out;
  for (const auto& [key, value] : j.items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw InputError("contribution key '" + key + "' is not a bus id");
    }
    if (!value.is_number()) throw InputError("contribution for bus " + key + " must be a number");
    out[id] = value.get<double>();
  }
  return out;
}

FreqResponse parse_scan_csv(const std::string& csv_text, ModelKind kind) {
  std::istringstream in(csv_text);
  std::string line;
  bool header = false;
  std::vector<double> omega;
  std::vector<CMatrix> samples;
  std::vector<std::string> cells;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header) {
      std::string compact;
      for (char c : t) {
        if (c != ' ' && c != '\t') compact.push_back(c);
      }
      if (compact != kScanHeader) {
        throw InputError(std::string("scan CSV header must be '") + kScanHeader + "'");
      }
      header = true;
      continue;
    }
    split_csv(t, cells);
    if (cells.size() != 9) {
      throw InputError("scan CSV line " + std::to_string(line_no) + ": expected 9 columns");
    }
    double v[9];
    for (std::size_t i = 0; i < 9; ++i) {
      try {
        std::size_t used = 0;
        const std::string c = trim(cells[i]);
        v[i] = std::stod(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw InputError("scan CSV line " + std::to_string(line_no) + ": bad number '" +
                         cells[i] + "'");
      }
    }
    omega.push_back(kTwoPi * v[0]);
    CMatrix m(2, 2);
    m << Complex(v[1], v[2]), Complex(v[3], v[4]), Complex(v[5], v[6]), Complex(v[7], v[8]);
    samples.push_back(m);
  }
  if (!header) throw InputError("scan CSV is empty");
  if (samples.empty()) throw InputError("scan CSV has no data rows");
  FreqResponse r;
  r.grid = FreqGrid(std::move(omega), Spacing::log);
  r.samples = std::move(samples);
  r.kind = kind;
  r.validate();
  return r;
}

std::string scan_to_csv(const FreqResponse& response) {
  response.validate();
  std::ostringstream os;
  os.precision(17);
  os << kScanHeader << '\n';
  for (std::size_t k = 0; k < response.samples.size(); ++k) {
    const CMatrix& m = response.samples[k];
    os << response.grid.hz(k);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) os << ',' << m(i, j).real() << ',' << m(i, j).imag();
    }
    os << '\n';
  }
  return os.str();
}

RationalModel parse_model(const std::string& json_text) {
  const json j = parse_json(json_text);
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) throw InputError(std::string("model JSON needs '") + key + "'");
  }
  RationalModel m;
  m.D = matrix_from(j.at("D"), "D", -1, -1);
  m.A = matrix_from(j.at("A"), "A", -1, 0);
  m.B = matrix_from(j.at("B"), "B", -1, m.D.cols());
  m.C = matrix_from(j.at("C"), "C", m.D.rows(), -1);
  if (m.A.rows() == 0) {
    m.A = Matrix::Zero(0, 0);
    m.B = Matrix::Zero(0, m.D.cols());
    m.C = Matrix::Zero(m.D.rows(), 0);
  }
  m.kind = j.contains("kind") ? parse_model_kind(j.at("kind").get<std::string>()) : ModelKind::I;
  m.validate();
  if (j.contains("order") && j.at("order").get<long long>() != m.A.rows()) {
    throw InputError("model 'order' does not match the size of A");
  }
  return m;
}

std::string model_to_json(const RationalModel& model) {
  json j;
  j["order"] = model.states();
  j["A"] = matrix_json(model.A);
  j["B"] = matrix_json(model.B);
  j["C"] = matrix_json(model.C);
  j["D"] = matrix_json(model.D);
  j["kind"] = std::string(to_string(model.kind));
  return j.dump(2) + "\n";
}

std::string verdict_to_json(const PassivityVerdict& verdict) {
  return verdict_json(verdict).dump(2) + "\n";
}

std::string fit_report_to_json(const FitReport& report) { return fit_json(report).dump(2) + "\n"; }

std::string jacobian_to_json(const JacobianReport& report) {
  json j;
  j["bus_ids"] = report.bus_ids;
  j["jlf"] = matrix_json(report.jlf);
  j["eigs"] = report.eigs;
  j["symmetry_defect"] = report.symmetry_defect;
  j["min_eig"] = report.min_eig;
  j["min_nonzero_eig"] = report.min_nonzero_eig;
  j["zero_count"] = report.zero_count;
  j["negative_count"] = report.negative_count;
  j["psd"] = report.negative_count == 0;
  return j.dump(2) + "\n";
}

std::string compliance_to_json(const ComplianceReport& report) {
  json j;
  j["overall"] = report.overall;
  json steps = json::array();
  for (const StepOutcome& s : report.steps) {
    steps.push_back({{"step", s.index},
                     {"name", s.name},
                     {"evaluated", s.evaluated},
                     {"pass", s.pass},
                     {"cause", s.cause}});
  }
  j["steps"] = std::move(steps);

  json diag = json::object();
  if (report.fit) diag["fit"] = fit_json(*report.fit);
  if (report.cluster) {
    diag["cluster"] = {{"ok", report.cluster->ok},
                       {"slow", complex_list(report.cluster->slow)},
                       {"fast", complex_list(report.cluster->fast)},
                       {"gap_violations", complex_list(report.cluster->gap_violations)}};
  }
  if (report.high_verdict) diag["high_frequency_ys"] = verdict_json(*report.high_verdict);
  if (report.kqv) diag["kqv_margin"] = margin_json(*report.kqv);
  if (report.freq_regulation) diag["frequency_regulation"] = margin_json(*report.freq_regulation);
  if (report.properness) {
    json p = {{"det_plus_c", report.properness->det_plus},
              {"det_minus_c", report.properness->det_minus},
              {"proper_plus_c", report.properness->proper_plus},
              {"proper_minus_c", report.properness->proper_minus}};
    if (report.jsd_feedthrough_det) p["jsd_feedthrough_det"] = *report.jsd_feedthrough_det;
    diag["properness"] = std::move(p);
  }
  if (report.nsd_verdict) diag["nsd_low_frequency"] = verdict_json(*report.nsd_verdict);
  j["diagnostics"] = std::move(diag);
  return j.dump(2) + "\n";
}

}  // namespace dqpass
