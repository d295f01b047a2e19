#include "dqpass/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

#include "dqpass/error.hpp"
#include "dqpass/transforms.hpp"

namespace dqpass {

namespace {

constexpr double kTraceTol = 1e-10;
constexpr double kSymTol = 1e-12;

std::vector<Complex> bus_voltages(const NetworkSpec& net) {
  std::vector<Complex> v;
  v.reserve(net.buses.size());
  for (const Bus& b : net.buses) v.push_back(std::polar(b.vm, b.va));
  return v;
}

std::vector<Complex> power_at(const CMatrix& y, const std::vector<Complex>& v) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Eigen::VectorXcd vv(n);
  for (Eigen::Index i = 0; i < n; ++i) vv(i) = v[static_cast<std::size_t>(i)];
  const Eigen::VectorXcd cur = y * vv;
  std::vector<Complex> s(v.size());
  for (Eigen::Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = vv(i) * std::conj(cur(i));
  return s;
}

Matrix symmetric_check(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw NotSymmetric(std::string(what) + " must be square");
  if ((m - m.transpose()).norm() > kSymTol * std::max(1.0, m.norm())) {
    throw NotSymmetric(std::string(what) + " must be symmetric");
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

void NetworkSpec::validate() const {
  if (buses.empty()) throw InputError("network has no buses");
  if (!(base_mva > 0.0)) throw InvalidParameter("base_mva must be positive");
  std::set<int> ids;
  for (const Bus& b : buses) {
    if (!ids.insert(b.id).second) throw InputError("duplicate bus id " + std::to_string(b.id));
    if (!(b.vm > 0.0) || !std::isfinite(b.vm)) {
      throw InvalidParameter("bus " + std::to_string(b.id) + ": vm must be positive");
    }
    if (!std::isfinite(b.va) || !std::isfinite(b.gs) || !std::isfinite(b.bs)) {
      throw InvalidParameter("bus " + std::to_string(b.id) + ": non-finite data");
    }
  }
  for (const Branch& br : branches) {
    index_of(br.from);
    index_of(br.to);
    if (br.from == br.to) throw InputError("branch connects a bus to itself");
    if (br.r == 0.0 && br.x == 0.0) throw InvalidParameter("branch with zero impedance");
    if (!std::isfinite(br.r) || !std::isfinite(br.x) || !std::isfinite(br.b)) {
      throw InvalidParameter("branch with non-finite data");
    }
  }

  // Connectivity by breadth-first search from the first bus.
  std::vector<std::vector<std::size_t>> adj(buses.size());
  for (const Branch& br : branches) {
    const std::size_t a = index_of(br.from);
    const std::size_t b = index_of(br.to);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(buses.size(), false);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const std::size_t u = todo.front();
    todo.pop();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        todo.push(v);
      }
    }
  }
  if (reached != buses.size()) {
    throw DisconnectedNetwork("network graph is not connected (" + std::to_string(reached) +
                              " of " + std::to_string(buses.size()) + " buses reachable)");
  }
}

std::size_t NetworkSpec::index_of(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return i;
  }
  throw UnknownBus("unknown bus id " + std::to_string(id));
}

NetworkSpec NetworkSpec::lossless() const {
  NetworkSpec out = *this;
  for (Branch& br : out.branches) br.r = 0.0;
  for (Bus& b : out.buses) b.gs = 0.0;
  return out;
}

CMatrix ybus(const NetworkSpec& net) {
  const auto n = static_cast<Eigen::Index>(net.buses.size());
  CMatrix y = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Bus& b = net.buses[static_cast<std::size_t>(i)];
    y(i, i) += Complex(b.gs, b.bs);
  }
  for (const Branch& br : net.branches) {
    const auto a = static_cast<Eigen::Index>(net.index_of(br.from));
    const auto b = static_cast<Eigen::Index>(net.index_of(br.to));
    const Complex ys = 1.0 / Complex(br.r, br.x);
    const Complex half(0.0, 0.5 * br.b);
    y(a, a) += ys + half;
    y(b, b) += ys + half;
    y(a, b) -= ys;
    y(b, a) -= ys;
  }
  return y;
}

std::vector<Complex> injections(const NetworkSpec& net) {
  return power_at(ybus(net), bus_voltages(net));
}

JacobianReport summarize_jlf(std::vector<int> bus_ids, Matrix jlf) {
  JacobianReport rep;
  rep.bus_ids = std::move(bus_ids);
  rep.jlf = std::move(jlf);
  rep.symmetry_defect = (rep.jlf - rep.jlf.transpose()).norm();
  const Matrix sym = rep.jlf + rep.jlf.transpose();
  const Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NoConvergence("J_LF eigenvalues did not converge");
  const Vector& ev = es.eigenvalues();
  rep.eigs.assign(ev.data(), ev.data() + ev.size());
  std::sort(rep.eigs.begin(), rep.eigs.end());
  rep.min_eig = rep.eigs.empty() ? 0.0 : rep.eigs.front();
  rep.min_nonzero_eig = 0.0;
  bool found = false;
  for (double e : rep.eigs) {
    if (std::abs(e) <= kJlfZeroTol) {
      ++rep.zero_count;
    } else {
      if (e < 0.0) ++rep.negative_count;
      if (!found) {
        rep.min_nonzero_eig = e;
        found = true;
      }
    }
  }
  return rep;
}

JacobianReport build_jlf(const NetworkSpec& net) {
  net.validate();
  const auto n = static_cast<Eigen::Index>(net.buses.size());
  const CMatrix y = ybus(net);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Bus& b = net.buses[static_cast<std::size_t>(i)];
    v(i) = std::polar(b.vm, b.va);
  }
  const Eigen::VectorXcd cur = y * v;
  const CMatrix dv = v.asDiagonal();
  const CMatrix dcur = cur.asDiagonal();
  const Complex j(0.0, 1.0);
  // S = diag(V) conj(Y V)
  //   ∂S/∂φ   = j diag(V) conj(diag(I) - Y diag(V))
  //   ∂S/∂V_n = diag(V) conj(Y diag(V)) + conj(diag(I)) diag(V)   (V_n = |V|/V_o)
  const CMatrix ds_dphi = j * dv * (dcur - y * dv).conjugate();
  const CMatrix ds_dvn = dv * (y * dv).conjugate() + dcur.conjugate() * dv;

  Matrix jlf(2 * n, 2 * n);
  jlf.topLeftCorner(n, n) = ds_dphi.real();
  jlf.topRightCorner(n, n) = ds_dvn.real();
  jlf.bottomLeftCorner(n, n) = ds_dphi.imag();
  jlf.bottomRightCorner(n, n) = ds_dvn.imag();

  std::vector<int> ids;
  for (const Bus& b : net.buses) ids.push_back(b.id);
  return summarize_jlf(std::move(ids), std::move(jlf));
}

Matrix jlf_finite_difference(const NetworkSpec& net, double step) {
  net.validate();
  const std::size_t n = net.buses.size();
  const CMatrix y = ybus(net);
  const std::vector<Complex> v0 = bus_voltages(net);
  const auto nn = static_cast<Eigen::Index>(n);
  Matrix jac(2 * nn, 2 * nn);
  for (std::size_t k = 0; k < n; ++k) {
    for (int var = 0; var < 2; ++var) {
      std::vector<Complex> vp = v0;
      std::vector<Complex> vm = v0;
      if (var == 0) {
        vp[k] *= std::polar(1.0, step);
        vm[k] *= std::polar(1.0, -step);
      } else {
        vp[k] *= 1.0 + step;
        vm[k] *= 1.0 - step;
      }
      const std::vector<Complex> sp = power_at(y, vp);
      const std::vector<Complex> sm = power_at(y, vm);
      const auto col = static_cast<Eigen::Index>(var) * nn + static_cast<Eigen::Index>(k);
      for (std::size_t i = 0; i < n; ++i) {
        const Complex d = (sp[i] - sm[i]) / (2.0 * step);
        jac(static_cast<Eigen::Index>(i), col) = d.real();
        jac(nn + static_cast<Eigen::Index>(i), col) = d.imag();
      }
    }
  }
  return jac;
}

JacobianReport apply_kqvc(const JacobianReport& rep, const std::map<int, double>& contributions) {
  Matrix jlf = rep.jlf;
  const auto n = static_cast<Eigen::Index>(rep.bus_ids.size());
  for (const auto& [id, k] : contributions) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
      throw InvalidParameter("k_qv^c for bus " + std::to_string(id) + " must be >= 0");
    }
    const auto it = std::find(rep.bus_ids.begin(), rep.bus_ids.end(), id);
    if (it == rep.bus_ids.end()) throw UnknownBus("unknown bus id " + std::to_string(id));
    const auto i = static_cast<Eigen::Index>(it - rep.bus_ids.begin());
    jlf(n + i, n + i) += k;
  }
  return summarize_jlf(rep.bus_ids, std::move(jlf));
}

FeedthroughTraceReport network_feedthrough_check(const Matrix& d1,
                                            const std::vector<OperatingPoint>& ops, double tau) {
  const Matrix d1s = symmetric_check(d1, "D1");
  if (static_cast<std::size_t>(d1s.rows()) != ops.size()) {
    throw InputError("one operating point per bus of D1 is required");
  }
  if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");
  const auto n = d1s.rows();
  Matrix e = Matrix::Zero(2 * n, 2 * n);
  Matrix c = Matrix::Zero(2 * n, 2 * n);
  Matrix f = Matrix::Zero(2 * n, 2 * n);
  Matrix dn = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const OperatingPoint& op = ops[static_cast<std::size_t>(a)];
    e.block(2 * a, 2 * a, 2, 2) = op.e_matrix();
    c.block(2 * a, 2 * a, 2, 2) = op.c_matrix();
    f.block(2 * a, 2 * a, 2, 2) = op.f_matrix();
    for (Eigen::Index b = 0; b < n; ++b) {
      dn.block(2 * a, 2 * b, 2, 2) = d1s(a, b) * Matrix::Identity(2, 2);
    }
  }
  FeedthroughTraceReport r;
  r.d_j = (e * dn + c) * f;
  r.d_jd = tau * r.d_j;
  r.sym_j = r.d_j + r.d_j.transpose();
  r.trace_j = r.sym_j.trace();
  r.trace_jd = (r.d_jd + r.d_jd.transpose()).trace();
  r.trace_zero = std::abs(r.trace_j) <= kTraceTol && std::abs(r.trace_jd) <= kTraceTol;

  // Per bus: 2 [[i_D v_Q - i_Q v_D, i_D v_D + i_Q v_Q], [same, -(i_D v_Q - i_Q v_D)]].
  r.explicit_sym = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const OperatingPoint& op = ops[static_cast<std::size_t>(a)];
    const double u = op.i_d() * op.v_q() - op.i_q() * op.v_d();
    const double w = op.i_d() * op.v_d() + op.i_q() * op.v_q();
    r.explicit_sym.block(2 * a, 2 * a, 2, 2) << 2.0 * u, 2.0 * w, 2.0 * w, -2.0 * u;
  }
  return r;
}

FeedthroughTraceReport network_feedthrough_check(const Matrix& d1, const OperatingPoint& op,
                                            double tau) {
  return network_feedthrough_check(
      d1, std::vector<OperatingPoint>(static_cast<std::size_t>(d1.rows()), op), tau);
}

JndAxisReport jnd_axis_pole(const Matrix& jlf, double tau) {
  if (jlf.rows() != jlf.cols() || jlf.rows() == 0) throw InputError("J_LF must be square");
  JndAxisReport r;
  r.symmetry_defect = (jlf - jlf.transpose()).norm();
  const Matrix sym = 0.5 * (jlf + jlf.transpose());
  const RationalModel jnd = modelII_to_III(static_model(sym, ModelKind::II), tau);
  const auto poles = check_axis_poles(jnd);
  r.simple = true;
  r.residue_psd = true;
  bool found = false;
  for (const AxisPole& p : poles) {
    if (p.omega > kAxisPoleTol) continue;
    found = true;
    r.simple = r.simple && p.simple;
    r.residue_psd = r.residue_psd && p.residue_psd;
  }
  if (!found) {
    r.simple = false;
    r.residue_psd = false;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  r.residue_min_eig = es.eigenvalues().minCoeff();
  r.ok = r.simple && r.residue_psd;
  return r;
}

}  // namespace dqpass
