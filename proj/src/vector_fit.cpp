#include "dqpass/vector_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dqpass/error.hpp"

namespace dqpass {

namespace {

constexpr double kRealPoleRel = 1e-10;
constexpr double kSigmaDMin = 1e-8;
constexpr double kConjTol = 1e-8;

/// One basis slot: a real pole, or the upper member of a conjugate pair.
struct Slot {
  Complex pole;
  bool pair = false;
};

std::vector<Slot> make_slots(const std::vector<Complex>& poles) {
  std::vector<Slot> slots;
  for (Complex p : poles) {
    const double tol = kRealPoleRel * std::max(1.0, std::abs(p));
    if (std::abs(p.imag()) <= tol) {
      slots.push_back({Complex(p.real(), 0.0), false});
    } else if (p.imag() > 0.0) {
      slots.push_back({p, true});
    }
  }
  return slots;
}

std::vector<Complex> expand_slots(const std::vector<Slot>& slots) {
  std::vector<Complex> out;
  for (const Slot& s : slots) {
    out.push_back(s.pole);
    if (s.pair) out.push_back(std::conj(s.pole));
  }
  return out;
}

std::size_t state_count(const std::vector<Slot>& slots) {
  std::size_t n = 0;
  for (const Slot& s : slots) n += s.pair ? 2 : 1;
  return n;
}

/// Row of basis values at s: 1/(s-a) for a real pole, and
/// 1/(s-a) + 1/(s-a*),  j/(s-a) - j/(s-a*) for a pair.
Eigen::RowVectorXcd basis_row(const std::vector<Slot>& slots, Complex s) {
  Eigen::RowVectorXcd row(static_cast<Eigen::Index>(state_count(slots)));
  Eigen::Index c = 0;
  const Complex j(0.0, 1.0);
  for (const Slot& sl : slots) {
    if (!sl.pair) {
      row(c++) = 1.0 / (s - sl.pole);
    } else {
      const Complex u = 1.0 / (s - sl.pole);
      const Complex v = 1.0 / (s - std::conj(sl.pole));
      row(c++) = u + v;
      row(c++) = j * u - j * v;
    }
  }
  return row;
}

/// Real block-diagonal pole matrix and input vector used for the sigma zeros.
void pole_matrices(const std::vector<Slot>& slots, Matrix& a, Vector& b) {
  const auto n = static_cast<Eigen::Index>(state_count(slots));
  a = Matrix::Zero(n, n);
  b = Vector::Zero(n);
  Eigen::Index c = 0;
  for (const Slot& sl : slots) {
    if (!sl.pair) {
      a(c, c) = sl.pole.real();
      b(c) = 1.0;
      ++c;
    } else {
      const double re = sl.pole.real();
      const double im = sl.pole.imag();
      a(c, c) = re;
      a(c, c + 1) = im;
      a(c + 1, c) = -im;
      a(c + 1, c + 1) = re;
      b(c) = 2.0;
      c += 2;
    }
  }
}

std::vector<double> sample_weights(const FreqResponse& r, Weighting w) {
  std::vector<double> out(r.samples.size(), 1.0);
  if (w == Weighting::inverse_magnitude) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double nrm = r.samples[k].norm();
      out[k] = nrm > 0.0 ? 1.0 / nrm : 1.0;
    }
  }
  return out;
}

double relative_movement(const std::vector<Complex>& before, const std::vector<Complex>& after) {
  double worst = 0.0;
  for (Complex p : after) {
    double best = std::numeric_limits<double>::infinity();
    for (Complex q : before) best = std::min(best, std::abs(p - q));
    worst = std::max(worst, best / std::max(std::abs(p), 1e-300));
  }
  return worst;
}

/// One pole-relocation step. Returns the zeros of sigma.
std::vector<Complex> relocate(const FreqResponse& r, const std::vector<double>& w,
                              const std::vector<Slot>& slots) {
  const auto n = static_cast<Eigen::Index>(state_count(slots));
  const auto kk = static_cast<Eigen::Index>(r.samples.size());
  const auto p = r.samples.front().rows();
  const auto m = r.samples.front().cols();
  const Eigen::Index n1 = n + 1;
  const Eigen::Index n2 = n + 1;

  std::vector<Eigen::RowVectorXcd> phi(static_cast<std::size_t>(kk));
  for (Eigen::Index k = 0; k < kk; ++k) {
    phi[static_cast<std::size_t>(k)] = basis_row(slots, Complex(0.0, r.grid[static_cast<std::size_t>(k)]));
  }

  Matrix stacked(p * m * n2 + 1, n2);
  Eigen::Index row0 = 0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index jcol = 0; jcol < m; ++jcol) {
      Matrix sys(2 * kk, n1 + n2);
      for (Eigen::Index k = 0; k < kk; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const Complex f = r.samples[ks](i, jcol);
        scale += std::norm(w[ks] * f);
        Eigen::RowVectorXcd full(n1 + n2);
        full.head(n) = phi[ks];
        full(n) = 1.0;
        full.segment(n1, n) = -f * phi[ks];
        full(n1 + n) = -f;
        full *= w[ks];
        sys.row(2 * k) = full.real();
        sys.row(2 * k + 1) = full.imag();
      }
      const Eigen::HouseholderQR<Matrix> qr(sys);
      const Matrix rr = qr.matrixQR().topRows(n1 + n2).triangularView<Eigen::Upper>();
      stacked.middleRows(row0, n2) = rr.bottomRightCorner(n2, n2);
      row0 += n2;
    }
  }
  // Relaxation: Re Σ_k σ(jΩ_k) = K, weighted to the size of the data rows.
  const double beta = std::sqrt(scale) / static_cast<double>(kk);
  Eigen::RowVectorXd norm_row = Eigen::RowVectorXd::Zero(n2);
  for (Eigen::Index k = 0; k < kk; ++k) {
    norm_row.head(n) += phi[static_cast<std::size_t>(k)].real();
  }
  norm_row(n) = static_cast<double>(kk);
  stacked.row(row0) = beta * norm_row;
  Vector rhs = Vector::Zero(stacked.rows());
  rhs(row0) = beta * static_cast<double>(kk);

  // Column scaling for conditioning.
  Vector col_scale = stacked.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < col_scale.size(); ++c) {
    if (col_scale(c) == 0.0) col_scale(c) = 1.0;
  }
  const Matrix scaled = stacked * col_scale.cwiseInverse().asDiagonal();
  Vector x = scaled.colPivHouseholderQr().solve(rhs).cwiseQuotient(col_scale);

  Vector c_sigma = x.head(n);
  double d_sigma = x(n);
  if (std::abs(d_sigma) < kSigmaDMin) {
    // Relaxation collapsed; fall back to d~ = 1.
    const Matrix lhs = stacked.topRows(row0).leftCols(n);
    const Vector b = -stacked.topRows(row0).col(n);
    Vector cs = lhs.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < cs.size(); ++c) {
      if (cs(c) == 0.0) cs(c) = 1.0;
    }
    c_sigma = (lhs * cs.cwiseInverse().asDiagonal()).colPivHouseholderQr().solve(b).cwiseQuotient(cs);
    d_sigma = 1.0;
  }

  Matrix a_bar;
  Vector b_bar;
  pole_matrices(slots, a_bar, b_bar);
  const Matrix h = a_bar - b_bar * c_sigma.transpose() / d_sigma;
  return eig_general(h).values;
}

std::vector<Complex> tidy_poles(std::vector<Complex> poles, bool enforce_stability) {
  for (Complex& p : poles) {
    const double tol = kRealPoleRel * std::max(1.0, std::abs(p));
    if (std::abs(p.imag()) <= tol) p = Complex(p.real(), 0.0);
    if (enforce_stability && p.real() > 0.0) p = Complex(-p.real(), p.imag());
  }
  return poles;
}

/// Residues and feedthrough for fixed poles, all entries at once.
RationalModel identify_residues(const FreqResponse& r, const std::vector<double>& w,
                                const std::vector<Slot>& slots) {
  const auto n = static_cast<Eigen::Index>(state_count(slots));
  const auto kk = static_cast<Eigen::Index>(r.samples.size());
  const auto p = r.samples.front().rows();
  const auto m = r.samples.front().cols();

  Matrix lhs(2 * kk, n + 1);
  Matrix rhs(2 * kk, p * m);
  for (Eigen::Index k = 0; k < kk; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    Eigen::RowVectorXcd row(n + 1);
    row.head(n) = basis_row(slots, Complex(0.0, r.grid[ks]));
    row(n) = 1.0;
    row *= w[ks];
    lhs.row(2 * k) = row.real();
    lhs.row(2 * k + 1) = row.imag();
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const Complex f = w[ks] * r.samples[ks](i, j);
        rhs(2 * k, i * m + j) = f.real();
        rhs(2 * k + 1, i * m + j) = f.imag();
      }
    }
  }
  Vector cs = lhs.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < cs.size(); ++c) {
    if (cs(c) == 0.0) cs(c) = 1.0;
  }
  const Eigen::ColPivHouseholderQR<Matrix> qr(lhs * cs.cwiseInverse().asDiagonal());
  if (qr.rank() < lhs.cols()) {
    throw IllConditioned("residue least-squares problem is rank deficient (rank " +
                         std::to_string(qr.rank()) + " of " + std::to_string(lhs.cols()) +
                         ")");
  }
  const Matrix x = cs.cwiseInverse().asDiagonal() * qr.solve(rhs);

  // Back to pole-residue form.
  std::vector<Complex> poles;
  std::vector<CMatrix> residues;
  Eigen::Index c = 0;
  for (const Slot& sl : slots) {
    CMatrix res(p, m);
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double c1 = x(c, i * m + j);
        const double c2 = sl.pair ? x(c + 1, i * m + j) : 0.0;
        res(i, j) = Complex(c1, c2);
      }
    }
    poles.push_back(sl.pole);
    residues.push_back(res);
    if (sl.pair) {
      poles.push_back(std::conj(sl.pole));
      residues.push_back(res.conjugate());
    }
    c += sl.pair ? 2 : 1;
  }
  Matrix d(p, m);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) d(i, j) = x(n, i * m + j);
  }
  return residues_to_state_space(poles, residues, d, r.kind);
}

}  // namespace

void FitConfig::validate() const {
  if (order < 1) throw InvalidParameter("fit order must be >= 1");
  if (max_iters < 1) throw InvalidParameter("max_iters must be >= 1");
  if (!(pole_relocation_tol > 0.0)) throw InvalidParameter("pole_relocation_tol must be > 0");
}

std::vector<Complex> initial_poles(const FreqGrid& grid, std::size_t n) {
  if (n < 1) throw InvalidParameter("initial_poles needs n >= 1");
  if (grid.empty()) throw BadRange("initial_poles needs a non-empty grid");
  double w_lo = 0.0;
  for (double w : grid.omega()) {
    if (w > 0.0) {
      w_lo = w;
      break;
    }
  }
  const double w_hi = grid.omega().back();
  if (!(w_lo > 0.0)) throw BadRange("grid has no positive frequency");
  const double center = std::sqrt(w_lo * w_hi);

  std::vector<Complex> poles;
  const std::size_t pairs = n / 2;
  for (std::size_t i = 0; i < pairs; ++i) {
    double im = center;
    if (pairs > 1) {
      const double t = static_cast<double>(i) / static_cast<double>(pairs - 1);
      im = std::exp(std::log(w_lo) + t * (std::log(w_hi) - std::log(w_lo)));
    }
    poles.emplace_back(-im / 100.0, im);
    poles.emplace_back(-im / 100.0, -im);
  }
  if (n % 2 == 1) poles.emplace_back(-center, 0.0);
  return poles;
}

RationalModel residues_to_state_space(const std::vector<Complex>& poles,
                                      const std::vector<CMatrix>& residues, const Matrix& d,
                                      ModelKind kind) {
  if (poles.size() != residues.size()) {
    throw InputError("one residue matrix per pole is required");
  }
  const auto p = d.rows();
  const auto m = d.cols();
  for (const CMatrix& r : residues) {
    if (r.rows() != p || r.cols() != m) throw InputError("residue shape differs from D");
  }

  // Pair every complex pole with its conjugate.
  std::vector<Slot> slots;
  std::vector<CMatrix> slot_res;
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const Complex a = poles[i];
    const double tol = kConjTol * std::max(1.0, std::abs(a));
    const double rtol = kConjTol * std::max(1.0, residues[i].norm());
    if (std::abs(a.imag()) <= tol) {
      if (residues[i].imag().norm() > rtol) {
        throw ConjugationViolation("real pole with complex residue");
      }
      slots.push_back({Complex(a.real(), 0.0), false});
      slot_res.push_back(residues[i].real().cast<Complex>());
      continue;
    }
    std::size_t partner = poles.size();
    for (std::size_t k = 0; k < poles.size(); ++k) {
      if (!used[k] && std::abs(poles[k] - std::conj(a)) <= tol) {
        partner = k;
        break;
      }
    }
    if (partner == poles.size()) {
      throw ConjugationViolation("complex pole without conjugate partner");
    }
    if ((residues[partner] - residues[i].conjugate()).norm() > rtol) {
      throw ConjugationViolation("residues of a conjugate pole pair are not conjugate");
    }
    used[partner] = true;
    const bool upper = a.imag() > 0.0;
    slots.push_back({upper ? a : std::conj(a), true});
    slot_res.push_back(upper ? residues[i] : residues[partner]);
  }

  const auto per_col = static_cast<Eigen::Index>(state_count(slots));
  const Eigen::Index n = per_col * m;
  RationalModel out;
  out.A = Matrix::Zero(n, n);
  out.B = Matrix::Zero(n, m);
  out.C = Matrix::Zero(p, n);
  out.D = d;
  out.kind = kind;

  Matrix a_blk;
  Vector b_blk;
  pole_matrices(slots, a_blk, b_blk);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index off = j * per_col;
    out.A.block(off, off, per_col, per_col) = a_blk;
    out.B.block(off, j, per_col, 1) = b_blk;
    Eigen::Index c = off;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const CMatrix& r = slot_res[s];
      if (!slots[s].pair) {
        out.C.col(c++) = r.col(j).real();
      } else {
        out.C.col(c++) = r.col(j).real();
        out.C.col(c++) = r.col(j).imag();
      }
    }
  }
  return out;
}

double max_relative_error(const RationalModel& model, const FreqResponse& response) {
  double worst = 0.0;
  for (std::size_t k = 0; k < response.samples.size(); ++k) {
    const CMatrix& f = response.samples[k];
    const double nrm = f.norm();
    const double err = (eval_tf(model, response.grid[k]) - f).norm();
    worst = std::max(worst, nrm > 0.0 ? err / nrm : err);
  }
  return worst;
}

FitResult vector_fit(const FreqResponse& response, const FitConfig& cfg) {
  cfg.validate();
  response.validate();
  if (response.samples.empty()) throw BadRange("empty frequency response");
  if (response.samples.size() < 2 * cfg.order + 2) {
    throw BadRange("vector fitting of order " + std::to_string(cfg.order) + " needs at least " +
                   std::to_string(2 * cfg.order + 2) + " samples");
  }

  const std::vector<double> w = sample_weights(response, cfg.weighting);
  std::vector<Complex> poles = initial_poles(response.grid, cfg.order);
  FitReport report;
  report.order = cfg.order;

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const std::vector<Slot> slots = make_slots(poles);
    std::vector<Complex> next = tidy_poles(relocate(response, w, slots), cfg.enforce_stability);
    // Keep the representation closed under conjugation.
    next = expand_slots(make_slots(next));
    const double move = relative_movement(poles, next);
    report.pole_movement.push_back(move);
    poles = std::move(next);
    report.iterations = it + 1;
    if (move < cfg.pole_relocation_tol) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged && cfg.require_convergence) {
    throw NoConvergence("pole relocation did not settle within " +
                        std::to_string(cfg.max_iters) + " iterations");
  }

  const std::vector<Slot> slots = make_slots(poles);
  FitResult result;
  result.model = identify_residues(response, w, slots);
  report.poles = expand_slots(slots);
  report.max_rel_error = max_relative_error(result.model, response);
  double sq = 0.0;
  for (std::size_t k = 0; k < response.samples.size(); ++k) {
    sq += (eval_tf(result.model, response.grid[k]) - response.samples[k]).squaredNorm();
  }
  report.rms_error = std::sqrt(sq / static_cast<double>(response.samples.size() *
                                                       response.samples.front().size()));
  result.report = std::move(report);
  return result;
}

FitResult vector_fit_auto(const FreqResponse& response, FitConfig cfg, double target,
                          std::size_t max_order) {
  FitResult best;
  bool have = false;
  for (std::size_t n = 1; n <= max_order && response.samples.size() >= 2 * n + 2; n *= 2) {
    cfg.order = n;
    FitResult fit;
    try {
      fit = vector_fit(response, cfg);
    } catch (const IllConditioned&) {
      continue;
    }
    if (!have || fit.report.max_rel_error < best.report.max_rel_error) {
      best = std::move(fit);
      have = true;
    }
    if (best.report.max_rel_error < target) break;
  }
  if (!have) throw IllConditioned("no fit order produced a well-posed residue problem");
  return best;
}

}  // namespace dqpass
