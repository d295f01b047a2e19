#include "dqpass/passivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dqpass/error.hpp"

namespace dqpass {

namespace {

constexpr double kGridPoleRel = 1e-6;
constexpr double kClusterRel = 1e-6;
constexpr int kContourPoints = 64;
constexpr double kLaurentRel = 1e-8;

double scale_of(Complex z) { return std::max(1.0, std::abs(z)); }

std::vector<Complex> axis_eigenvalues(const Spectrum& spec) {
  std::vector<Complex> out;
  for (Complex v : spec.values) {
    if (std::abs(v.real()) <= kAxisPoleTol) out.push_back(v);
  }
  return out;
}

void collect_violations(PsdCurve& curve) {
  const std::size_t n = curve.min_eig.size();
  std::size_t i = 0;
  while (i < n) {
    if (!(curve.min_eig[i] < -kPsdTol)) {
      ++i;
      continue;
    }
    ViolationBand band;
    band.f_lo_hz = curve.grid.hz(i);
    band.worst = curve.min_eig[i];
    std::size_t j = i;
    while (j < n && curve.min_eig[j] < -kPsdTol) {
      band.worst = std::min(band.worst, curve.min_eig[j]);
      ++j;
    }
    band.f_hi_hz = curve.grid.hz(j - 1);
    curve.violations.push_back(band);
    i = j;
  }
}

PsdCurve curve_from_samples(const FreqGrid& grid, const std::vector<CMatrix>& samples) {
  PsdCurve curve;
  curve.grid = grid;
  curve.eigs.reserve(samples.size());
  curve.min_eig.reserve(samples.size());
  for (const CMatrix& g : samples) {
    CMatrix h = hermitian_part(g);
    // Remove rounding asymmetry before the Hermitian test.
    h = 0.5 * (h + h.adjoint()).eval();
    std::vector<double> ev = eig_hermitian(h);
    curve.min_eig.push_back(ev.empty() ? 0.0 : ev.front());
    curve.eigs.push_back(std::move(ev));
  }
  collect_violations(curve);
  return curve;
}

bool in_band(double omega, Band band, const FreqGrid& grid) {
  const double hi = grid.empty() ? 0.0 : grid.omega().back() * (1.0 + 1e-12);
  const double lo = grid.empty() ? 0.0 : grid.omega().front() * (1.0 - 1e-12);
  switch (band) {
    case Band::low:
      return omega <= hi;
    case Band::high:
      return omega >= lo && omega <= hi;
    case Band::full:
      return true;
  }
  return true;
}

}  // namespace

std::string_view to_string(Band band) {
  switch (band) {
    case Band::low:
      return "low";
    case Band::high:
      return "high";
    case Band::full:
      return "full";
  }
  return "?";
}

Band parse_band(std::string_view text) {
  if (text == "low") return Band::low;
  if (text == "high") return Band::high;
  if (text == "full") return Band::full;
  throw InputError("unknown range '" + std::string(text) + "' (expected low|high|full)");
}

RhpCheck check_rhp_poles(const RationalModel& model) {
  RhpCheck out;
  for (Complex v : eig_general(model.A).values) {
    if (v.real() > kAxisPoleTol) out.poles.push_back(v);
  }
  out.ok = out.poles.empty();
  return out;
}

bool PsdCurve::ok_in(RangeTag tag) const {
  for (std::size_t i = 0; i < min_eig.size(); ++i) {
    if (grid.tag(i) == tag && min_eig[i] < -kPsdTol) return false;
  }
  return true;
}

double PsdCurve::minimum() const {
  if (min_eig.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(min_eig.begin(), min_eig.end());
}

PsdCurve check_psd_spectrum(const RationalModel& model, const FreqGrid& grid) {
  const auto axis = axis_eigenvalues(eig_general(model.A));
  for (Complex p : axis) {
    const double wp = std::abs(p.imag());
    for (double w : grid.omega()) {
      if (std::abs(w - wp) <= kGridPoleRel * std::max(wp, 1.0)) {
        throw GridHitsPole("grid point " + std::to_string(w) +
                           " rad/s coincides with an axis pole");
      }
    }
  }
  return curve_from_samples(grid, sample(model, grid).samples);
}

PsdCurve check_psd_spectrum(const FreqResponse& response) {
  response.validate();
  return curve_from_samples(response.grid, response.samples);
}

std::vector<AxisPole> check_axis_poles(const RationalModel& model) {
  const Spectrum spec = eig_general(model.A);
  std::vector<AxisPole> out;
  std::vector<bool> used(spec.size(), false);

  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Complex seed = spec.values[i];
    if (used[i] || std::abs(seed.real()) > kAxisPoleTol || seed.imag() < -kAxisPoleTol) continue;

    // Cluster: every eigenvalue close to the seed, including the slightly
    // off-axis members of a split Jordan block.
    const Complex center(0.0, std::max(0.0, seed.imag()));
    const double cluster_tol = kClusterRel * scale_of(center);
    std::size_t mult = 0;
    double rho = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double d = std::abs(spec.values[k] - center);
      if (d <= cluster_tol) {
        used[k] = true;
        ++mult;
      } else {
        rho = std::min(rho, d);
      }
    }

    const double r = std::min(rho / 4.0, 1e-2 * scale_of(center));
    const auto p = static_cast<Eigen::Index>(model.outputs());
    const auto m = static_cast<Eigen::Index>(model.inputs());
    const int max_order = static_cast<int>(std::max<std::size_t>(mult, 1));
    std::vector<CMatrix> laurent(static_cast<std::size_t>(max_order) + 1, CMatrix::Zero(p, m));
    double g_max = 0.0;
    for (int q = 0; q < kContourPoints; ++q) {
      const double theta = kTwoPi * q / kContourPoints;
      const Complex unit = std::polar(1.0, theta);
      const CMatrix g = eval_at(model, center + r * unit);
      g_max = std::max(g_max, g.norm());
      for (int k = 1; k <= max_order; ++k) {
        laurent[static_cast<std::size_t>(k)] += g * (std::pow(r, k) * std::pow(unit, k));
      }
    }
    for (auto& a : laurent) a /= static_cast<double>(kContourPoints);

    AxisPole pole;
    pole.omega = center.imag();
    pole.multiplicity = mult;
    pole.residue = laurent[1];
    for (int k = 2; k <= max_order; ++k) {
      if (laurent[static_cast<std::size_t>(k)].norm() > kLaurentRel * g_max * std::pow(r, k)) {
        pole.simple = false;
      }
    }
    const double tol = kPsdTol * std::max(pole.residue.norm(), g_max * r);
    const CMatrix& res = pole.residue;
    const bool hermitian = (res - res.adjoint()).norm() <= tol;
    bool psd = false;
    if (hermitian) {
      const CMatrix h = 0.5 * (res + res.adjoint());
      const auto ev = eig_hermitian(h);
      psd = ev.empty() || ev.front() >= -tol;
    }
    pole.residue_psd = hermitian && psd;
    out.push_back(std::move(pole));
  }
  return out;
}

std::vector<AxisPole> check_axis_poles(const FreqResponse&) {
  throw NotRational("axis-pole check needs a rational model; fit the response first");
}

FreqGrid band_grid(Band band, const VerdictOptions& opts) {
  switch (band) {
    case Band::low:
      return make_grid(opts.low_min_hz, kLowBandEdgeHz, opts.points);
    case Band::high:
      return make_grid(kHighBandEdgeHz, opts.high_max_hz, opts.points);
    case Band::full:
      return make_grid(opts.low_min_hz, opts.high_max_hz, opts.points);
  }
  throw InputError("unknown band");
}

PassivityVerdict passivity_verdict(const RationalModel& model, Band band,
                                   const VerdictOptions& opts) {
  return passivity_verdict(model, band_grid(band, opts), band);
}

PassivityVerdict passivity_verdict(const RationalModel& model, const FreqGrid& grid,
                                   Band band) {
  model.validate();
  PassivityVerdict v;
  v.band = band;
  v.rhp = check_rhp_poles(model);
  v.psd = check_psd_spectrum(model, grid);
  v.psd_ok_low = v.psd.ok_in(RangeTag::low);
  v.psd_ok_high = v.psd.ok_in(RangeTag::high);
  for (AxisPole& p : check_axis_poles(model)) {
    if (!in_band(p.omega, band, grid)) continue;
    if (!p.simple || !p.residue_psd) v.axis_ok = false;
    v.axis_poles.push_back(std::move(p));
  }
  v.overall = v.rhp.ok && v.psd.ok() && v.axis_ok;
  return v;
}

}  // namespace dqpass
