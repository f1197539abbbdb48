#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfheat/lorentz.hpp"
#include "halfheat/operators.hpp"
#include "halfheat/solver.hpp"

namespace halfheat {

// ---------------------------------------------------------------------------
// Decay-exponent fits
// ---------------------------------------------------------------------------

/// Least-squares log-log fit of a norm decay against a theoretical
/// exponent.  The deviation is reported, never clamped.
struct ExponentFit {
  std::vector<double> times;
  std::vector<double> norms;
  double slope = 0.0;
  double theory = 0.0;
  double deviation = 0.0;  // |slope - theory| / |theory|
};

namespace detail {

inline ExponentFit fit_power_law(std::vector<double> times, std::vector<double> norms,
                                 double theory) {
  if (times.size() < 6)
    throw std::invalid_argument("exponent fit: need at least 6 sample times");
  if (!(times.back() / times.front() >= 10.0))
    throw std::invalid_argument("exponent fit: sample times must span at least one decade");
  double max_norm = 0.0;
  for (double v : norms) max_norm = std::max(max_norm, v);
  if (max_norm < 1e-13)
    throw std::range_error("exponent fit: norms at floating noise floor, increase the amplitude");
  const std::size_t m = times.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(times[i]), y = std::log(norms[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  ExponentFit fit;
  fit.times = std::move(times);
  fit.norms = std::move(norms);
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.theory = theory;
  fit.deviation = std::abs(fit.slope - theory) / std::max(std::abs(theory), 1e-300);
  return fit;
}

inline void require_indices(double d1, double d2) {
  if (!(1.0 < d1 && d1 < d2 && std::isfinite(d2)))
    throw std::invalid_argument("decay fit: indices must satisfy 1 < d1 < d2 < infinity");
}

}  // namespace detail

/// Trace decay: slope of log ||[E(t)u0]|_0||_{(d2,r)} vs log t against
/// -(n/(2 d1) - (n-1)/(2 d2)).  Meaningful for (asymptotically)
/// homogeneous u0 of degree -n/d1.
inline ExponentFit fit_trace_decay(const GridFunction& u0, double d1, double d2, double r,
                                   const std::vector<double>& times) {
  detail::require_indices(d1, d2);
  const int n = u0.grid->dimension();
  std::vector<double> norms;
  for (double t : times)
    norms.push_back(lorentz_norm(heat_semigroup_trace(u0, t), {d2, r}));
  const double theory = -(n / (2.0 * d1) - (n - 1) / (2.0 * d2));
  return detail::fit_power_law(times, std::move(norms), theory);
}

enum class G1Target { Boundary, Interior };

/// G1 decay with theory exponents
///   boundary: -((n-1)/(2 d1) - (n-1)/(2 d2) + 1/2)
///   interior: -((n-1)/(2 d1) -   n/(2 d2)   + 1/2)
inline ExponentFit fit_g1_decay(const BoundaryFunction& psi, double d1, double d2,
                                G1Target target, const std::vector<double>& times,
                                double r = LorentzIndex::infinity()) {
  detail::require_indices(d1, d2);
  const int n = psi.grid->dimension();
  std::vector<double> norms;
  for (double t : times) {
    if (target == G1Target::Boundary)
      norms.push_back(lorentz_norm(g1_boundary(psi, t), {d2, r}));
    else
      norms.push_back(lorentz_norm(g1_interior(psi, t), {d2, r}));
  }
  const double theory = target == G1Target::Boundary
                            ? -((n - 1) / (2.0 * d1) - (n - 1) / (2.0 * d2) + 0.5)
                            : -((n - 1) / (2.0 * d1) - n / (2.0 * d2) + 0.5);
  return detail::fit_power_law(times, std::move(norms), theory);
}

// ---------------------------------------------------------------------------
// Yamazaki-type time integrals
// ---------------------------------------------------------------------------

enum class YamazakiKind { G1Boundary, G1Interior, G2 };

struct YamazakiLadder {
  double t_min = 1e-3;
  double t_max = 8.0;
  int rungs = 5;                // each rung halves t_min and doubles t_max
  int nodes_per_octave = 8;     // log-midpoint quadrature density
  double convergence_tol = 0.01;
};

struct YamazakiReport {
  std::vector<double> t_min, t_max, integrals;
  bool converged = false;
  double input_norm = 0.0;   // ||input||_{(d1,1)}
  double empirical_C = 0.0;  // final integral / input norm
};

namespace detail {

template <typename NormAt>
YamazakiReport yamazaki_ladder(NormAt&& weighted_norm, double input_norm,
                               const YamazakiLadder& lad) {
  YamazakiReport rep;
  rep.input_norm = input_norm;
  double lo = lad.t_min, hi = lad.t_max;
  double prev = -1.0;
  for (int rung = 0; rung < lad.rungs; ++rung) {
    const double octaves = std::log2(hi / lo);
    const int nodes = std::max(8, static_cast<int>(std::ceil(octaves * lad.nodes_per_octave)));
    const double du = std::log(hi / lo) / nodes;
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
      const double t = lo * std::exp((i + 0.5) * du);
      acc += weighted_norm(t) * t * du;  // dt = t du
    }
    rep.t_min.push_back(lo);
    rep.t_max.push_back(hi);
    rep.integrals.push_back(acc);
    if (prev >= 0.0) {
      const double denom = std::max(std::abs(acc), 1e-300);
      if (std::abs(acc - prev) / denom < lad.convergence_tol) {
        rep.converged = true;
        prev = acc;
        break;
      }
    }
    prev = acc;
    lo *= 0.5;
    hi *= 2.0;
  }
  if (input_norm == 0.0 && rep.integrals.back() == 0.0) rep.converged = true;
  rep.empirical_C = input_norm > 0.0 ? rep.integrals.back() / input_norm : 0.0;
  return rep;
}

}  // namespace detail

/// Truncated weighted time integral of the (d2,1) norm of a boundary
/// operator against a compactly supported input.  Reports successive
/// ladder values; inconclusive ladders leave converged == false.
inline YamazakiReport check_yamazaki_integral(const BoundaryFunction& psi, double d1, double d2,
                                              YamazakiKind which,
                                              const YamazakiLadder& lad = {}) {
  detail::require_indices(d1, d2);
  if (which == YamazakiKind::G2)
    throw std::invalid_argument("check_yamazaki_integral: G2 takes an interior input");
  const int n = psi.grid->dimension();
  const double expo = which == YamazakiKind::G1Boundary
                          ? (n - 1) / (2.0 * d1) - (n - 1) / (2.0 * d2) - 0.5
                          : (n - 1) / (2.0 * d1) - n / (2.0 * d2) - 0.5;
  const LorentzIndex idx{d2, 1.0};
  auto weighted = [&](double t) {
    const double nrm = which == YamazakiKind::G1Boundary
                           ? lorentz_norm(g1_boundary(psi, t), idx)
                           : lorentz_norm(g1_interior(psi, t), idx);
    return std::pow(t, expo) * nrm;
  };
  return detail::yamazaki_ladder(weighted, lorentz_norm(psi, {d1, 1.0}), lad);
}

inline YamazakiReport check_yamazaki_integral(const GridFunction& phi, double d1, double d2,
                                              const YamazakiLadder& lad = {}) {
  detail::require_indices(d1, d2);
  const int n = phi.grid->dimension();
  const double expo = n / (2.0 * d1) - (n - 1) / (2.0 * d2) - 1.0;
  const LorentzIndex idx{d2, 1.0};
  auto weighted = [&](double t) { return std::pow(t, expo) * lorentz_norm(g2(phi, t), idx); };
  return detail::yamazaki_ladder(weighted, lorentz_norm(phi, {d1, 1.0}), lad);
}

// ---------------------------------------------------------------------------
// Qualitative theorem checks
// ---------------------------------------------------------------------------

struct SelfSimilarityReport {
  double max_defect = 0.0;
  std::size_t compared = 0;
  std::size_t excluded = 0;  // lambda-images outside the trusted core
};

/// Scaling defect of a converged run with homogeneous data: compares
/// lambda^{1/(rho-1)} u(lambda x, lambda^2 t) against u(x,t) over the
/// trusted core |x| <= R / (2 max lambda), values at lambda x by
/// multilinear interpolation.
inline SelfSimilarityReport check_self_similarity(const Solution& sol, double rho,
                                                  const std::vector<double>& lambdas) {
  if (sol.fields.empty()) throw std::invalid_argument("check_self_similarity: empty solution");
  const GridPtr grid = sol.fields.front().interior.grid;
  const double R = grid->spec().radius;
  double lam_max = 1.0;
  for (double l : lambdas) lam_max = std::max({lam_max, l, 1.0 / l});
  const double core = R / (2.0 * lam_max);

  double floor = 0.0;
  for (const auto& fp : sol.fields)
    for (double v : fp.interior.values) floor = std::max(floor, std::abs(v));
  floor *= 1e-8;

  SelfSimilarityReport rep;
  for (double lam : lambdas) {
    const double amp = std::pow(lam, 1.0 / (rho - 1.0));
    for (std::size_t j = 0; j < sol.times.size(); ++j) {
      // locate the level holding lambda^2 t_j
      const double ts = lam * lam * sol.times[j];
      std::size_t js = sol.times.size();
      for (std::size_t k = 0; k < sol.times.size(); ++k)
        if (std::abs(sol.times[k] - ts) <= 1e-9 * ts) js = k;
      if (js == sol.times.size()) continue;

      const auto& u = sol.fields[j].interior;
      const auto& us = sol.fields[js].interior;
      std::vector<double> xs(static_cast<std::size_t>(grid->dimension()));
      for (std::size_t i = 0; i < u.values.size(); ++i) {
        const auto x = grid->interior_centroid(i);
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        if (r2 > core * core) { ++rep.excluded; continue; }
        for (std::size_t a = 0; a < x.size(); ++a) xs[a] = lam * x[a];
        const double scaled = amp * interpolate(us, xs);
        const double defect = std::abs(scaled - u.values[i]) / (std::abs(u.values[i]) + floor);
        rep.max_defect = std::max(rep.max_defect, defect);
        ++rep.compared;
      }
    }
  }
  if (rep.compared == 0)
    throw std::invalid_argument("check_self_similarity: no comparable (cell, level) pairs");
  return rep;
}

struct PositivityReport {
  double min_value = 0.0;
  double max_value = 0.0;
  bool zero_solution = false;
  bool pass = false;  // min > 0 over all cells and levels
};

inline PositivityReport check_positivity(const Solution& sol) {
  PositivityReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  rep.max_value = -std::numeric_limits<double>::infinity();
  for (const auto& fp : sol.fields) {
    for (double v : fp.interior.values) {
      rep.min_value = std::min(rep.min_value, v);
      rep.max_value = std::max(rep.max_value, v);
    }
    for (double v : fp.boundary.values) {
      rep.min_value = std::min(rep.min_value, v);
      rep.max_value = std::max(rep.max_value, v);
    }
  }
  rep.zero_solution = rep.min_value == 0.0 && rep.max_value == 0.0;
  rep.pass = rep.min_value > 0.0;
  return rep;
}

enum class Parity { Symmetric, Antisymmetric };

/// Max symmetry defect |u(T x, t) -+ u(x, t)| over all cells and
/// levels; exact cell permutation, so defects sit at round-off.
inline double check_symmetry(const Solution& sol, GridIsometry iso, Parity parity) {
  if (sol.fields.empty()) throw std::invalid_argument("check_symmetry: empty solution");
  const Grid& g = *sol.fields.front().interior.grid;
  const auto perm = interior_isometry_permutation(g, iso);
  const auto bperm = boundary_isometry_permutation(g, iso);
  const double sign = parity == Parity::Symmetric ? 1.0 : -1.0;
  double defect = 0.0;
  for (const auto& fp : sol.fields) {
    for (std::size_t i = 0; i < fp.interior.values.size(); ++i)
      defect = std::max(defect,
                        std::abs(fp.interior.values[perm[i]] - sign * fp.interior.values[i]));
    for (std::size_t i = 0; i < fp.boundary.values.size(); ++i)
      defect = std::max(defect,
                        std::abs(fp.boundary.values[bperm[i]] - sign * fp.boundary.values[i]));
  }
  return defect;
}

}  // namespace halfheat
