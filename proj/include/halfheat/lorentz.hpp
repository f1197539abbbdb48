#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "halfheat/grid.hpp"

namespace halfheat {

/// Lorentz index (p,r); r = infinity() selects the weak (Marcinkiewicz) case.
struct LorentzIndex {
  double p;
  double r;

  static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }
  bool weak() const { return std::isinf(r); }

  void validate() const {
    if (!(p > 1.0)) throw std::invalid_argument("LorentzIndex: p must exceed 1");
    if (!(r >= 1.0)) throw std::invalid_argument("LorentzIndex: r must be >= 1 or infinity");
  }
};

/// Exact decreasing rearrangement of a weighted sample set, stored as
/// a right-continuous step function: value values[k] on
/// [breakpoints[k-1], breakpoints[k]) with breakpoints[-1] = 0.
/// Ties in |value| are merged into a single step.
struct StepRearrangement {
  std::vector<double> breakpoints;  // cumulative measures, strictly increasing
  std::vector<double> values;       // nonincreasing, >= 0

  double total_measure() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }

  double eval(double t) const {  // f*(t)
    if (breakpoints.empty() || t >= breakpoints.back()) return 0.0;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    return values[static_cast<std::size_t>(it - breakpoints.begin())];
  }
};

inline StepRearrangement rearrangement(std::span<const double> values,
                                       std::span<const double> measures) {
  if (values.size() != measures.size())
    throw std::invalid_argument("rearrangement: values/measures size mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  StepRearrangement out;
  double cum = 0.0;
  for (std::size_t k : order) {
    const double v = std::abs(values[k]);
    if (!std::isfinite(v)) throw std::invalid_argument("rearrangement: non-finite value");
    cum += measures[k];
    if (!out.values.empty() && out.values.back() == v)
      out.breakpoints.back() = cum;  // merge tie
    else {
      out.values.push_back(v);
      out.breakpoints.push_back(cum);
    }
  }
  return out;
}

inline StepRearrangement rearrangement(const GridFunction& f) {
  return rearrangement(f.values, f.cell_measures());
}
inline StepRearrangement rearrangement(const BoundaryFunction& f) {
  return rearrangement(f.values, f.cell_measures());
}

/// lambda_f(s) = measure of {|f| > s}.
inline double distribution_function(const StepRearrangement& r, double s) {
  if (s < 0.0) throw std::invalid_argument("distribution_function: s must be >= 0");
  // largest breakpoint whose step value exceeds s
  double out = 0.0;
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    if (r.values[k] > s) out = r.breakpoints[k];
    else break;
  }
  return out;
}
inline double distribution_function(const GridFunction& f, double s) {
  return distribution_function(rearrangement(f), s);
}
inline double distribution_function(const BoundaryFunction& f, double s) {
  return distribution_function(rearrangement(f), s);
}

/// Running average f**(t) = (1/t) int_0^t f*.  On the k-th step piece
/// f** = c_k + b_k / t; past the last breakpoint f** = A / t with A
/// the total integral of f*.
struct DoubleStar {
  std::vector<double> breakpoints;  // as in StepRearrangement
  std::vector<double> slope_c, offset_b;
  double total_integral = 0.0;

  double eval(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("DoubleStar: t must be positive");
    if (breakpoints.empty()) return 0.0;
    if (t >= breakpoints.back()) return total_integral / t;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin());
    return slope_c[k] + offset_b[k] / t;
  }
};

inline DoubleStar double_star(const StepRearrangement& r) {
  DoubleStar out;
  out.breakpoints = r.breakpoints;
  out.slope_c.resize(r.values.size());
  out.offset_b.resize(r.values.size());
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    out.slope_c[k] = r.values[k];
    out.offset_b[k] = acc - r.values[k] * prev;  // >= 0 since f* is nonincreasing
    acc += r.values[k] * (r.breakpoints[k] - prev);
    prev = r.breakpoints[k];
  }
  out.total_integral = acc;
  return out;
}

namespace detail {

// 32-point Gauss-Legendre on [-1,1] (abscissae/weights, symmetric half).
inline constexpr double kGaussX[16] = {
    0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745, 0.3318686022821276498,
    0.4213512761306353454, 0.5068999089322293900, 0.5877157572407623290, 0.6630442669302152010,
    0.7321821187402896804, 0.7944837959679424069, 0.8493676137325699701, 0.8963211557660521240,
    0.9349060759377396892, 0.9647622555875064308, 0.9856115115452683354, 0.9972638618494815635};
inline constexpr double kGaussW[16] = {
    0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654, 0.0911738786957638847,
    0.0876520930044038111, 0.0833119242269467552, 0.0781938957870703065, 0.0723457941088485062,
    0.0658222227763618468, 0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
    0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706, 0.0070186100094700966};

template <typename F>
double gauss32(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 16; ++i)
    acc += kGaussW[i] * (f(mid - half * kGaussX[i]) + f(mid + half * kGaussX[i]));
  return acc * half;
}

}  // namespace detail

/// Quasi-norm ||f||*_{(p,r)} from the exact step representation.
inline double quasi_norm_star(const StepRearrangement& r, LorentzIndex idx) {
  idx.validate();
  if (r.values.empty()) return 0.0;
  if (idx.weak()) {
    // f* is right-continuous and nonincreasing, so the sup over each
    // half-open step is attained at its right breakpoint
    double best = 0.0;
    for (std::size_t k = 0; k < r.values.size(); ++k)
      best = std::max(best, std::pow(r.breakpoints[k], 1.0 / idx.p) * r.values[k]);
    return best;
  }
  const double e = idx.r / idx.p;
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    acc += std::pow(r.values[k], idx.r) * (idx.p / idx.r) *
           (std::pow(r.breakpoints[k], e) - std::pow(prev, e));
    prev = r.breakpoints[k];
  }
  return std::pow(acc, 1.0 / idx.r);
}

/// Norm ||f||_{(p,r)} (f** flavor).  For r = infinity the sup of
/// t^{1/p} f**(t) is attained at a breakpoint: on each piece the
/// profile c t^{1/p} + b t^{1/p-1} is quasiconvex, and the tail is
/// decreasing.  Finite r uses closed forms where available and
/// Gauss-Legendre on the remaining smooth pieces.
inline double lorentz_norm(const StepRearrangement& r, LorentzIndex idx) {
  idx.validate();
  if (r.values.empty()) return 0.0;
  const DoubleStar ds = double_star(r);
  if (ds.total_integral == 0.0) return 0.0;
  const double invp = 1.0 / idx.p;
  if (idx.weak()) {
    double best = 0.0;
    for (double t : ds.breakpoints) best = std::max(best, std::pow(t, invp) * ds.eval(t));
    return best;
  }
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < ds.breakpoints.size(); ++k) {
    const double a = prev, b = ds.breakpoints[k];
    const double c = ds.slope_c[k], off = ds.offset_b[k];
    if (off == 0.0) {
      acc += std::pow(c, idx.r) * (idx.p / idx.r) * (std::pow(b, idx.r * invp) - std::pow(a, idx.r * invp));
    } else if (idx.r == 1.0) {
      acc += c * idx.p * (std::pow(b, invp) - std::pow(a, invp)) +
             off * (std::pow(b, invp - 1.0) - std::pow(a, invp - 1.0)) / (invp - 1.0);
    } else {
      acc += detail::gauss32(
          [&](double t) { return std::pow(c + off / t, idx.r) * std::pow(t, idx.r * invp - 1.0); },
          a, b);
    }
    prev = b;
  }
  // tail: f** = A/t for t > t_K, integral converges since p > 1
  const double tK = ds.breakpoints.back();
  acc += std::pow(ds.total_integral, idx.r) * std::pow(tK, idx.r * invp - idx.r) /
         (idx.r - idx.r * invp);
  return std::pow(acc, 1.0 / idx.r);
}

inline double quasi_norm_star(const GridFunction& f, LorentzIndex idx) {
  return quasi_norm_star(rearrangement(f), idx);
}
inline double quasi_norm_star(const BoundaryFunction& f, LorentzIndex idx) {
  return quasi_norm_star(rearrangement(f), idx);
}
inline double lorentz_norm(const GridFunction& f, LorentzIndex idx) {
  return lorentz_norm(rearrangement(f), idx);
}
inline double lorentz_norm(const BoundaryFunction& f, LorentzIndex idx) {
  return lorentz_norm(rearrangement(f), idx);
}

/// Quadrature L^p norm (for the Chebyshev inclusion and L^{(p,p)} checks).
inline double lp_norm(std::span<const double> values, std::span<const double> measures, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    acc += std::pow(std::abs(values[i]), p) * measures[i];
  return std::pow(acc, 1.0 / p);
}
inline double lp_norm(const GridFunction& f, double p) {
  return lp_norm(f.values, f.cell_measures(), p);
}
inline double lp_norm(const BoundaryFunction& f, double p) {
  return lp_norm(f.values, f.cell_measures(), p);
}

/// Composite X_{p,q} norm: weak-(p,infty) of the interior part plus
/// weak-(q,infty) of the boundary trace, both in the f** flavor.
inline double xpq_norm(const GridFunction& interior, const BoundaryFunction& boundary,
                       double p, double q) {
  return lorentz_norm(interior, {p, LorentzIndex::infinity()}) +
         lorentz_norm(boundary, {q, LorentzIndex::infinity()});
}

}  // namespace halfheat
