#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace halfheat {

/// Arguments of the half-space fundamental solution G(x,y,t).
struct KernelPoint {
  std::vector<double> x, y;  // points of the closed half-space
  double t;

  void validate() const {
    if (!(t > 0.0)) throw std::domain_error("KernelPoint: t must be positive");
    if (x.size() != y.size()) throw std::invalid_argument("KernelPoint: dimension mismatch");
    if (x.back() < 0.0 || y.back() < 0.0)
      throw std::invalid_argument("KernelPoint: points must satisfy x_n >= 0");
  }
};

/// Whole-space heat kernel g(x,t) = (4 pi t)^{-n/2} exp(-|x|^2 / 4t).
inline double whole_space_kernel(std::span<const double> x, double t) {
  if (!(t > 0.0)) throw std::domain_error("whole_space_kernel: t must be positive");
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const int n = static_cast<int>(x.size());
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-r2 / (4.0 * t));
}

/// Half-space fundamental solution
/// G(x,y,t) = (4 pi t)^{-n/2} [ e^{-|x-y|^2/4t} + e^{-|x-y*|^2/4t} ],
/// y* = (y', -y_n).  Positive, symmetric in (x,y), and equal to
/// 2 g(x-y,t) on the boundary.
inline double half_space_kernel(std::span<const double> x, std::span<const double> y, double t) {
  if (!(t > 0.0)) throw std::domain_error("half_space_kernel: t must be positive");
  const std::size_t n = x.size();
  double r2 = 0.0;
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const double d = x[a] - y[a];
    r2 += d * d;
  }
  const double dn = x[n - 1] - y[n - 1];
  const double sn = x[n - 1] + y[n - 1];
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * static_cast<double>(n)) *
         (std::exp(-(r2 + dn * dn) / (4.0 * t)) + std::exp(-(r2 + sn * sn) / (4.0 * t)));
}

inline double half_space_kernel(const KernelPoint& kp) {
  kp.validate();
  return half_space_kernel(kp.x, kp.y, kp.t);
}

/// Smallest constant C0 with g(x,t) <= C0 (t + |x|^2)^{-n/2}, found by
/// coarse search over the scale-invariant ratio.  By parabolic scaling
/// the ratio depends on |x|^2/t only, so a 1-d sweep suffices.
inline double calibrate_pointwise_constant(int n, int samples = 4096, double r2_max = 400.0) {
  double best = 0.0;
  const double c = std::pow(4.0 * std::numbers::pi, -0.5 * n);
  for (int i = 0; i <= samples; ++i) {
    const double r2 = r2_max * i / samples;  // |x|^2 at t = 1
    const double ratio = c * std::exp(-r2 / 4.0) * std::pow(1.0 + r2, 0.5 * n);
    best = std::max(best, ratio);
  }
  return best;
}

/// true iff g(x,t) <= C0 (t + |x|^2)^{-n/2}.
inline bool check_pointwise_bound(std::span<const double> x, double t, double c0) {
  if (!(t > 0.0)) throw std::domain_error("check_pointwise_bound: t must be positive");
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  return whole_space_kernel(x, t) <= c0 * std::pow(t + r2, -0.5 * static_cast<double>(x.size()));
}

/// Exact integral of the 1-d heat kernel over a segment:
/// int_lo^hi (4 pi t)^{-1/2} e^{-(x-y)^2/4t} dy.
inline double axis_segment_integral(double x, double lo, double hi, double t) {
  const double s = 2.0 * std::sqrt(t);
  return 0.5 * (std::erf((x - lo) / s) - std::erf((x - hi) / s));
}

}  // namespace halfheat
