#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "halfheat/grid.hpp"
#include "halfheat/kernel.hpp"
#include "halfheat/lorentz.hpp"

namespace halfheat {

// ---------------------------------------------------------------------------
// Potentials and nonlinearities
// ---------------------------------------------------------------------------

/// One pole of a multipolar anisotropic boundary potential of order 1:
/// monopole lambda/|y-x^i|, dipole (y-x^i).d / |y-x^i|^2, or a
/// tabulated angular profile v((y-x^i)/|y-x^i|)/|y-x^i| with
/// nearest-direction lookup.
struct Pole {
  enum class Kind { Monopole, Dipole, Angular };
  Kind kind = Kind::Monopole;
  std::vector<double> location;  // boundary point, n-1 coordinates
  double coefficient = 1.0;      // lambda_i (monopole)
  std::vector<double> dipole;    // d^i (dipole)
  std::vector<std::vector<double>> directions;  // unit vectors (angular)
  std::vector<double> profile;                  // v_i at each direction
};

struct Potential {
  std::vector<Pole> poles;
};

inline BoundaryFunction evaluate_potential(const Potential& pot, const GridPtr& grid) {
  BoundaryFunction out(grid);
  const std::size_t nb = static_cast<std::size_t>(grid->dimension()) - 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto y = grid->boundary_centroid(i);
    double acc = 0.0;
    for (const auto& pole : pot.poles) {
      if (pole.location.size() != nb)
        throw std::invalid_argument("evaluate_potential: pole dimension mismatch");
      std::vector<double> d(nb);
      double r2 = 0.0;
      for (std::size_t a = 0; a < nb; ++a) {
        d[a] = y[a] - pole.location[a];
        r2 += d[a] * d[a];
      }
      const double r = std::sqrt(r2);
      if (r == 0.0)
        throw std::runtime_error("evaluate_potential: boundary centroid coincides with a pole");
      switch (pole.kind) {
        case Pole::Kind::Monopole:
          acc += pole.coefficient / r;
          break;
        case Pole::Kind::Dipole: {
          double dot = 0.0;
          for (std::size_t a = 0; a < nb; ++a) dot += d[a] * pole.dipole[a];
          acc += dot / r2;
          break;
        }
        case Pole::Kind::Angular: {
          if (pole.directions.empty())
            throw std::invalid_argument("evaluate_potential: angular pole without directions");
          double best = -2.0;
          std::size_t best_k = 0;
          for (std::size_t k = 0; k < pole.directions.size(); ++k) {
            double dot = 0.0;
            for (std::size_t a = 0; a < nb; ++a) dot += d[a] / r * pole.directions[k][a];
            if (dot > best) { best = dot; best_k = k; }
          }
          acc += pole.profile[best_k] / r;
          break;
        }
      }
    }
    if (!std::isfinite(acc))
      throw std::runtime_error("evaluate_potential: non-finite potential value");
    out.values[i] = acc;
  }
  return out;
}

/// Boundary nonlinearity h with h(0) = 0 and
/// |h(a)-h(b)| <= eta |a-b| (|a|^{rho-1} + |b|^{rho-1}).
/// Default form is the signed power law eps |a|^{rho-1} a.
struct NonlinearitySpec {
  double rho = 3.0;
  double eta = 1.0;
  int sign = +1;  // eps in {-1, 0, +1}
  std::function<double(double)> custom;  // optional tabulated/general variant

  void validate() const {
    if (!(rho > 1.0)) throw std::invalid_argument("NonlinearitySpec: rho must exceed 1");
    if (!(eta > 0.0)) throw std::invalid_argument("NonlinearitySpec: eta must be positive");
    if (sign < -1 || sign > 1) throw std::invalid_argument("NonlinearitySpec: sign must be -1, 0 or +1");
  }

  double operator()(double a) const {
    if (custom) return custom(a);
    if (sign == 0 || a == 0.0) return 0.0;
    return sign * std::pow(std::abs(a), rho - 1.0) * a;
  }
};

// ---------------------------------------------------------------------------
// Separable kernel quadrature
// ---------------------------------------------------------------------------

namespace detail {

struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Kernel cell integrals along one tangential axis:
// M(i,j) = int_{cell j} (4 pi t)^{-1/2} e^{-(x_i - y)^2/4t} dy.
inline Mat tangential_kernel_matrix(const Axis& ax, double t) {
  Mat m{ax.size(), ax.size(), std::vector<double>(ax.size() * ax.size())};
  for (std::size_t i = 0; i < ax.size(); ++i)
    for (std::size_t j = 0; j < ax.size(); ++j)
      m(i, j) = axis_segment_integral(ax.centroids[i], ax.edges[j], ax.edges[j + 1], t);
  return m;
}

// Vertical axis with the reflected image cell.
inline Mat vertical_kernel_matrix(const Axis& ax, double t) {
  Mat m{ax.size(), ax.size(), std::vector<double>(ax.size() * ax.size())};
  for (std::size_t i = 0; i < ax.size(); ++i)
    for (std::size_t j = 0; j < ax.size(); ++j)
      m(i, j) = axis_segment_integral(ax.centroids[i], ax.edges[j], ax.edges[j + 1], t) +
                axis_segment_integral(ax.centroids[i], -ax.edges[j + 1], -ax.edges[j], t);
  return m;
}

// y[o, i, s] = sum_j M(i,j) x[o, j, s]  for an axis of given stride.
inline std::vector<double> contract_axis(std::span<const double> x, const Mat& m,
                                         std::size_t stride, std::size_t nouter) {
  std::vector<double> y(nouter * m.rows * stride, 0.0);
  for (std::size_t o = 0; o < nouter; ++o)
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double* xs = x.data() + (o * m.cols + j) * stride;
      for (std::size_t i = 0; i < m.rows; ++i) {
        const double mij = m(i, j);
        if (mij == 0.0) continue;
        double* ys = y.data() + (o * m.rows + i) * stride;
        for (std::size_t s = 0; s < stride; ++s) ys[s] += mij * xs[s];
      }
    }
  return y;
}

// Applies the tangential kernel matrices of all n-1 axes in place.
inline std::vector<double> contract_tangential(const Grid& g, std::vector<double> v, double t) {
  const int nb = g.dimension() - 1;
  const std::size_t total = v.size();
  std::size_t stride = 1;
  for (int a = 0; a < nb; ++a) {
    const Mat m = tangential_kernel_matrix(g.axis(a), t);
    const std::size_t nouter = total / (stride * m.cols);
    v = contract_axis(v, m, stride, nouter);
    stride *= m.rows;
  }
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear operators
// ---------------------------------------------------------------------------

/// Heat semigroup in the half-space, E(t)u0(x) = int G(x,y,t) u0(y) dy.
/// The Gaussian factor is integrated exactly over each cell (erf
/// products per axis), the data is taken piecewise constant.
inline GridFunction heat_semigroup(const GridFunction& u0, double t) {
  if (!(t > 0.0)) throw std::domain_error("heat_semigroup: t must be positive");
  const Grid& g = *u0.grid;
  auto v = detail::contract_tangential(g, u0.values, t);
  const detail::Mat mv = detail::vertical_kernel_matrix(g.vertical_axis(), t);
  v = detail::contract_axis(v, mv, g.boundary_count(), 1);
  GridFunction out(u0.grid);
  out.values = std::move(v);
  return out;
}

/// Boundary trace of E(t)u0, evaluated at the boundary centroids with
/// the same quadrature as heat_semigroup.
inline BoundaryFunction heat_semigroup_trace(const GridFunction& u0, double t) {
  if (!(t > 0.0)) throw std::domain_error("heat_semigroup_trace: t must be positive");
  const Grid& g = *u0.grid;
  auto v = detail::contract_tangential(g, u0.values, t);
  // vertical row at x_n = 0: reflection doubles each cell integral
  const Axis& vert = g.vertical_axis();
  BoundaryFunction out(u0.grid);
  for (std::size_t j = 0; j < vert.size(); ++j) {
    const double w = 2.0 * axis_segment_integral(0.0, vert.edges[j], vert.edges[j + 1], t);
    const double* col = v.data() + j * g.boundary_count();
    for (std::size_t i = 0; i < g.boundary_count(); ++i) out.values[i] += w * col[i];
  }
  return out;
}

/// G2(phi)(y',t) = int_{half-space} G(x,y',t) phi(x) dx; identical to
/// the semigroup trace by kernel symmetry (shared code path).
inline BoundaryFunction g2(const GridFunction& phi, double t) {
  return heat_semigroup_trace(phi, t);
}

/// G1(psi)(x,t) = int_boundary G(x,y',t) psi(y') dy', interior target.
inline GridFunction g1_interior(const BoundaryFunction& psi, double t) {
  if (!(t > 0.0)) throw std::domain_error("g1_interior: t must be positive");
  const Grid& g = *psi.grid;
  const auto v = detail::contract_tangential(g, psi.values, t);
  const Axis& vert = g.vertical_axis();
  const double scale = 2.0 / std::sqrt(4.0 * std::numbers::pi * t);
  GridFunction out(psi.grid);
  for (std::size_t j = 0; j < vert.size(); ++j) {
    const double w = scale * std::exp(-vert.centroids[j] * vert.centroids[j] / (4.0 * t));
    double* dst = out.values.data() + j * g.boundary_count();
    for (std::size_t i = 0; i < g.boundary_count(); ++i) dst[i] = w * v[i];
  }
  return out;
}

/// G1 evaluated on the boundary itself (x_n = 0).
inline BoundaryFunction g1_boundary(const BoundaryFunction& psi, double t) {
  if (!(t > 0.0)) throw std::domain_error("g1_boundary: t must be positive");
  const Grid& g = *psi.grid;
  auto v = detail::contract_tangential(g, psi.values, t);
  const double scale = 2.0 / std::sqrt(4.0 * std::numbers::pi * t);
  BoundaryFunction out(psi.grid);
  for (std::size_t i = 0; i < g.boundary_count(); ++i) out.values[i] = scale * v[i];
  return out;
}

// ---------------------------------------------------------------------------
// Duhamel integrals
// ---------------------------------------------------------------------------

/// Interior field together with its boundary trace.
struct FieldPair {
  GridFunction interior;
  BoundaryFunction boundary;

  FieldPair() = default;
  explicit FieldPair(const GridPtr& g) : interior(g), boundary(g) {}
};

/// Time-indexed boundary values with linear interpolation between
/// stored levels and constant extension outside them.
struct BoundaryTrajectory {
  GridPtr grid;
  std::vector<double> times;                 // strictly increasing
  std::vector<std::vector<double>> values;   // one boundary array per time

  std::vector<double> at(double s) const {
    if (times.empty()) throw std::invalid_argument("BoundaryTrajectory: empty");
    if (s <= times.front()) return values.front();
    if (s >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double w = (s - times[k - 1]) / (times[k] - times[k - 1]);
    std::vector<double> out(values[k - 1].size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (1.0 - w) * values[k - 1][i] + w * values[k][i];
    return out;
  }
};

/// Identity density for the plain parabolic boundary operator H(f).
inline double identity_density(std::size_t, double v) { return v; }

/// H(f)(x,t) = int_0^t int_boundary G(x,y',t-s) f(y',s) dy' ds with a
/// pointwise density map applied to the interpolated trajectory.  The
/// s -> t endpoint concentration is removed by the substitution
/// tau = sqrt(t-s), integrated by composite midpoint in tau.
template <typename Density>
FieldPair duhamel_H(const BoundaryTrajectory& f, Density&& density, double t, int n_tau = 64) {
  if (!(t > 0.0)) throw std::domain_error("duhamel_H: t must be positive");
  if (n_tau < 8) throw std::invalid_argument("duhamel_H: at least 8 time nodes required");
  const GridPtr& grid = f.grid;
  FieldPair out(grid);
  const double dtau = std::sqrt(t) / n_tau;
  std::vector<double> dens(grid->boundary_count());
  for (int i = 0; i < n_tau; ++i) {
    const double tau = (i + 0.5) * dtau;
    const double s = t - tau * tau;
    const auto us = f.at(s);
    for (std::size_t j = 0; j < dens.size(); ++j) dens[j] = density(j, us[j]);
    BoundaryFunction d{};
    d.grid = grid;
    d.values = dens;
    const double w = 2.0 * tau * dtau;
    const GridFunction gi = g1_interior(d, tau * tau);
    const BoundaryFunction gb = g1_boundary(d, tau * tau);
    for (std::size_t j = 0; j < out.interior.values.size(); ++j)
      out.interior.values[j] += w * gi.values[j];
    for (std::size_t j = 0; j < out.boundary.values.size(); ++j)
      out.boundary.values[j] += w * gb.values[j];
  }
  for (double v : out.interior.values)
    if (!std::isfinite(v)) throw std::runtime_error("duhamel_H: non-finite interior value");
  for (double v : out.boundary.values)
    if (!std::isfinite(v)) throw std::runtime_error("duhamel_H: non-finite boundary value");
  return out;
}

inline FieldPair duhamel_H(const BoundaryTrajectory& f, double t, int n_tau = 64) {
  return duhamel_H(f, identity_density, t, n_tau);
}

/// N(u)(x,t): Duhamel integral of h(u) along the boundary trajectory.
inline FieldPair nonlinear_term(const BoundaryTrajectory& u, const NonlinearitySpec& h,
                                double t, int n_tau = 64) {
  return duhamel_H(u, [&](std::size_t, double v) { return h(v); }, t, n_tau);
}

/// T(u)(x,t): Duhamel integral of V u along the boundary trajectory.
inline FieldPair potential_term(const BoundaryTrajectory& u, const BoundaryFunction& V,
                                double t, int n_tau = 64) {
  return duhamel_H(u, [&](std::size_t j, double v) { return V.values[j] * v; }, t, n_tau);
}

}  // namespace halfheat
