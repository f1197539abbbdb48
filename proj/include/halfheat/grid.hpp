#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace halfheat {

/// Tensor-product discretization of the truncated half-space
/// [-R,R]^{n-1} x [0,R].  Tangential axes span [-R,R]; the vertical
/// axis spans [0,R].  When grading < 1 the per-axis partitions are
/// geometrically refined toward the projections of the refinement
/// centers, which are snapped to cell corners so that no centroid
/// ever coincides with a singularity.
struct GridSpec {
  int n = 3;                 // spatial dimension, n >= 3
  double radius = 4.0;       // truncation radius R > 0
  int cells_per_axis = 8;    // >= 2, even for symmetric grids
  double grading = 1.0;      // geometric refinement factor in (0,1]
  std::vector<std::vector<double>> refinement_centers;  // boundary points, n-1 coords each
  std::size_t max_cells = 4'000'000;

  void validate() const {
    if (n < 3) throw std::invalid_argument("GridSpec: dimension n must be >= 3");
    if (!(radius > 0.0)) throw std::invalid_argument("GridSpec: radius must be positive");
    if (cells_per_axis < 2) throw std::invalid_argument("GridSpec: cells_per_axis must be >= 2");
    if (!(grading > 0.0) || grading > 1.0)
      throw std::invalid_argument("GridSpec: grading must lie in (0,1]");
    for (const auto& c : refinement_centers) {
      if (static_cast<int>(c.size()) != n - 1)
        throw std::invalid_argument("GridSpec: refinement center must have n-1 coordinates");
      for (double v : c)
        if (std::abs(v) > radius)
          throw std::invalid_argument("GridSpec: refinement center outside truncated boundary");
    }
    double count = 1.0;
    for (int a = 0; a < n; ++a) count *= cells_per_axis;
    if (count > static_cast<double>(max_cells))
      throw std::invalid_argument("GridSpec: cell budget exceeded (" + std::to_string(count) +
                                  " > " + std::to_string(max_cells) + ")");
  }
};

/// One-dimensional partition: m cells given by m+1 edges.
struct Axis {
  std::vector<double> edges;      // strictly increasing, size m+1
  std::vector<double> centroids;  // midpoints, size m
  std::vector<double> widths;     // positive, size m

  std::size_t size() const { return widths.size(); }

  void finalize() {
    const std::size_t m = edges.size() - 1;
    centroids.resize(m);
    widths.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      centroids[i] = 0.5 * (edges[i] + edges[i + 1]);
      widths[i] = edges[i + 1] - edges[i];
      if (!(widths[i] > 0.0)) throw std::logic_error("Axis: nonpositive cell width");
    }
  }
};

namespace detail {

// Geometric widths for k cells filling [0,L], finest next to the
// graded end; ratio between neighbours equals 1/grading moving away.
inline std::vector<double> graded_widths(double length, int k, double grading) {
  std::vector<double> w(static_cast<std::size_t>(k));
  if (grading == 1.0) {
    std::fill(w.begin(), w.end(), length / k);
    return w;
  }
  const double ratio = 1.0 / grading;
  double sum = 0.0, cur = 1.0;
  for (int i = 0; i < k; ++i) { w[i] = cur; sum += cur; cur *= ratio; }
  for (auto& x : w) x *= length / sum;
  return w;
}

// Partition [lo,hi] into k cells grading toward center endpoints.
inline std::vector<double> segment_widths(double lo, double hi, int k, double grading,
                                          bool left_center, bool right_center) {
  const double L = hi - lo;
  if (!left_center && !right_center) return graded_widths(L, k, 1.0);
  if (left_center && !right_center) return graded_widths(L, k, grading);
  if (!left_center && right_center) {
    auto w = graded_widths(L, k, grading);
    std::reverse(w.begin(), w.end());
    return w;
  }
  // centers at both ends: grade each half toward its end
  const int k1 = k / 2, k2 = k - k1;
  auto w1 = graded_widths(L / 2.0, k1, grading);
  auto w2 = graded_widths(L - L / 2.0, k2, grading);
  std::reverse(w2.begin(), w2.end());
  w1.insert(w1.end(), w2.begin(), w2.end());
  return w1;
}

// m cells over [lo,hi] with interior breakpoints at the (snapped)
// center coordinates.  Centers become cell corners exactly.
inline Axis make_axis(double lo, double hi, int m, double grading,
                      std::vector<double> centers, bool lo_is_center = false) {
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  const bool has_zero = std::binary_search(centers.begin(), centers.end(), 0.0);
  std::erase_if(centers, [&](double c) { return c <= lo || c >= hi; });

  Axis axis;

  // Mirror-symmetric fast path keeps the partition bitwise even.
  const bool symmetric_domain = (lo == -hi);
  bool symmetric_centers = true;
  for (double c : centers)
    if (!std::binary_search(centers.begin(), centers.end(), -c)) symmetric_centers = false;
  if (symmetric_domain && symmetric_centers && m % 2 == 0) {
    // build the nonnegative half and mirror it
    std::vector<double> pos_centers;
    for (double c : centers)
      if (c > 0.0) pos_centers.push_back(c);
    Axis half = make_axis(0.0, hi, m / 2, grading, pos_centers, has_zero);
    axis.edges.resize(static_cast<std::size_t>(m) + 1);
    const int h = m / 2;
    for (int i = 0; i <= h; ++i) {
      axis.edges[static_cast<std::size_t>(h + i)] = half.edges[static_cast<std::size_t>(i)];
      axis.edges[static_cast<std::size_t>(h - i)] = -half.edges[static_cast<std::size_t>(i)];
    }
    axis.finalize();
    return axis;
  }

  std::vector<double> breaks;
  breaks.push_back(lo);
  for (double c : centers) breaks.push_back(c);
  breaks.push_back(hi);
  const std::size_t nseg = breaks.size() - 1;

  // allocate cells to segments proportionally to length, min 1 each
  std::vector<int> alloc(nseg, 1);
  int left = m - static_cast<int>(nseg);
  if (left < 0) throw std::invalid_argument("make_axis: more refinement centers than cells");
  const double total = hi - lo;
  std::vector<double> want(nseg);
  for (std::size_t s = 0; s < nseg; ++s) want[s] = (breaks[s + 1] - breaks[s]) / total * m;
  while (left > 0) {
    std::size_t best = 0;
    double best_deficit = -1.0;
    for (std::size_t s = 0; s < nseg; ++s) {
      const double deficit = want[s] - alloc[s];
      if (deficit > best_deficit) { best_deficit = deficit; best = s; }
    }
    ++alloc[best];
    --left;
  }

  axis.edges.push_back(lo);
  for (std::size_t s = 0; s < nseg; ++s) {
    const bool lc = s > 0 || lo_is_center;
    const bool rc = s + 1 < nseg;
    auto w = segment_widths(breaks[s], breaks[s + 1], alloc[s], grading, lc, rc);
    for (double wi : w) axis.edges.push_back(axis.edges.back() + wi);
    axis.edges.back() = breaks[s + 1];  // pin segment ends exactly
  }
  axis.finalize();
  return axis;
}

}  // namespace detail

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Measured tensor-product grid over the truncated half-space and its
/// boundary.  Interior cells are indexed row-major with axis 0
/// fastest; boundary cells share the tangential indexing, so boundary
/// cell j underlies the interior column {(j, i_vert)}.
class Grid {
 public:
  explicit Grid(GridSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int n = spec_.n;
    axes_.reserve(static_cast<std::size_t>(n));
    const bool vertical_graded = spec_.grading < 1.0 && !spec_.refinement_centers.empty();
    for (int a = 0; a < n - 1; ++a) {
      std::vector<double> centers;
      for (const auto& c : spec_.refinement_centers) centers.push_back(c[static_cast<std::size_t>(a)]);
      // a center coordinate equal to +-R sits on the domain corner already
      std::erase_if(centers, [&](double v) { return std::abs(v) >= spec_.radius; });
      bool zero_center = std::any_of(centers.begin(), centers.end(),
                                     [](double v) { return v == 0.0; });
      (void)zero_center;
      axes_.push_back(detail::make_axis(-spec_.radius, spec_.radius, spec_.cells_per_axis,
                                        spec_.grading, std::move(centers)));
    }
    // vertical axis: refinement centers live on the boundary, so the
    // grading (when any center exists) points at x_n = 0
    axes_.push_back(detail::make_axis(0.0, spec_.radius, spec_.cells_per_axis, spec_.grading,
                                      {}, vertical_graded));

    interior_count_ = 1;
    for (const auto& ax : axes_) interior_count_ *= ax.size();
    boundary_count_ = interior_count_ / axes_.back().size();

    interior_measures_.resize(interior_count_);
    for (std::size_t i = 0; i < interior_count_; ++i) {
      double mprod = 1.0;
      std::size_t rem = i;
      for (int a = 0; a < n; ++a) {
        const std::size_t m = axes_[static_cast<std::size_t>(a)].size();
        mprod *= axes_[static_cast<std::size_t>(a)].widths[rem % m];
        rem /= m;
      }
      interior_measures_[i] = mprod;
    }
    boundary_measures_.resize(boundary_count_);
    for (std::size_t i = 0; i < boundary_count_; ++i) {
      double mprod = 1.0;
      std::size_t rem = i;
      for (int a = 0; a < n - 1; ++a) {
        const std::size_t m = axes_[static_cast<std::size_t>(a)].size();
        mprod *= axes_[static_cast<std::size_t>(a)].widths[rem % m];
        rem /= m;
      }
      boundary_measures_[i] = mprod;
    }
  }

  static GridPtr create(GridSpec spec) { return std::make_shared<const Grid>(std::move(spec)); }

  const GridSpec& spec() const { return spec_; }
  int dimension() const { return spec_.n; }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  const Axis& vertical_axis() const { return axes_.back(); }

  std::size_t interior_count() const { return interior_count_; }
  std::size_t boundary_count() const { return boundary_count_; }
  const std::vector<double>& interior_measures() const { return interior_measures_; }
  const std::vector<double>& boundary_measures() const { return boundary_measures_; }

  std::vector<double> interior_centroid(std::size_t i) const {
    std::vector<double> x(static_cast<std::size_t>(spec_.n));
    std::size_t rem = i;
    for (int a = 0; a < spec_.n; ++a) {
      const std::size_t m = axes_[static_cast<std::size_t>(a)].size();
      x[static_cast<std::size_t>(a)] = axes_[static_cast<std::size_t>(a)].centroids[rem % m];
      rem /= m;
    }
    return x;
  }

  std::vector<double> boundary_centroid(std::size_t i) const {
    std::vector<double> x(static_cast<std::size_t>(spec_.n) - 1);
    std::size_t rem = i;
    for (int a = 0; a < spec_.n - 1; ++a) {
      const std::size_t m = axes_[static_cast<std::size_t>(a)].size();
      x[static_cast<std::size_t>(a)] = axes_[static_cast<std::size_t>(a)].centroids[rem % m];
      rem /= m;
    }
    return x;
  }

  /// Interior index from per-axis cell indices.
  std::size_t interior_index(std::span<const std::size_t> idx) const {
    std::size_t i = 0, stride = 1;
    for (int a = 0; a < spec_.n; ++a) {
      i += idx[static_cast<std::size_t>(a)] * stride;
      stride *= axes_[static_cast<std::size_t>(a)].size();
    }
    return i;
  }

  std::size_t boundary_of_interior(std::size_t i) const { return i % boundary_count_; }

  double total_interior_measure() const {
    double s = 1.0;
    for (const auto& ax : axes_) s *= ax.edges.back() - ax.edges.front();
    return s;
  }

 private:
  GridSpec spec_;
  std::vector<Axis> axes_;
  std::size_t interior_count_ = 0, boundary_count_ = 0;
  std::vector<double> interior_measures_, boundary_measures_;
};

/// Cell-sampled field on the interior cells of a grid.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), values(grid->interior_count(), fill) {}

  const std::vector<double>& cell_measures() const { return grid->interior_measures(); }
  std::size_t size() const { return values.size(); }
};

/// Cell-sampled field on the boundary cells of a grid.
struct BoundaryFunction {
  GridPtr grid;
  std::vector<double> values;

  BoundaryFunction() = default;
  explicit BoundaryFunction(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), values(grid->boundary_count(), fill) {}

  const std::vector<double>& cell_measures() const { return grid->boundary_measures(); }
  std::size_t size() const { return values.size(); }
};

/// Samples a pointwise field at the interior centroids.
template <typename F>
GridFunction sample_field(const GridPtr& grid, F&& f) {
  GridFunction out(grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const auto x = grid->interior_centroid(i);
    const double v = f(std::span<const double>(x));
    if (!std::isfinite(v)) {
      std::string msg = "sample_field: non-finite sample at centroid (";
      for (std::size_t a = 0; a < x.size(); ++a) msg += (a ? "," : "") + std::to_string(x[a]);
      throw std::runtime_error(msg + ")");
    }
    out.values[i] = v;
  }
  return out;
}

/// Samples a pointwise field at the boundary centroids.
template <typename F>
BoundaryFunction sample_boundary_field(const GridPtr& grid, F&& f) {
  BoundaryFunction out(grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const auto x = grid->boundary_centroid(i);
    const double v = f(std::span<const double>(x));
    if (!std::isfinite(v)) {
      std::string msg = "sample_boundary_field: non-finite sample at centroid (";
      for (std::size_t a = 0; a < x.size(); ++a) msg += (a ? "," : "") + std::to_string(x[a]);
      throw std::runtime_error(msg + ")");
    }
    out.values[i] = v;
  }
  return out;
}

namespace detail {

inline std::size_t locate_cell(const std::vector<double>& centroids, double x) {
  // index of the centroid interval containing x (clamped)
  auto it = std::lower_bound(centroids.begin(), centroids.end(), x);
  if (it == centroids.begin()) return 0;
  if (it == centroids.end()) return centroids.size() - 1;
  return static_cast<std::size_t>(it - centroids.begin()) - 1;
}

}  // namespace detail

/// Multilinear interpolation of an interior field at an arbitrary
/// point of the closed truncated half-space (clamped to the centroid
/// hull per axis).
inline double interpolate(const GridFunction& f, std::span<const double> x) {
  const Grid& g = *f.grid;
  const int n = g.dimension();
  std::vector<std::size_t> lo(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const auto& c = g.axis(a).centroids;
    std::size_t i = detail::locate_cell(c, x[static_cast<std::size_t>(a)]);
    if (i + 1 >= c.size()) i = c.size() - 2;
    double t = (x[static_cast<std::size_t>(a)] - c[i]) / (c[i + 1] - c[i]);
    t = std::clamp(t, 0.0, 1.0);
    lo[static_cast<std::size_t>(a)] = i;
    w[static_cast<std::size_t>(a)] = t;
  }
  double acc = 0.0;
  const std::size_t corners = static_cast<std::size_t>(1) << n;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double weight = 1.0;
    for (int a = 0; a < n; ++a) {
      const bool hi = (mask >> a) & 1u;
      idx[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + (hi ? 1 : 0);
      weight *= hi ? w[static_cast<std::size_t>(a)] : 1.0 - w[static_cast<std::size_t>(a)];
    }
    acc += weight * f.values[g.interior_index(idx)];
  }
  return acc;
}

/// Same for a boundary field over the tangential axes.
inline double interpolate(const BoundaryFunction& f, std::span<const double> xp) {
  const Grid& g = *f.grid;
  const int nb = g.dimension() - 1;
  std::vector<std::size_t> lo(static_cast<std::size_t>(nb));
  std::vector<double> w(static_cast<std::size_t>(nb));
  for (int a = 0; a < nb; ++a) {
    const auto& c = g.axis(a).centroids;
    std::size_t i = detail::locate_cell(c, xp[static_cast<std::size_t>(a)]);
    if (i + 1 >= c.size()) i = c.size() - 2;
    double t = (xp[static_cast<std::size_t>(a)] - c[i]) / (c[i + 1] - c[i]);
    t = std::clamp(t, 0.0, 1.0);
    lo[static_cast<std::size_t>(a)] = i;
    w[static_cast<std::size_t>(a)] = t;
  }
  double acc = 0.0;
  const std::size_t corners = static_cast<std::size_t>(1) << nb;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double weight = 1.0;
    std::size_t index = 0, stride = 1;
    for (int a = 0; a < nb; ++a) {
      const bool hi = (mask >> a) & 1u;
      index += (lo[static_cast<std::size_t>(a)] + (hi ? 1 : 0)) * stride;
      stride *= g.axis(a).size();
      weight *= hi ? w[static_cast<std::size_t>(a)] : 1.0 - w[static_cast<std::size_t>(a)];
    }
    acc += weight * f.values[index];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Grid-exact isometries (index permutations)
// ---------------------------------------------------------------------------

enum class GridIsometry {
  RotateQuarter,       // (x1,x2,...) -> (-x2,x1,...), tangential quarter turn
  ReflectTangential,   // T_{x_n}: (x',x_n) -> (-x',x_n)
};

namespace detail {

inline bool axis_mirror_symmetric(const Axis& ax) {
  const std::size_t m = ax.size();
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(ax.centroids[i] + ax.centroids[m - 1 - i]) > 1e-14 * (std::abs(ax.centroids[i]) + 1.0))
      return false;
  return true;
}

}  // namespace detail

/// Permutation p with (f o T)[i] = f[p[i]] on interior cells; throws
/// when the grid is not closed under the transform.
inline std::vector<std::size_t> interior_isometry_permutation(const Grid& g, GridIsometry iso) {
  const int n = g.dimension();
  for (int a = 0; a < n - 1; ++a)
    if (!detail::axis_mirror_symmetric(g.axis(a)))
      throw std::invalid_argument("grid not closed under transform: tangential axis not mirror-symmetric");
  if (iso == GridIsometry::RotateQuarter) {
    if (n != 3) throw std::invalid_argument("quarter rotation implemented for n == 3");
    if (g.axis(0).size() != g.axis(1).size())
      throw std::invalid_argument("grid not closed under transform: tangential axes differ");
    for (std::size_t i = 0; i < g.axis(0).size(); ++i)
      if (g.axis(0).centroids[i] != g.axis(1).centroids[i])
        throw std::invalid_argument("grid not closed under transform: tangential axes differ");
  }
  const std::size_t m0 = g.axis(0).size();
  std::vector<std::size_t> perm(g.interior_count());
  for (std::size_t i = 0; i < g.interior_count(); ++i) {
    std::size_t rem = i;
    const std::size_t i0 = rem % m0; rem /= m0;
    const std::size_t m1 = g.axis(1).size();
    const std::size_t i1 = rem % m1; rem /= m1;
    std::size_t j0, j1;
    if (iso == GridIsometry::RotateQuarter) {
      // target cell (i0,i1) pulls from T^{-1}(x) = (x2,-x1): (j0,j1) = (i1, mirror(i0))
      j0 = i1;
      j1 = m0 - 1 - i0;
    } else {
      j0 = m0 - 1 - i0;
      j1 = m1 - 1 - i1;
    }
    perm[i] = j0 + m0 * (j1 + g.axis(1).size() * rem);
  }
  return perm;
}

inline std::vector<std::size_t> boundary_isometry_permutation(const Grid& g, GridIsometry iso) {
  auto interior = interior_isometry_permutation(g, iso);
  std::vector<std::size_t> perm(g.boundary_count());
  for (std::size_t i = 0; i < g.boundary_count(); ++i) perm[i] = interior[i] % g.boundary_count();
  return perm;
}

}  // namespace halfheat
