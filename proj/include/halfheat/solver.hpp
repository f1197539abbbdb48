#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfheat/lorentz.hpp"
#include "halfheat/operators.hpp"

namespace halfheat {

/// Configuration of the Picard fixed-point iteration.  The Lorentz
/// indices p = n(rho-1) and q = (n-1)(rho-1) are always derived,
/// never user-supplied.
struct SolverConfig {
  int n = 3;
  double rho = 3.0;
  double eta = 1.0;
  int max_iterations = 20;
  double residual_tolerance = 1e-6;
  std::vector<double> time_levels;  // geometric, t_j = t_1 2^{j-1} by default
  int n_tau = 64;
  double eps_margin = 0.9;          // safety factor when sizing the ball radius
  bool override_admissibility = false;

  double p() const { return n * (rho - 1.0); }
  double q() const { return (n - 1) * (rho - 1.0); }

  bool hypothesis_holds() const { return rho / (rho - 1.0) < n - 1; }

  void validate() const {
    if (!(rho > 1.0)) throw std::invalid_argument("SolverConfig: rho must exceed 1");
    if (n < 3) throw std::invalid_argument("SolverConfig: n must be >= 3");
    if (time_levels.empty()) throw std::invalid_argument("SolverConfig: no time levels");
    for (std::size_t j = 1; j < time_levels.size(); ++j)
      if (!(time_levels[j] > time_levels[j - 1]))
        throw std::invalid_argument("SolverConfig: time levels must increase");
  }

  static std::vector<double> geometric_levels(double t1, int count) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) t[static_cast<std::size_t>(j)] = t1 * std::pow(2.0, j);
    return t;
  }
};

/// Empirical surrogates for the existential constants of the
/// contraction argument, calibrated once per grid from probe data.
struct CalibratedConstants {
  double delta1 = 0.0;  // T-operator surrogate: ||T u||_E <= delta1 ||V|| sup ||u||_(q,inf)
  double delta2 = 0.0;  // linear surrogate:    ||E(t)u0||_E <= delta2 ||u0||_(p,inf)
  double K = 0.0;       // N-operator surrogate: ||N u||_E <= K ||u||_E^rho
};

namespace detail {

inline double trajectory_sup_q(const BoundaryTrajectory& traj, const GridPtr& grid, double q) {
  double sup = 0.0;
  for (const auto& vals : traj.values) {
    BoundaryFunction b{};
    b.grid = grid;
    b.values = vals;
    sup = std::max(sup, lorentz_norm(b, {q, LorentzIndex::infinity()}));
  }
  return sup;
}

}  // namespace detail

/// One-time calibration per grid: runs E, T, N on a small probe
/// family and records the worst observed norm ratios.
inline CalibratedConstants calibrate(const GridPtr& grid, const SolverConfig& cfg) {
  cfg.validate();
  const double p = cfg.p(), q = cfg.q();
  const double R = grid->spec().radius;

  std::vector<GridFunction> probes;
  probes.push_back(sample_field(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::exp(-2.0 * r2);
  }));
  probes.push_back(sample_field(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return r2 < 0.25 * R * R ? 1.0 : 0.0;
  }));
  probes.push_back(sample_field(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::pow(r2, -0.5 * cfg.n / p);  // |x|^{-n/p}, homogeneous probe
  }));

  const BoundaryFunction vref = evaluate_potential(
      Potential{{Pole{Pole::Kind::Monopole, std::vector<double>(static_cast<std::size_t>(cfg.n) - 1, 0.0),
                      1.0, {}, {}, {}}}},
      grid);
  const double vnorm = lorentz_norm(vref, {static_cast<double>(cfg.n - 1), LorentzIndex::infinity()});
  const NonlinearitySpec h{cfg.rho, cfg.eta, +1, nullptr};

  CalibratedConstants out;
  for (const auto& u0 : probes) {
    const double u0_norm = lorentz_norm(u0, {p, LorentzIndex::infinity()});
    if (u0_norm == 0.0) continue;

    BoundaryTrajectory traj;
    traj.grid = grid;
    double e_norm = 0.0;
    for (double t : cfg.time_levels) {
      const GridFunction interior = heat_semigroup(u0, t);
      const BoundaryFunction trace = heat_semigroup_trace(u0, t);
      e_norm = std::max(e_norm, xpq_norm(interior, trace, p, q));
      traj.times.push_back(t);
      traj.values.push_back(trace.values);
    }
    out.delta2 = std::max(out.delta2, e_norm / u0_norm);

    const double sup_q = detail::trajectory_sup_q(traj, grid, q);
    const double e_full = e_norm;  // sup_t ||u(.,t)||_{X_pq} of the probe trajectory
    if (e_full == 0.0) continue;

    double t_norm = 0.0, n_norm = 0.0;
    for (double t : cfg.time_levels) {
      const FieldPair tu = potential_term(traj, vref, t, cfg.n_tau);
      const FieldPair nu = nonlinear_term(traj, h, t, cfg.n_tau);
      t_norm = std::max(t_norm, xpq_norm(tu.interior, tu.boundary, p, q));
      n_norm = std::max(n_norm, xpq_norm(nu.interior, nu.boundary, p, q));
    }
    if (vnorm > 0.0 && sup_q > 0.0)
      out.delta1 = std::max(out.delta1, t_norm / (vnorm * sup_q));
    out.K = std::max(out.K, n_norm / std::pow(e_full, cfg.rho));
  }
  return out;
}

/// Smallness report: gamma, the ball radius eps from the smallness
/// condition, and the admissibility verdict for (u0, V).
struct AdmissibilityReport {
  double v_norm = 0.0;    // ||V||_{(n-1,inf)}
  double u0_norm = 0.0;   // ||u0||_{(p,inf)}
  double gamma = 0.0;     // delta1 ||V||
  double eps = 0.0;       // calibrated ball parameter
  double contraction_bound = 0.0;  // 2^rho eps^{rho-1} K/(1-gamma)^{rho-1} + gamma
  bool admissible = false;
  std::string message;
};

inline AdmissibilityReport check_admissibility(const GridFunction& u0, const BoundaryFunction& V,
                                               const SolverConfig& cfg,
                                               const CalibratedConstants& cal) {
  cfg.validate();
  if (!cfg.hypothesis_holds())
    throw std::invalid_argument("check_admissibility: hypothesis rho/(rho-1) < n-1 violated");
  AdmissibilityReport rep;
  rep.v_norm = lorentz_norm(V, {static_cast<double>(cfg.n - 1), LorentzIndex::infinity()});
  rep.u0_norm = lorentz_norm(u0, {cfg.p(), LorentzIndex::infinity()});
  rep.gamma = cal.delta1 * rep.v_norm;
  if (rep.gamma >= 1.0) {
    rep.message = "gamma >= 1: potential too large for a contraction";
    return rep;
  }
  // largest eps with 2^rho eps^{rho-1} K / (1-gamma)^{rho-1} + gamma < 1
  if (cal.K > 0.0) {
    const double cap = (1.0 - rep.gamma) * std::pow(1.0 - rep.gamma, cfg.rho - 1.0) /
                       (std::pow(2.0, cfg.rho) * cal.K);
    rep.eps = cfg.eps_margin * std::pow(cap, 1.0 / (cfg.rho - 1.0));
  } else {
    rep.eps = std::numeric_limits<double>::infinity();
  }
  rep.contraction_bound =
      std::pow(2.0, cfg.rho) * std::pow(rep.eps, cfg.rho - 1.0) * cal.K /
          std::pow(1.0 - rep.gamma, cfg.rho - 1.0) +
      rep.gamma;
  const double data_cap = cal.delta2 > 0.0 ? rep.eps / cal.delta2
                                           : std::numeric_limits<double>::infinity();
  if (rep.u0_norm <= data_cap && rep.contraction_bound < 1.0) {
    rep.admissible = true;
    rep.message = "admissible";
  } else {
    std::ostringstream os;
    os << "inadmissible: ||u0|| = " << rep.u0_norm << " vs eps/delta2 = " << data_cap
       << ", bound = " << rep.contraction_bound;
    rep.message = os.str();
  }
  return rep;
}

/// Result of a Picard run: the iterate trajectory per stored time
/// level, the successive-difference norms and contraction ratios.
struct Solution {
  enum class Status { Converged, Diverged, NumericalFailure };

  std::vector<double> times;
  std::vector<FieldPair> fields;                  // final iterate per level
  std::vector<std::vector<FieldPair>> history;    // history[k][j]: iterate k+1, level j
  std::vector<double> increments;                 // ||u_{k+1} - u_k||_E
  std::vector<double> ratios;                     // r_k = increments[k]/increments[k-1]
  Status status = Status::Diverged;
  int iterations = 0;
  AdmissibilityReport admissibility;

  bool converged() const { return status == Status::Converged; }
};

namespace detail {

inline double e_norm_of_diff(const std::vector<FieldPair>& a, const std::vector<FieldPair>& b,
                             double p, double q) {
  double sup = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    GridFunction di = a[j].interior;
    for (std::size_t i = 0; i < di.values.size(); ++i) di.values[i] -= b[j].interior.values[i];
    BoundaryFunction db = a[j].boundary;
    for (std::size_t i = 0; i < db.values.size(); ++i) db.values[i] -= b[j].boundary.values[i];
    sup = std::max(sup, xpq_norm(di, db, p, q));
  }
  return sup;
}

}  // namespace detail

/// Picard iteration u_{k+1} = E(t)u0 + N(u_k) + T(u_k) on the stored
/// time levels.  Divergence is a status, not an exception.
inline Solution picard_solve(const GridFunction& u0, const BoundaryFunction& V,
                             const NonlinearitySpec& h, const SolverConfig& cfg,
                             const CalibratedConstants& cal) {
  cfg.validate();
  h.validate();
  if (!cfg.hypothesis_holds())
    throw std::invalid_argument("picard_solve: hypothesis rho/(rho-1) < n-1 violated");
  const GridPtr grid = u0.grid;
  const double p = cfg.p(), q = cfg.q();

  Solution sol;
  sol.times = cfg.time_levels;
  sol.admissibility = check_admissibility(u0, V, cfg, cal);
  if (!sol.admissibility.admissible && !cfg.override_admissibility)
    throw std::runtime_error("picard_solve: data not admissible (" + sol.admissibility.message +
                             "); set override_admissibility to run anyway");

  // first Picard iterate u_1 = E(t)u0
  std::vector<FieldPair> base(sol.times.size());
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    base[j] = FieldPair(grid);
    base[j].interior = heat_semigroup(u0, sol.times[j]);
    base[j].boundary = heat_semigroup_trace(u0, sol.times[j]);
  }
  std::vector<FieldPair> current = base;
  sol.history.push_back(current);

  for (int k = 0; k < cfg.max_iterations; ++k) {
    BoundaryTrajectory traj;
    traj.grid = grid;
    traj.times = sol.times;
    for (const auto& fp : current) traj.values.push_back(fp.boundary.values);

    std::vector<FieldPair> next(sol.times.size());
    bool numerical_failure = false;
    for (std::size_t j = 0; j < sol.times.size(); ++j) {
      FieldPair duh;
      try {
        // h(u) + V u in one Duhamel pass per level
        duh = duhamel_H(
            traj, [&](std::size_t i, double v) { return h(v) + V.values[i] * v; },
            sol.times[j], cfg.n_tau);
      } catch (const std::runtime_error&) {
        numerical_failure = true;
        break;
      }
      next[j] = FieldPair(grid);
      for (std::size_t i = 0; i < next[j].interior.values.size(); ++i)
        next[j].interior.values[i] = base[j].interior.values[i] + duh.interior.values[i];
      for (std::size_t i = 0; i < next[j].boundary.values.size(); ++i)
        next[j].boundary.values[i] = base[j].boundary.values[i] + duh.boundary.values[i];
    }
    if (numerical_failure) {
      sol.status = Solution::Status::NumericalFailure;
      sol.fields = std::move(current);
      return sol;
    }

    const double inc = detail::e_norm_of_diff(next, current, p, q);
    if (!std::isfinite(inc)) {
      sol.status = Solution::Status::NumericalFailure;
      sol.fields = std::move(next);
      return sol;
    }
    if (!sol.increments.empty() && sol.increments.back() > 0.0)
      sol.ratios.push_back(inc / sol.increments.back());
    sol.increments.push_back(inc);
    current = std::move(next);
    sol.history.push_back(current);
    sol.iterations = k + 1;
    if (inc < cfg.residual_tolerance) {
      sol.status = Solution::Status::Converged;
      break;
    }
  }
  sol.fields = std::move(current);
  return sol;
}

/// Per-iteration contraction table row.
struct ContractionRow {
  int k;
  double increment;  // ||u_{k+1} - u_k||_E
  double ratio;      // r_k, NaN for the first row
};

inline std::vector<ContractionRow> contraction_report(const Solution& sol) {
  if (sol.increments.empty())
    throw std::invalid_argument("contraction_report: need at least one correction step");
  std::vector<ContractionRow> rows;
  for (std::size_t k = 0; k < sol.increments.size(); ++k) {
    ContractionRow row;
    row.k = static_cast<int>(k) + 1;
    row.increment = sol.increments[k];
    row.ratio = k == 0 ? (row.increment == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN())
                       : sol.ratios[k - 1];
    rows.push_back(row);
  }
  return rows;
}

/// Sup over stored levels of the X_{p,q} norm of a level set.
inline double e_norm(const std::vector<FieldPair>& fields, double p, double q) {
  double sup = 0.0;
  for (const auto& fp : fields) sup = std::max(sup, xpq_norm(fp.interior, fp.boundary, p, q));
  return sup;
}

}  // namespace halfheat
