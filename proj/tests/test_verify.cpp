#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "halfheat/verify.hpp"

using namespace halfheat;

namespace {

GridPtr verify_grid(int m, double R, double grading = 1.0, bool center = true) {
  GridSpec s;
  s.n = 3;
  s.radius = R;
  s.cells_per_axis = m;
  s.grading = grading;
  if (center) s.refinement_centers = {{0.0, 0.0}};
  return Grid::create(s);
}

std::vector<double> decade_times(double t0, int count) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = t0 * std::pow(10.0, i / (count - 1.0));
  return t;
}

}  // namespace

TEST_CASE("power law fit recovers synthetic exponents") {
  const auto times = decade_times(0.1, 8);
  std::vector<double> norms;
  for (double t : times) norms.push_back(2.7 * std::pow(t, -0.8));
  const auto fit = detail::fit_power_law(times, norms, -0.8);
  CHECK(fit.slope == Catch::Approx(-0.8).margin(1e-12));
  CHECK(fit.deviation < 1e-12);
}

TEST_CASE("power law fit input validation") {
  CHECK_THROWS_AS(detail::fit_power_law({1, 2, 3, 4, 5}, {1, 1, 1, 1, 1}, -1.0),
                  std::invalid_argument);  // too few times
  CHECK_THROWS_AS(detail::fit_power_law({1, 2, 3, 4, 5, 6}, {1, 1, 1, 1, 1, 1}, -1.0),
                  std::invalid_argument);  // less than a decade
  CHECK_THROWS_AS(
      detail::fit_power_law(decade_times(0.1, 6), {1e-16, 1e-16, 1e-16, 1e-16, 1e-16, 1e-16}, -1.0),
      std::range_error);  // noise floor
  CHECK_THROWS_AS(fit_trace_decay(GridFunction(verify_grid(4, 2.0)), 4.0, 2.0,
                                  LorentzIndex::infinity(), decade_times(0.1, 6)),
                  std::invalid_argument);  // indices out of order
}

TEST_CASE("trace decay exponent for homogeneous data") {
  const auto g = verify_grid(28, 16.0, 0.7);
  const double d1 = 2.0, d2 = 4.0;
  const auto u0 = sample_field(g, [&](std::span<const double> x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return std::pow(r, -3.0 / d1);
  });
  const auto fit = fit_trace_decay(u0, d1, d2, LorentzIndex::infinity(), decade_times(0.05, 7));
  CHECK(fit.theory == Catch::Approx(-0.5));
  CHECK(fit.deviation < 0.15);
}

TEST_CASE("single layer decay exponents for homogeneous boundary data") {
  const auto g = verify_grid(24, 16.0, 0.85);
  const auto psi = sample_boundary_field(g, [](std::span<const double> x) {
    return 1.0 / std::hypot(x[0], x[1]);
  });
  const auto times = decade_times(0.05, 7);
  const auto fb = fit_g1_decay(psi, 2.0, 4.0, G1Target::Boundary, times);
  CHECK(fb.theory == Catch::Approx(-0.75));
  CHECK(fb.deviation < 0.15);
  const auto fi = fit_g1_decay(psi, 2.0, 4.0, G1Target::Interior, times);
  CHECK(fi.theory == Catch::Approx(-0.625));
  CHECK(fi.deviation < 0.15);
}

TEST_CASE("weighted time integral ladder converges and is linear") {
  const auto g = verify_grid(16, 12.0);
  const auto psi = sample_boundary_field(g, [](std::span<const double> x) {
    return std::hypot(x[0], x[1]) <= 3.0 ? 1.0 : 0.0;
  });
  YamazakiLadder lad;
  lad.rungs = 12;
  const auto rep = check_yamazaki_integral(psi, 2.0, 4.0, YamazakiKind::G1Boundary, lad);
  CHECK(rep.converged);
  CHECK(rep.input_norm > 0.0);
  CHECK(std::isfinite(rep.empirical_C));
  CHECK(rep.empirical_C > 0.0);

  BoundaryFunction scaled = psi;
  for (auto& v : scaled.values) v *= 3.0;
  const auto rep3 = check_yamazaki_integral(scaled, 2.0, 4.0, YamazakiKind::G1Boundary, lad);
  CHECK(rep3.integrals.back() ==
        Catch::Approx(3.0 * rep.integrals.back()).epsilon(1e-10));

  const auto phi = sample_field(g, [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  });
  const auto rep_g2 = check_yamazaki_integral(phi, 2.0, 4.0, lad);
  CHECK(std::isfinite(rep_g2.empirical_C));

  CHECK_THROWS_AS(check_yamazaki_integral(psi, 2.0, 4.0, YamazakiKind::G2, lad),
                  std::invalid_argument);
}

TEST_CASE("self similarity defect of an exactly scale-invariant field") {
  // u(x,t) = (|x|^2 + t)^{-1/4} satisfies u = lambda^{1/2} u(lambda x,
  // lambda^2 t), matching rho = 3
  const auto g = verify_grid(20, 8.0, 0.8);
  Solution sol;
  sol.times = {0.25, 1.0, 4.0};
  for (double t : sol.times) {
    FieldPair fp(g);
    fp.interior = sample_field(g, [t](std::span<const double> x) {
      return std::pow(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + t, -0.25);
    });
    fp.boundary = sample_boundary_field(g, [t](std::span<const double> x) {
      return std::pow(x[0] * x[0] + x[1] * x[1] + t, -0.25);
    });
    sol.fields.push_back(std::move(fp));
  }
  const auto rep = check_self_similarity(sol, 3.0, {0.5, 2.0});
  CHECK(rep.compared > 0);
  CHECK(rep.max_defect < 0.05);

  // a deliberately non-self-similar field scores much worse
  Solution bad = sol;
  for (auto& v : bad.fields[1].interior.values) v *= 2.0;
  const auto worse = check_self_similarity(bad, 3.0, {0.5, 2.0});
  CHECK(worse.max_defect > 0.5);

  CHECK_THROWS_AS(check_self_similarity(sol, 3.0, {3.0}), std::invalid_argument);
}

TEST_CASE("positivity report") {
  const auto g = verify_grid(6, 4.0);
  Solution sol;
  sol.times = {1.0};
  FieldPair fp(g);
  fp.interior.values.assign(g->interior_count(), 0.3);
  fp.boundary.values.assign(g->boundary_count(), 0.1);
  sol.fields.push_back(fp);
  CHECK(check_positivity(sol).pass);

  sol.fields[0].interior.values[5] = -1e-9;
  const auto rep = check_positivity(sol);
  CHECK_FALSE(rep.pass);
  CHECK(rep.min_value == -1e-9);
  CHECK(rep.max_value == 0.3);
}

TEST_CASE("symmetry defects via exact permutations") {
  const auto g = verify_grid(8, 4.0, 1.0, false);
  Solution sol;
  sol.times = {1.0};
  FieldPair even(g);
  even.interior = sample_field(g, [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1])) * (1.0 + x[2]);
  });
  even.boundary = sample_boundary_field(g, [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  sol.fields.push_back(even);
  CHECK(check_symmetry(sol, GridIsometry::RotateQuarter, Parity::Symmetric) < 1e-13);
  CHECK(check_symmetry(sol, GridIsometry::ReflectTangential, Parity::Symmetric) < 1e-13);

  Solution odd_sol;
  odd_sol.times = {1.0};
  FieldPair odd(g);
  odd.interior = sample_field(g, [](std::span<const double> x) {
    return x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  odd.boundary = sample_boundary_field(g, [](std::span<const double> x) {
    return x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  odd_sol.fields.push_back(odd);
  CHECK(check_symmetry(odd_sol, GridIsometry::ReflectTangential, Parity::Antisymmetric) < 1e-13);
  CHECK(check_symmetry(odd_sol, GridIsometry::ReflectTangential, Parity::Symmetric) > 0.1);
}
