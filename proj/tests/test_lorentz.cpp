#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "halfheat/grid.hpp"
#include "halfheat/lorentz.hpp"

using namespace halfheat;

namespace {

GridPtr small_grid() {
  GridSpec s;
  s.n = 3;
  s.radius = 2.0;
  s.cells_per_axis = 6;
  return Grid::create(s);
}

GridFunction random_field(const GridPtr& g, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  GridFunction f(g);
  for (auto& v : f.values) v = dist(rng);
  return f;
}

// Riemann-sum oracle for the quasi-norm over a fine log-spaced t grid.
double quasi_norm_oracle(const StepRearrangement& r, LorentzIndex idx) {
  const double t_lo = r.breakpoints.front() * 1e-4;
  const double t_hi = r.breakpoints.back();
  const int m = 200000;
  const double du = std::log(t_hi / t_lo) / m;
  if (idx.weak()) {
    double best = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double t = t_lo * std::exp(i * du);
      best = std::max(best, std::pow(t, 1.0 / idx.p) * r.eval(std::nextafter(t, 0.0)));
    }
    return best;
  }
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = t_lo * std::exp((i + 0.5) * du);
    acc += std::pow(std::pow(t, 1.0 / idx.p) * r.eval(t), idx.r) * du;
  }
  // contribution of (0, t_lo): f* constant there
  acc += std::pow(r.values.front(), idx.r) * (idx.p / idx.r) * std::pow(t_lo, idx.r / idx.p);
  return std::pow(acc, 1.0 / idx.r);
}

// Riemann-sum oracle for the f**-flavor norm.
double norm_oracle(const StepRearrangement& r, LorentzIndex idx) {
  const DoubleStar ds = double_star(r);
  const double t_lo = r.breakpoints.front() * 1e-4;
  const double t_hi = r.breakpoints.back() * 1e4;
  const int m = 400000;
  const double du = std::log(t_hi / t_lo) / m;
  if (idx.weak()) {
    double best = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double t = t_lo * std::exp(i * du);
      best = std::max(best, std::pow(t, 1.0 / idx.p) * ds.eval(t));
    }
    return best;
  }
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = t_lo * std::exp((i + 0.5) * du);
    acc += std::pow(std::pow(t, 1.0 / idx.p) * ds.eval(t), idx.r) * du;
  }
  acc += std::pow(r.values.front(), idx.r) * (idx.p / idx.r) * std::pow(t_lo, idx.r / idx.p);
  // exact tail beyond t_hi where f** = A/t
  acc += std::pow(ds.total_integral, idx.r) * std::pow(t_hi, idx.r / idx.p - idx.r) /
         (idx.r - idx.r / idx.p);
  return std::pow(acc, 1.0 / idx.r);
}

}  // namespace

TEST_CASE("rearrangement sorts, accumulates and merges ties") {
  const std::vector<double> values{2.0, -1.0, 3.0, 1.0};
  const std::vector<double> measures{0.5, 1.0, 0.25, 2.0};
  const auto r = rearrangement(values, measures);
  REQUIRE(r.values == std::vector<double>{3.0, 2.0, 1.0});
  REQUIRE(r.breakpoints.size() == 3);
  CHECK(r.breakpoints[0] == Catch::Approx(0.25));
  CHECK(r.breakpoints[1] == Catch::Approx(0.75));
  CHECK(r.breakpoints[2] == Catch::Approx(3.75));  // the two |v| = 1 samples merge
  CHECK(r.total_measure() == Catch::Approx(3.75));

  CHECK(r.eval(0.1) == 3.0);
  CHECK(r.eval(0.25) == 2.0);  // right continuity
  CHECK(r.eval(3.0) == 1.0);
  CHECK(r.eval(5.0) == 0.0);
}

TEST_CASE("distribution function matches the rearrangement") {
  const std::vector<double> values{2.0, -1.0, 3.0, 1.0};
  const std::vector<double> measures{0.5, 1.0, 0.25, 2.0};
  const auto r = rearrangement(values, measures);
  CHECK(distribution_function(r, 0.0) == Catch::Approx(3.75));
  CHECK(distribution_function(r, 0.5) == Catch::Approx(3.75));
  CHECK(distribution_function(r, 1.0) == Catch::Approx(0.75));  // strict inequality
  CHECK(distribution_function(r, 2.5) == Catch::Approx(0.25));
  CHECK(distribution_function(r, 3.0) == 0.0);
  CHECK_THROWS_AS(distribution_function(r, -1.0), std::invalid_argument);
}

TEST_CASE("rearrangement is equimeasurable with the samples") {
  std::mt19937 rng(11);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  const auto r = rearrangement(f);
  for (double s : {0.1, 0.5, 1.0, 2.0}) {
    double lam = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      if (std::abs(f.values[i]) > s) lam += f.cell_measures()[i];
    CHECK(distribution_function(r, s) == Catch::Approx(lam));
  }
}

TEST_CASE("double star running average against direct integration") {
  std::mt19937 rng(3);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  const auto r = rearrangement(f);
  const auto ds = double_star(r);
  for (double t : {0.01, 0.3, 1.7, 20.0, 500.0}) {
    const int m = 200000;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += r.eval((i + 0.5) * t / m) * (t / m);
    CHECK(ds.eval(t) == Catch::Approx(acc / t).epsilon(1e-5));
  }
}

TEST_CASE("quasi-norm against the Riemann oracle") {
  std::mt19937 rng(5);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  const auto r = rearrangement(f);
  for (double p : {1.5, 2.0, 4.0}) {
    for (double rr : {1.0, 2.0, 3.5}) {
      const LorentzIndex idx{p, rr};
      CHECK(quasi_norm_star(r, idx) == Catch::Approx(quasi_norm_oracle(r, idx)).epsilon(2e-4));
    }
    const LorentzIndex weak{p, LorentzIndex::infinity()};
    CHECK(quasi_norm_star(r, weak) == Catch::Approx(quasi_norm_oracle(r, weak)).epsilon(2e-4));
  }
}

TEST_CASE("norm against the Riemann oracle") {
  std::mt19937 rng(9);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  const auto r = rearrangement(f);
  for (double p : {1.5, 2.0, 4.0}) {
    for (double rr : {1.0, 2.0, 3.5}) {
      const LorentzIndex idx{p, rr};
      CHECK(lorentz_norm(r, idx) == Catch::Approx(norm_oracle(r, idx)).epsilon(2e-4));
    }
    const LorentzIndex weak{p, LorentzIndex::infinity()};
    CHECK(lorentz_norm(r, weak) == Catch::Approx(norm_oracle(r, weak)).epsilon(2e-4));
  }
}

TEST_CASE("norm equivalence with tight slack") {
  std::mt19937 rng(17);
  const auto g = small_grid();
  for (int k = 0; k < 25; ++k) {
    const auto f = random_field(g, rng);
    for (double p : {1.5, 2.0, 4.0, 6.0}) {
      const LorentzIndex idx{p, LorentzIndex::infinity()};
      const double star = quasi_norm_star(f, idx);
      const double full = lorentz_norm(f, idx);
      CHECK(star <= full * (1.0 + 1e-12));
      CHECK(full <= (p / (p - 1.0)) * star * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("diagonal Lorentz index recovers the Lp norm") {
  std::mt19937 rng(23);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  for (double p : {1.5, 2.0, 3.0}) {
    CHECK(quasi_norm_star(f, {p, p}) == Catch::Approx(lp_norm(f, p)).epsilon(1e-12));
  }
}

TEST_CASE("norms are absolutely homogeneous") {
  std::mt19937 rng(29);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  GridFunction h = f;
  for (auto& v : h.values) v *= -2.5;
  for (double p : {1.5, 4.0}) {
    const LorentzIndex weak{p, LorentzIndex::infinity()};
    CHECK(quasi_norm_star(h, weak) == Catch::Approx(2.5 * quasi_norm_star(f, weak)).epsilon(1e-13));
    CHECK(lorentz_norm(h, weak) == Catch::Approx(2.5 * lorentz_norm(f, weak)).epsilon(1e-13));
    CHECK(lorentz_norm(h, {p, 2.0}) == Catch::Approx(2.5 * lorentz_norm(f, {p, 2.0})).epsilon(1e-13));
  }
}

TEST_CASE("dilation law is exact at the step level") {
  // f on G versus f(lambda .) sampled on G/lambda: same values, measures
  // scaled by lambda^{-n}, so the quasi-norm scales by lambda^{-n/p}
  std::mt19937 rng(31);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  const double lambda = 2.0;
  const int n = 3;
  std::vector<double> scaled_measures(f.cell_measures());
  for (auto& m : scaled_measures) m /= std::pow(lambda, n);
  const auto r1 = rearrangement(f.values, f.cell_measures());
  const auto r2 = rearrangement(f.values, scaled_measures);
  for (double p : {1.5, 2.0, 4.0}) {
    const LorentzIndex weak{p, LorentzIndex::infinity()};
    CHECK(quasi_norm_star(r2, weak) ==
          Catch::Approx(std::pow(lambda, -n / p) * quasi_norm_star(r1, weak)).epsilon(1e-13));
  }
}

TEST_CASE("zero field has zero norms and empty cases are handled") {
  const auto g = small_grid();
  const GridFunction z(g, 0.0);
  CHECK(quasi_norm_star(z, {2.0, LorentzIndex::infinity()}) == 0.0);
  CHECK(lorentz_norm(z, {2.0, LorentzIndex::infinity()}) == 0.0);
  CHECK(lorentz_norm(z, {2.0, 1.0}) == 0.0);

  LorentzIndex bad{1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  LorentzIndex bad2{2.0, 0.5};
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

TEST_CASE("composite interior plus boundary norm") {
  std::mt19937 rng(37);
  const auto g = small_grid();
  const auto f = random_field(g, rng);
  BoundaryFunction b(g);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (auto& v : b.values) v = dist(rng);
  const double p = 6.0, q = 4.0;
  CHECK(xpq_norm(f, b, p, q) ==
        Catch::Approx(lorentz_norm(f, {p, LorentzIndex::infinity()}) +
                      lorentz_norm(b, {q, LorentzIndex::infinity()})));
}
