#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "halfheat/kernel.hpp"

using namespace halfheat;

TEST_CASE("half-space kernel is whole-space kernel plus reflection") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0), uv(0.1, 2.0);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> x{u(rng), u(rng), uv(rng)};
    const std::vector<double> y{u(rng), u(rng), uv(rng)};
    const double t = uv(rng);
    std::vector<double> d(3), ds(3);
    for (int a = 0; a < 3; ++a) d[a] = x[a] - y[a];
    ds[0] = d[0];
    ds[1] = d[1];
    ds[2] = x[2] + y[2];
    const double expected = whole_space_kernel(d, t) + whole_space_kernel(ds, t);
    CHECK(half_space_kernel(x, y, t) == Catch::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("kernel rejects nonpositive times") {
  const std::vector<double> x{0.0, 0.0, 1.0};
  CHECK_THROWS_AS(half_space_kernel(x, x, 0.0), std::domain_error);
  CHECK_THROWS_AS(half_space_kernel(x, x, -1.0), std::domain_error);
  CHECK_THROWS_AS(whole_space_kernel(x, 0.0), std::domain_error);
}

TEST_CASE("parabolic scaling identity") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(-3.0, 3.0), uv(0.05, 2.0);
  for (double lambda : {0.5, 2.0, 7.0}) {
    for (int k = 0; k < 200; ++k) {
      std::vector<double> x{u(rng), u(rng), uv(rng)};
      std::vector<double> y{u(rng), u(rng), uv(rng)};
      const double t = uv(rng);
      std::vector<double> lx(3), ly(3);
      for (int a = 0; a < 3; ++a) { lx[a] = lambda * x[a]; ly[a] = lambda * y[a]; }
      const double lhs = std::pow(lambda, 3) * half_space_kernel(lx, ly, lambda * lambda * t);
      const double rhs = half_space_kernel(x, y, t);
      CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("axis segment integral against midpoint refinement") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(-2.0, 2.0), uv(0.05, 1.5);
  for (int k = 0; k < 20; ++k) {
    const double x = u(rng), t = uv(rng);
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 1e-3) hi = lo + 1e-3;
    const int m = 40000;
    const double h = (hi - lo) / m;
    double acc = 0.0;
    const double c = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
    for (int i = 0; i < m; ++i) {
      const double y = lo + (i + 0.5) * h;
      acc += c * std::exp(-(x - y) * (x - y) / (4.0 * t)) * h;
    }
    CHECK(axis_segment_integral(x, lo, hi, t) == Catch::Approx(acc).epsilon(1e-8));
  }
}

TEST_CASE("one dimensional conservation of the exact cell integrals") {
  // erf telescoping: the sum over a partition equals the integral over
  // the whole interval regardless of the partition
  const double t = 0.37, x = 0.4;
  const double whole = axis_segment_integral(x, -20.0, 20.0, t);
  double parts = 0.0;
  double lo = -20.0;
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  while (lo < 20.0) {
    const double hi = std::min(20.0, lo + u(rng));
    parts += axis_segment_integral(x, lo, hi, t);
    lo = hi;
  }
  CHECK(parts == Catch::Approx(whole).epsilon(1e-15));
  CHECK(whole == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pointwise kernel bound holds with the calibrated constant") {
  // analytic sup of (1+r^2)^{n/2} g(r) over the scale-invariant family
  const int n = 3;
  const double c0 = calibrate_pointwise_constant(n);
  const double analytic = std::pow(4.0 * std::numbers::pi, -0.5 * n) *
                          std::exp(-(2.0 * n - 1.0) / 4.0) * std::pow(2.0 * n, 0.5 * n);
  CHECK(c0 == Catch::Approx(analytic).epsilon(1e-3));

  std::mt19937 rng(59);
  std::uniform_real_distribution<double> u(-4.0, 4.0), uv(0.05, 4.0);
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> x{u(rng), u(rng), uv(rng)};
    CHECK(check_pointwise_bound(x, uv(rng), c0 * (1.0 + 1e-9)));
  }
  CHECK_FALSE(check_pointwise_bound(std::vector<double>{0.0, 0.0, 0.0}, 1.0, 1e-6));
}

TEST_CASE("kernel point validation") {
  KernelPoint kp;
  kp.x = {0.0, 0.0, 1.0};
  kp.y = {0.0, 0.0, 1.0};
  kp.t = -1.0;
  CHECK_THROWS_AS(kp.validate(), std::domain_error);
  kp.t = 1.0;
  CHECK_NOTHROW(kp.validate());
  CHECK(half_space_kernel(kp) == Catch::Approx(half_space_kernel(kp.x, kp.y, kp.t)));
}
