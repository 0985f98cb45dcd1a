#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "memkern/errors.hpp"
#include "memkern/volterra.hpp"
#include "oracles.hpp"

using namespace memkern;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

GridFunction t_pow(const TimeGrid& g, double p, double scale = 1.0) {
  return GridFunction::sample(g, [=](double t) { return scale * std::pow(t, p); });
}

// Piecewise-linear nonnegative function with nodes at 0, 0.25, ..., 1.
GridFunction random_pl(const TimeGrid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> knots(5);
  for (auto& k : knots) k = u(rng);
  return GridFunction::sample(g, [&](double t) {
    const double s = std::min(t / g.horizon(), 1.0) * 4.0;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(s), 3);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * knots[i] + w * knots[i + 1];
  });
}

}  // namespace

TEST_CASE("second kind: identity and closed forms") {
  const TimeGrid grid(1.0, 400);
  const auto rhs = GridFunction::sample(grid, [](double t) { return std::sin(t) + 2.0; });
  CHECK(max_abs_diff(solve_second_kind(1.0, GridFunction::zeros(grid), rhs), rhs) == 0.0);

  SUBCASE("x + 1*x = 1 has x = exp(-t)") {
    const auto one = GridFunction::constant(grid, 1.0);
    const auto x = solve_second_kind(1.0, one, one);
    // substitution oracle: residual of the exact solution under the exact integral
    const double t = 0.7;
    CHECK(std::exp(-t) + oracle::simpson([](double s) { return std::exp(-s); }, 0.0, t) ==
          doctest::Approx(1.0).epsilon(1e-12));
    double err = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) err = std::max(err, std::abs(x[n] - std::exp(-grid.node(n))));
    CHECK(err <= 1e-4);
  }
  SUBCASE("x + 2t*x = 1 + t^2 has x = 1") {
    const auto x = solve_second_kind(1.0, t_pow(grid, 1.0, 2.0),
                                     GridFunction::sample(grid, [](double t) { return 1.0 + t * t; }));
    const double dt = grid.dt();
    for (std::size_t n = 0; n < x.size(); ++n) CHECK(std::abs(x[n] - 1.0) <= dt * dt);
  }
  SUBCASE("homogeneous equation marches zeros exactly") {
    const auto x = solve_second_kind(0.5, t_pow(grid, 2.0, -3.0), GridFunction::zeros(grid));
    CHECK(x.max_abs() == 0.0);
  }
}

TEST_CASE("second kind: refinement order two") {
  auto err = [](std::size_t N) {
    const TimeGrid grid(1.0, N);
    const auto one = GridFunction::constant(grid, 1.0);
    const auto x = solve_second_kind(1.0, one, one);
    double e = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) e = std::max(e, std::abs(x[n] - std::exp(-grid.node(n))));
    return e;
  };
  const double p = std::log2(err(100) / err(200));
  CHECK(p == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("second kind: degenerate diagonal") {
  const TimeGrid grid(1.0, 10);
  const double dt = grid.dt();
  // c + dt/2 kernel(0) = 0
  const auto kernel = GridFunction::constant(grid, -2.0 / dt);
  CHECK_THROWS_AS(solve_second_kind(1.0, kernel, GridFunction::constant(grid, 1.0)), SolverError);
  CHECK_THROWS_AS(solve_second_kind(0.0, GridFunction::zeros(grid), GridFunction::constant(grid, 1.0)),
                  SolverError);
}

TEST_CASE("first kind") {
  const TimeGrid grid(1.0, 400);
  const double dt = grid.dt();
  const auto one = GridFunction::constant(grid, 1.0);

  CHECK(solve_first_kind(one, GridFunction::zeros(grid)).max_abs() == 0.0);

  const auto x = solve_first_kind(one, t_pow(grid, 1.0));
  for (std::size_t n = 0; n < x.size(); ++n) CHECK(std::abs(x[n] - 1.0) <= dt * dt);

  // rhs generated by the Simpson convolution oracle from the true x = 1
  const auto kernel = GridFunction::sample(grid, [](double t) { return 1.0 + t * t; });
  const auto rhs = GridFunction::sample(grid, [](double t) {
    return oracle::convolution([](double s) { return 1.0 + s * s; }, [](double) { return 1.0; }, t, 200);
  });
  CHECK(rhs[400] == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(1e-12));
  const auto y = solve_first_kind(kernel, rhs);
  for (std::size_t n = 0; n < y.size(); ++n) CHECK(std::abs(y[n] - 1.0) <= 5.0 * dt * dt);

  CHECK_THROWS_AS(solve_first_kind(t_pow(grid, 1.0), t_pow(grid, 2.0)), SolverError);
  CHECK_THROWS_AS(solve_first_kind(one, GridFunction::constant(grid, 1.0)), SolverError);
}

TEST_CASE("resolvent: trivial cases") {
  const TimeGrid grid(1.0, 100);
  const auto h1 = t_pow(grid, 2.0, 0.5);
  CHECK(max_abs_diff(resolvent(h1, 0.0).k, h1) == 0.0);
  CHECK(resolvent(GridFunction::zeros(grid), 3.0).k.max_abs() == 0.0);
  CHECK(resolvent(h1, 5.0).k[0] == 0.0);
  CHECK_THROWS_AS(resolvent(GridFunction::constant(grid, 1.0), 1.0), std::invalid_argument);
}

TEST_CASE("resolvent: Laplace oracle for h1 = t^2/2") {
  const TimeGrid grid(1.0, 800);
  const auto h1 = t_pow(grid, 2.0, 0.5);
  for (double lambda : {1.0, kPi2}) {
    const auto k = resolvent(h1, lambda).k;
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t n = 0; n < k.size(); ++n) {
      const double ref = oracle::inv_laplace_cubic(lambda, grid.node(n));
      err = std::max(err, std::abs(k[n] - ref));
      scale = std::max(scale, std::abs(ref));
    }
    if (lambda == 1.0) {
      CHECK(err <= 1e-6);
    } else {
      CHECK(err <= 1e-6 * scale);
    }
  }
}

TEST_CASE("resolvent: identity, Neumann agreement, positivity on random kernels") {
  std::mt19937 rng(2024);
  const TimeGrid grid(1.0, 400);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 8; ++trial) {
    const auto h = random_pl(grid, rng);
    const auto h1 = lift1(h);
    const double M = bound_M(h);
    for (double lambda : {0.3, 1.0, 4.0 * kPi2}) {
      const auto rk = resolvent(h1, lambda);
      std::vector<double> xv(grid.size());
      for (auto& v : xv) v = nd(rng);
      const GridFunction x(grid, xv);
      const auto y = x + lambda * convolve(rk.k, x);
      const auto back = y - lambda * convolve(h1, y);
      CHECK(max_abs_diff(back, x) <= 1e-8 * x.max_abs());
      CHECK(rk.k.min() >= -1e-10);
      if (lambda * M * grid.horizon() <= 0.5) {
        CHECK(max_abs_diff(resolvent_neumann(h1, lambda, 20), rk.k) <= 1e-8);
      }
    }
  }
}

TEST_CASE("resolvent_neumann") {
  const TimeGrid grid(1.0, 200);
  const auto h1 = t_pow(grid, 2.0, 0.5);
  CHECK(max_abs_diff(resolvent_neumann(h1, 7.0, 1), h1) == 0.0);
  CHECK(max_abs_diff(resolvent_neumann(h1, 0.0, 12), h1) == 0.0);
  CHECK(max_abs_diff(resolvent_neumann(h1, 1.0, 20), resolvent(h1, 1.0).k) <= 1e-8);
  CHECK_THROWS_AS(resolvent_neumann(h1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("bound_M") {
  const TimeGrid g1(1.0, 50);
  const TimeGrid g2(2.0, 50);
  CHECK(bound_M(GridFunction::zeros(g1)) == 0.0);
  CHECK(bound_M(GridFunction::constant(g1, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bound_M(t_pow(g2, 1.0)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(bound_M(GridFunction::constant(g1, -2.0)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("check_bounds") {
  const TimeGrid grid(1.0, 400);
  SUBCASE("h = 0") {
    const auto h = GridFunction::zeros(grid);
    const auto rep = check_bounds(resolvent(lift1(h), 1.0), h);
    CHECK(rep.ok());
    CHECK(rep.M == 0.0);
  }
  SUBCASE("h = 1, lambda = 1 and pi^2") {
    const auto h = GridFunction::constant(grid, 1.0);
    for (double lambda : {1.0, kPi2}) {
      const auto rk = resolvent(lift1(h), lambda);
      const auto rep = check_bounds(rk, h);
      CHECK(rep.precondition_ok);
      CHECK(rep.pointwise_ok);
      CHECK(rep.l2_ok);
      CHECK(rk.k.back() <= std::exp(lambda));
      // the Laplace oracle agrees with the checked kernel
      CHECK(std::abs(rk.k.back() - oracle::inv_laplace_cubic(lambda, 1.0)) <= 1e-4 * rk.k.back());
    }
  }
  SUBCASE("sign-indefinite h is reported") {
    const auto h = GridFunction::sample(grid, [](double t) { return std::cos(6.0 * t); });
    const auto rep = check_bounds(resolvent(lift1(h), 1.0), h);
    CHECK_FALSE(rep.precondition_ok);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.precondition_message.empty());
  }
  SUBCASE("lambda must be positive") {
    const auto h = GridFunction::constant(grid, 1.0);
    CHECK_FALSE(check_bounds(resolvent(lift1(h), -1.0), h).precondition_ok);
  }
}
