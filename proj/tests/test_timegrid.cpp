#include <doctest.h>

#include <cmath>
#include <random>

#include "memkern/timegrid.hpp"
#include "oracles.hpp"

using namespace memkern;

namespace {

GridFunction random_function(const TimeGrid& grid, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(grid.size());
  for (auto& x : v) x = u(rng);
  return GridFunction(grid, std::move(v));
}

double conv_error_tt(std::size_t N) {
  const TimeGrid grid(1.0, N);
  const auto t = GridFunction::sample(grid, [](double s) { return s; });
  const auto c = convolve(t, t);
  double err = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double tn = grid.node(n);
    err = std::max(err, std::abs(c[n] - tn * tn * tn / 6.0));
  }
  return err;
}

}  // namespace

TEST_CASE("time grid nodes and validation") {
  const TimeGrid grid(2.0, 8);
  CHECK(grid.size() == 9);
  CHECK(grid.node(0) == 0.0);
  CHECK(grid.node(8) == 2.0);
  CHECK(grid.dt() == doctest::Approx(0.25));
  CHECK_THROWS_AS(TimeGrid(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(grid, std::vector<double>(3, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(grid, std::vector<double>(9, NAN)), std::invalid_argument);
}

TEST_CASE("convolve: closed-form cases") {
  const TimeGrid grid(1.0, 100);
  const auto one = GridFunction::constant(grid, 1.0);
  const auto zero = GridFunction::zeros(grid);

  SUBCASE("zero annihilates") {
    const auto b = GridFunction::sample(grid, [](double t) { return std::exp(t); });
    CHECK(convolve(zero, b).max_abs() == 0.0);
  }
  SUBCASE("1 * 1 = t exactly") {
    const auto c = convolve(one, one);
    CHECK(c[0] == 0.0);
    for (std::size_t n = 0; n < c.size(); ++n) CHECK(c[n] == doctest::Approx(grid.node(n)).epsilon(1e-14));
  }
  SUBCASE("t * t against the Simpson oracle and t^3/6") {
    const auto t = GridFunction::sample(grid, [](double s) { return s; });
    const auto c = convolve(t, t);
    const double dt = grid.dt();
    for (std::size_t n = 0; n < c.size(); n += 10) {
      const double tn = grid.node(n);
      const double ref = oracle::convolution([](double s) { return s; }, [](double s) { return s; }, tn);
      CHECK(std::abs(ref - tn * tn * tn / 6.0) < 1e-12);
      CHECK(std::abs(c[n] - ref) <= dt * dt);
    }
  }
  SUBCASE("grid mismatch") {
    const TimeGrid other(1.0, 50);
    CHECK_THROWS_AS(convolve(one, GridFunction::constant(other, 1.0)), std::invalid_argument);
  }
}

TEST_CASE("convolve: commutative and bilinear on random data") {
  std::mt19937 rng(7);
  const TimeGrid grid(1.5, 120);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_function(grid, rng);
    const auto b = random_function(grid, rng);
    const auto d = random_function(grid, rng);
    CHECK(max_abs_diff(convolve(a, b), convolve(b, a)) <= 1e-14);
    const auto lhs = convolve(2.5 * a + d, b);
    const auto rhs = 2.5 * convolve(a, b) + convolve(d, b);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-13);
  }
}

TEST_CASE("convolve and lift1: refinement order two") {
  const auto orders = oracle::observed_orders({conv_error_tt(50), conv_error_tt(200)});
  CHECK(orders[0] / 2.0 == doctest::Approx(2.0).epsilon(0.1));  // N -> 4N spans two halvings

  auto lift_error = [](std::size_t N) {
    const TimeGrid grid(1.0, N);
    const auto r = GridFunction::sample(grid, [](double t) { return std::cos(3.0 * t); });
    const auto l = lift1(r);
    double err = 0.0;
    for (std::size_t n = 0; n < l.size(); ++n) {
      const double t = grid.node(n);
      err = std::max(err, std::abs(l[n] - (1.0 - std::cos(3.0 * t)) / 9.0));
    }
    return err;
  };
  const double p = std::log2(lift_error(40) / lift_error(160)) / 2.0;
  CHECK(p == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("lift1: closed forms") {
  const TimeGrid grid(1.0, 200);
  const double dt = grid.dt();
  CHECK(lift1(GridFunction::zeros(grid)).max_abs() == 0.0);

  const auto l1 = lift1(GridFunction::constant(grid, 1.0));
  const auto lt = lift1(GridFunction::sample(grid, [](double t) { return t; }));
  CHECK(l1[0] == 0.0);
  for (std::size_t n = 0; n < l1.size(); ++n) {
    const double t = grid.node(n);
    CHECK(std::abs(l1[n] - t * t / 2.0) <= dt * dt);
    CHECK(std::abs(lt[n] - t * t * t / 6.0) <= dt * dt);
  }
  // slope at t = 0 vanishes to second order
  CHECK(std::abs(differentiate(l1, 1)[0]) <= dt * dt);
}

TEST_CASE("cumulative integral and trapezoid") {
  const TimeGrid grid(2.0, 64);
  const auto r = GridFunction::sample(grid, [](double t) { return 3.0 * t + 1.0; });
  const auto c = cumulative_integral(r);
  CHECK(c.back() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(integrate(r) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("differentiate: polynomial exactness and order") {
  const TimeGrid grid(1.0, 20);
  const auto c = GridFunction::constant(grid, 4.2);
  CHECK(differentiate(c, 1).max_abs() <= 1e-10);

  const auto sq = GridFunction::sample(grid, [](double t) { return t * t; });
  const auto d2 = differentiate(sq, 2);
  for (std::size_t n = 0; n < d2.size(); ++n) CHECK(std::abs(d2[n] - 2.0) <= 1e-10);

  const auto cube = GridFunction::sample(grid, [](double t) { return t * t * t; });
  const auto d3 = differentiate(cube, 3);
  for (std::size_t n = 0; n < d3.size(); ++n) CHECK(std::abs(d3[n] - 6.0) <= 1e-7);

  auto err = [](std::size_t N) {
    const TimeGrid g(1.0, N);
    const auto d = differentiate(GridFunction::sample(g, [](double t) { return std::sin(t); }), 1);
    double e = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) e = std::max(e, std::abs(d[n] - std::cos(g.node(n))));
    return e;
  };
  const double dt = 1.0 / 200.0;
  CHECK(err(200) <= dt * dt);
  const double p = std::log2(err(200) / err(400));
  CHECK(p >= 1.9);
  CHECK(p <= 2.1);

  for (int order = 2; order <= 3; ++order) {
    auto e = [order](std::size_t N) {
      const TimeGrid g(1.0, N);
      const auto d = differentiate(GridFunction::sample(g, [](double t) { return std::exp(2.0 * t); }), order);
      double m = 0.0;
      for (std::size_t n = 0; n < d.size(); ++n) {
        m = std::max(m, std::abs(d[n] - std::pow(2.0, order) * std::exp(2.0 * g.node(n))));
      }
      return m;
    };
    const double q = std::log2(e(100) / e(200));
    CHECK(q == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("differentiate: coarse grids rejected") {
  const TimeGrid g3(1.0, 3);
  const TimeGrid g5(1.0, 5);
  CHECK_THROWS_AS(differentiate(GridFunction::zeros(g3), 1), std::invalid_argument);
  CHECK_THROWS_AS(differentiate(GridFunction::zeros(g5), 3), std::invalid_argument);
  CHECK_NOTHROW(differentiate(GridFunction::zeros(g5), 2));
  CHECK_THROWS_AS(differentiate(GridFunction::zeros(g5), 4), std::invalid_argument);
}

TEST_CASE("second difference of lift1 recovers the function") {
  auto err = [](std::size_t N) {
    const TimeGrid grid(1.0, N);
    const auto r = GridFunction::sample(grid, [](double t) { return std::exp(-t) + t; });
    const auto back = differentiate(lift1(r), 2);
    double e = 0.0;
    for (std::size_t n = 1; n + 1 < back.size(); ++n) e = std::max(e, std::abs(back[n] - r[n]));
    return e;
  };
  CHECK(err(100) <= 10.0 / (100.0 * 100.0));
  CHECK(err(200) <= 10.0 / (200.0 * 200.0));
}

TEST_CASE("differentiate: fourth-order stencils") {
  const TimeGrid g5(1.0, 5);
  CHECK_THROWS_AS(differentiate(GridFunction::zeros(g5), 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(differentiate(GridFunction::zeros(TimeGrid(1.0, 20)), 1, 3), std::invalid_argument);

  const TimeGrid grid(1.0, 20);
  const auto quartic = GridFunction::sample(grid, [](double t) { return t * t * t * t - t; });
  const auto d = differentiate(quartic, 1, 4);
  for (std::size_t n = 0; n < d.size(); ++n) {
    const double t = grid.node(n);
    CHECK(std::abs(d[n] - (4.0 * t * t * t - 1.0)) <= 1e-10);
  }

  auto err = [](std::size_t N) {
    const TimeGrid g(1.0, N);
    const auto d1 = differentiate(GridFunction::sample(g, [](double t) { return std::sin(3.0 * t); }), 1, 4);
    double e = 0.0;
    for (std::size_t n = 0; n < d1.size(); ++n) e = std::max(e, std::abs(d1[n] - 3.0 * std::cos(3.0 * g.node(n))));
    return e;
  };
  CHECK(std::log2(err(50) / err(100)) == doctest::Approx(4.0).epsilon(0.1));
}
