#include "memkern/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memkern/errors.hpp"

namespace memkern {

namespace {

constexpr double kDiagonalCutoff = 1e-12;
constexpr double kFirstKindConsistency = 1e-8;

}  // namespace

GridFunction solve_second_kind(double c, const GridFunction& kernel, const GridFunction& rhs) {
  require_same_grid(kernel, rhs);
  const double dt = kernel.grid().dt();
  const double cutoff = kDiagonalCutoff * std::max(1.0, std::abs(c));
  const double diagonal = c + 0.5 * dt * kernel[0];
  if (std::abs(c) < cutoff || std::abs(diagonal) < cutoff) {
    throw SolverError("second-kind Volterra equation is degenerate: effective diagonal vanishes");
  }
  const auto kv = kernel.values();
  std::vector<double> x(rhs.size(), 0.0);
  x[0] = rhs[0] / c;
  for (std::size_t n = 1; n < x.size(); ++n) {
    double s = 0.5 * kv[n] * x[0];
    for (std::size_t i = 1; i < n; ++i) s += kv[n - i] * x[i];
    x[n] = (rhs[n] - dt * s) / diagonal;
  }
  return GridFunction(rhs.grid(), std::move(x));
}

GridFunction solve_first_kind(const GridFunction& kernel, const GridFunction& rhs,
                              const FirstKindDerivatives& derivatives) {
  require_same_grid(kernel, rhs);
  const double k0 = kernel[0];
  if (std::abs(k0) < kDiagonalCutoff * std::max(1.0, kernel.max_abs())) {
    throw SolverError("first-kind Volterra equation needs a kernel that is nonzero at t = 0");
  }
  if (std::abs(rhs[0]) > kFirstKindConsistency * rhs.max_abs()) {
    throw SolverError("first-kind Volterra equation: right-hand side must vanish at t = 0");
  }
  const GridFunction dk = derivatives.kernel ? *derivatives.kernel : differentiate(kernel, 1);
  const GridFunction dr = derivatives.rhs ? *derivatives.rhs : differentiate(rhs, 1);
  return solve_second_kind(k0, dk, dr);
}

ResolventKernel resolvent(const GridFunction& h1, double lambda) {
  if (std::abs(h1[0]) > 1e-12 * std::max(1.0, h1.max_abs())) {
    throw std::invalid_argument("resolvent: lifted kernel must vanish at t = 0");
  }
  // k - lambda h1 * k = h1; the diagonal weight is dt/2 * h1(0) = 0, so marching is explicit
  GridFunction k = solve_second_kind(1.0, -lambda * h1, h1);
  return ResolventKernel{lambda, std::move(k), h1};
}

GridFunction resolvent_neumann(const GridFunction& h1, double lambda, int terms) {
  if (terms < 1) throw std::invalid_argument("resolvent_neumann: need at least one term");
  GridFunction sum = h1;
  GridFunction term = h1;
  double weight = 1.0;
  for (int m = 2; m <= terms; ++m) {
    term = convolve(h1, term);
    weight *= lambda;
    sum += weight * term;
  }
  return sum;
}

double bound_M(const GridFunction& h) {
  std::vector<double> a(h.size());
  for (std::size_t n = 0; n < a.size(); ++n) a[n] = std::abs(h[n]);
  return h.grid().horizon() * integrate(GridFunction(h.grid(), std::move(a)));
}

namespace {

BoundsReport evaluate_bounds(const ResolventKernel& rk, double M, BoundsReport report) {
  const TimeGrid& grid = rk.k.grid();
  const double lambda = rk.lambda;
  report.M = M;
  if (!(lambda > 0.0)) {
    report.precondition_ok = false;
    report.precondition_message = "bounds require lambda > 0";
  }
  report.upper_margin.resize(rk.k.size());
  report.lower_margin.resize(rk.k.size());
  for (std::size_t n = 0; n < rk.k.size(); ++n) {
    const double bound = M * std::exp(lambda * M * grid.node(n));
    report.upper_margin[n] = bound * (1.0 + kBoundRelativeSlack) - rk.k[n];
    report.lower_margin[n] = rk.k[n] + kPositivitySlack;
    if (report.upper_margin[n] < 0.0 || report.lower_margin[n] < 0.0) report.pointwise_ok = false;
  }
  std::vector<double> sq(rk.k.size());
  for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = rk.k[n] * rk.k[n];
  report.l2_norm_sq = integrate(GridFunction(grid, std::move(sq)));
  if (lambda > 0.0) {
    const double T = grid.horizon();
    report.l2_bound = M * std::exp(2.0 * lambda * M * T) / (2.0 * lambda);
    report.l2_ok = report.l2_norm_sq <= report.l2_bound * (1.0 + kBoundRelativeSlack) + kPositivitySlack;
  } else {
    report.l2_ok = false;
  }
  return report;
}

}  // namespace

BoundsReport check_bounds(const ResolventKernel& rk, double M) {
  BoundsReport report;
  if (rk.source_lift.min() < -kPositivitySlack) {
    report.precondition_ok = false;
    report.precondition_message = "lifted kernel is sign-indefinite";
  }
  return evaluate_bounds(rk, M, std::move(report));
}

BoundsReport check_bounds(const ResolventKernel& rk, const GridFunction& h) {
  require_same_grid(rk.k, h);
  BoundsReport report;
  if (h.min() < -kPositivitySlack) {
    report.precondition_ok = false;
    report.precondition_message = "kernel h is sign-indefinite";
  }
  return evaluate_bounds(rk, bound_M(h), std::move(report));
}

}  // namespace memkern
