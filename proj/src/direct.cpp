#include "memkern/direct.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "memkern/errors.hpp"
#include "memkern/volterra.hpp"

namespace memkern {

namespace detail {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  // lowest failing index wins so the reported error does not depend on scheduling
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

Kernel::Kernel(GridFunction values, KernelRole role, std::optional<GridFunction> derivative)
    : values_(std::move(values)), role_(role), derivative_(std::move(derivative)) {
  if (derivative_) require_same_grid(values_, *derivative_);
}

GridFunction Kernel::derivative() const {
  return derivative_ ? *derivative_ : differentiate(values_, 1);
}

bool MeasurementTrace::has_analytic(int order) const {
  switch (order) {
    case 1: return d1.has_value();
    case 2: return d2.has_value();
    case 3: return d3.has_value();
    default: return false;
  }
}

GridFunction MeasurementTrace::derivative(int order) const {
  if (order == 1 && d1) return *d1;
  if (order == 2 && d2) return *d2;
  if (order == 3 && d3) return *d3;
  return differentiate(g, order);
}

double MeasurementTrace::derivative_inconsistency() const {
  double worst = 0.0;
  if (d1) worst = std::max(worst, max_abs_diff(*d1, differentiate(g, 1)));
  if (d2) worst = std::max(worst, max_abs_diff(*d2, differentiate(g, 2)));
  if (d3) worst = std::max(worst, max_abs_diff(*d3, differentiate(g, 3)));
  return worst;
}

GridFunction solve_mode_ivp2(double lambda, const Kernel& h, double u0, double c,
                             const GridFunction& f) {
  require_same_grid(h.values(), f);
  const TimeGrid& grid = f.grid();
  GridFunction rhs = GridFunction::sample(grid, [&](double t) { return u0 + c * t; }) + lift1(f);
  // u - lambda h1 * u = rhs with h1(0) = 0: explicit marching, u(0) = u0
  return solve_second_kind(1.0, -lambda * lift1(h.values()), rhs);
}

ModalSolution solve_ivp2(const ModalProblemData& data, const Kernel& h, unsigned threads) {
  data.validate();
  const std::size_t J = data.op.modes();
  std::vector<std::optional<GridFunction>> slots(J);
  detail::parallel_for(J, threads, [&](std::size_t i) {
    slots[i] = solve_mode_ivp2(data.op.eigenvalue(i + 1), h, data.u0[i], data.u1[i], data.forcing[i]);
  });
  ModalSolution sol{data.op, {}, std::nullopt};
  sol.modes.reserve(J);
  for (auto& s : slots) sol.modes.push_back(std::move(*s));
  return sol;
}

GridFunction solve_mode_ivp1(double lambda, const Kernel& l, double u0, const GridFunction& f) {
  require_same_grid(l.values(), f);
  GridFunction rhs = GridFunction::constant(f.grid(), u0) + cumulative_integral(f);
  return solve_second_kind(1.0, -lambda * cumulative_integral(l.values()), rhs);
}

ModalSolution solve_ivp1(const ModalProblemData& data, const Kernel& l, unsigned threads) {
  data.validate();
  if (std::abs(l.initial_value()) > 1e-10) {
    throw SolverError("first-order kernel must satisfy l(0) = 0");
  }
  const Kernel h(l.derivative(), KernelRole::second_order);
  const std::size_t J = data.op.modes();
  std::vector<std::optional<GridFunction>> slots(J);
  std::vector<double> gaps(J, 0.0);
  detail::parallel_for(J, threads, [&](std::size_t i) {
    const double lambda = data.op.eigenvalue(i + 1);
    const GridFunction& f = data.forcing[i];
    GridFunction reduced = solve_mode_ivp2(lambda, h, data.u0[i], f[0], differentiate(f, 1));
    gaps[i] = max_abs_diff(reduced, solve_mode_ivp1(lambda, l, data.u0[i], f));
    slots[i] = std::move(reduced);
  });
  ModalSolution sol{data.op, {}, *std::max_element(gaps.begin(), gaps.end())};
  sol.modes.reserve(J);
  for (auto& s : slots) sol.modes.push_back(std::move(*s));
  return sol;
}

MeasurementTrace measure(const ModalSolution& sol) {
  return MeasurementTrace{sol.mode(sol.op.measure_mode()), std::nullopt, std::nullopt, std::nullopt,
                          TraceSource::measured_sampled};
}

MeasurementTrace measure_A0(const ModalSolution& sol, double lambda00) {
  MeasurementTrace trace = measure(sol);
  trace.g *= lambda00;
  return trace;
}

double residual_ivp2(const ModalSolution& sol, const Kernel& h, const ModalProblemData& data) {
  double worst = 0.0;
  for (std::size_t j = 1; j <= sol.op.modes(); ++j) {
    const GridFunction& u = sol.mode(j);
    GridFunction r = differentiate(u, 2) - sol.op.eigenvalue(j) * convolve(h.values(), u) -
                     data.forcing.at(j - 1);
    worst = std::max(worst, r.max_abs());
  }
  return worst;
}

double residual_ivp1(const ModalSolution& sol, const Kernel& l, const ModalProblemData& data) {
  double worst = 0.0;
  for (std::size_t j = 1; j <= sol.op.modes(); ++j) {
    const GridFunction& u = sol.mode(j);
    GridFunction r = differentiate(u, 1) - sol.op.eigenvalue(j) * convolve(l.values(), u) -
                     data.forcing.at(j - 1);
    worst = std::max(worst, r.max_abs());
  }
  return worst;
}

double initial_acceleration_defect(const ModalSolution& sol, const ModalProblemData& data) {
  double worst = 0.0;
  for (std::size_t j = 1; j <= sol.op.modes(); ++j) {
    worst = std::max(worst, std::abs(differentiate(sol.mode(j), 2)[0] - data.forcing.at(j - 1)[0]));
  }
  return worst;
}

}  // namespace memkern
