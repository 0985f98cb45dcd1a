#include "memkern/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "memkern/errors.hpp"
#include "memkern/volterra.hpp"

namespace memkern {

std::string to_string(BvpStatus status) {
  switch (status) {
    case BvpStatus::unique: return "unique";
    case BvpStatus::nonunique: return "nonunique";
    case BvpStatus::unsolvable: return "unsolvable";
  }
  return "unknown";
}

namespace {

double abs_integral(const GridFunction& k) {
  std::vector<double> a(k.size());
  for (std::size_t n = 0; n < a.size(); ++n) a[n] = std::abs(k[n]);
  return integrate(GridFunction(k.grid(), std::move(a)));
}

void classify(BvpModeReport& r) {
  if (std::abs(r.denominator) > r.denominator_tolerance) {
    r.status = BvpStatus::unique;
    r.c = r.numerator / r.denominator;
  } else if (std::abs(r.numerator) <= r.numerator_tolerance) {
    r.status = BvpStatus::nonunique;
    r.c = 0.0;
  } else {
    r.status = BvpStatus::unsolvable;
    r.c = 0.0;
  }
}

BvpSolution collect(const ModalProblemData& data, std::vector<std::optional<ModeBvpResult>>& slots) {
  BvpSolution out{ModalSolution{data.op, {}, std::nullopt}, {}};
  std::ostringstream bad;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    slots[i]->report.mode = i + 1;
    if (slots[i]->report.status == BvpStatus::unsolvable) {
      bad << " mode " << (i + 1) << " (|numerator| = " << std::abs(slots[i]->report.numerator)
          << ", |denominator| = " << std::abs(slots[i]->report.denominator) << ")";
    }
    out.solution.modes.push_back(std::move(slots[i]->trace));
    out.reports.push_back(slots[i]->report);
  }
  if (!bad.str().empty()) throw SolverError("mixed problem unsolvable:" + bad.str());
  return out;
}

}  // namespace

ModeBvpResult solve_mode_bvp2(double lambda, const Kernel& h, double u0, double u2,
                              const GridFunction& f, double tol) {
  require_same_grid(h.values(), f);
  const TimeGrid& grid = f.grid();
  const double T = grid.horizon();
  const std::size_t last = grid.steps();

  const GridFunction k = resolvent(lift1(h.values()), lambda).k;
  const GridFunction F = lift1(f);
  const GridFunction tt = GridFunction::sample(grid, [](double t) { return t; });
  const GridFunction k1 = convolve(k, GridFunction::constant(grid, 1.0));
  const GridFunction kt = convolve(k, tt);
  const GridFunction kF = convolve(k, F);

  BvpModeReport r;
  r.denominator = T + lambda * kt[last];
  r.numerator = u2 - u0 - F[last] - lambda * (k1[last] * u0 + kF[last]);
  const double k_mass = std::abs(lambda) * abs_integral(k);
  r.denominator_tolerance = tol * std::max(T, k_mass * T);
  r.numerator_tolerance =
      tol * std::max(1.0, std::abs(u2) + std::abs(u0) + F.max_abs() + k_mass * (std::abs(u0) + F.max_abs()));
  classify(r);

  GridFunction trace = GridFunction::sample(grid, [&](double t) { return u0 + r.c * t; }) + F +
                       lambda * (u0 * k1 + r.c * kt + kF);
  return ModeBvpResult{std::move(trace), r};
}

BvpSolution solve_bvp2(const ModalProblemData& data, const Kernel& h, double tol, unsigned threads) {
  data.validate();
  std::vector<std::optional<ModeBvpResult>> slots(data.op.modes());
  detail::parallel_for(slots.size(), threads, [&](std::size_t i) {
    slots[i] = solve_mode_bvp2(data.op.eigenvalue(i + 1), h, data.u0[i], data.u2[i], data.forcing[i], tol);
  });
  return collect(data, slots);
}

ModeBvpResult solve_mode_bvp1(double lambda, const Kernel& l, const GridFunction& f, double u2,
                              double tol) {
  require_same_grid(l.values(), f);
  if (std::abs(l.initial_value()) > 1e-10) {
    throw SolverError("first-order kernel must satisfy l(0) = 0");
  }
  const TimeGrid& grid = f.grid();
  const std::size_t last = grid.steps();

  const GridFunction k = resolvent(cumulative_integral(l.values()), lambda).k;
  const GridFunction F = cumulative_integral(f);
  const GridFunction k1 = convolve(k, GridFunction::constant(grid, 1.0));
  const GridFunction kF = convolve(k, F);

  BvpModeReport r;
  r.denominator = 1.0 + lambda * k1[last];
  r.numerator = u2 - F[last] - lambda * kF[last];
  const double k_mass = std::abs(lambda) * abs_integral(k);
  r.denominator_tolerance = tol * std::max(1.0, k_mass);
  r.numerator_tolerance = tol * std::max(1.0, std::abs(u2) + F.max_abs() * (1.0 + k_mass));
  classify(r);

  GridFunction trace = GridFunction::constant(grid, r.c) + F + lambda * (r.c * k1 + kF);
  return ModeBvpResult{std::move(trace), r};
}

BvpSolution solve_bvp1(const ModalProblemData& data, const Kernel& l, double tol, unsigned threads) {
  data.validate();
  std::vector<std::optional<ModeBvpResult>> slots(data.op.modes());
  detail::parallel_for(slots.size(), threads, [&](std::size_t i) {
    slots[i] = solve_mode_bvp1(data.op.eigenvalue(i + 1), l, data.forcing[i], data.u2[i], tol);
  });
  return collect(data, slots);
}

bool SignConditionReport::first_holds() const {
  return std::all_of(first.begin(), first.end(), [](bool b) { return b; });
}

bool SignConditionReport::second_holds() const {
  return std::all_of(second.begin(), second.end(), [](bool b) { return b; });
}

namespace {

SignConditionReport sign_report(const MeasurementTrace& g, const GridFunction& bracket) {
  SignConditionReport r;
  const GridFunction dg = g.derivative(1);
  const double g0 = g.g[0];
  for (std::size_t n = 0; n < bracket.size(); ++n) {
    r.t.push_back(g.g.grid().node(n));
    r.first.push_back(g0 * dg[n] < 0.0);
    r.second.push_back(bracket[n] > 0.0);
  }
  return r;
}

}  // namespace

SignConditionReport check_sign_conditions2(const MeasurementTrace& g, const GridFunction& fprime_phi,
                                           double lambda0) {
  require_same_grid(g.g, fprime_phi);
  const GridFunction inner = g.derivative(3) - lambda0 * g.derivative(1) - fprime_phi;
  auto r = sign_report(g, (lambda0 * g.g[0]) * inner);
  r.analytic_derivatives = g.has_analytic(1) && g.has_analytic(3);
  return r;
}

SignConditionReport check_sign_conditions1(const MeasurementTrace& g, const GridFunction& fprime_phi,
                                           double lambda0) {
  require_same_grid(g.g, fprime_phi);
  const GridFunction inner = g.derivative(2) - fprime_phi;
  auto r = sign_report(g, (lambda0 * g.g[0]) * inner);
  r.analytic_derivatives = g.has_analytic(1) && g.has_analytic(2);
  return r;
}

ConvergenceReport convergence_diagnostic(const ModalProblemData& data, const Kernel& kernel,
                                         ProblemOrder which) {
  data.validate();
  const double T = data.grid().horizon();
  ConvergenceReport rep;
  rep.order = which;
  rep.M = which == ProblemOrder::second ? bound_M(kernel.values()) : bound_M(kernel.derivative());

  const std::size_t J = data.op.modes();
  double sum = 0.0;
  for (std::size_t i = 0; i < J; ++i) {
    const double lambda = data.op.eigenvalue(i + 1);
    double L = 0.0;
    double c = 0.0;
    if (which == ProblemOrder::second) {
      c = solve_mode_bvp2(lambda, kernel, data.u0[i], data.u2[i], data.forcing[i]).report.c;
      const double Fmax = lift1(data.forcing[i]).max_abs();
      L = data.u0[i] * data.u0[i] + T * T * c * c + Fmax * Fmax;
    } else {
      c = solve_mode_bvp1(lambda, kernel, data.forcing[i], data.u2[i]).report.c;
      const double Fmax = cumulative_integral(data.forcing[i]).max_abs();
      L = data.u2[i] * data.u2[i] + c * c + Fmax * Fmax;
    }
    // exp overflows for large lambda; modes without data still contribute 0
    const double term = L == 0.0 ? 0.0 : L * lambda * lambda * lambda * std::exp(2.0 * lambda * rep.M * T);
    sum += term;
    rep.c.push_back(c);
    rep.L.push_back(L);
    rep.terms.push_back(term);
    rep.partial_sums.push_back(sum);
  }
  rep.tail_sum = sum;
  rep.growing = J >= 2 && rep.terms[J - 1] > 0.0 && rep.terms[J - 1] >= rep.terms[J - 2];
  return rep;
}

double u_bound(const ConvergenceReport& report, std::size_t j, double lambda, double T) {
  const double M = report.M;
  if (report.L.at(j - 1) == 0.0) return 0.0;
  return 6.0 * report.L.at(j - 1) * (1.0 + 0.5 * M * T * lambda * std::exp(2.0 * lambda * M * T));
}

bool check_u_bound(const ModalSolution& sol, const ConvergenceReport& report) {
  const double T = sol.grid().horizon();
  for (std::size_t j = 1; j <= sol.op.modes(); ++j) {
    const double sup = sol.mode(j).max_abs();
    if (sup * sup > u_bound(report, j, sol.op.eigenvalue(j), T) * (1.0 + 1e-8)) return false;
  }
  return true;
}

}  // namespace memkern
