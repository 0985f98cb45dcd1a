#include "memkern/identify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memkern/errors.hpp"
#include "memkern/volterra.hpp"

namespace memkern {

std::string to_string(DerivativePath path) {
  return path == DerivativePath::analytic ? "analytic" : "finite-difference";
}

namespace {

void require_nondegenerate(const IdentificationInput& inp) {
  require_same_grid(inp.g.g, inp.psi);
  if (inp.lambda0 == 0.0) throw SolverError("lambda0 = 0: the measured eigenvalue must be nonzero");
  if (std::abs(inp.g.g[0]) <= 1e-12 * std::max(1.0, inp.g.g.max_abs())) {
    throw SolverError("(u_0,phi)=0: the measurement must satisfy g(0) != 0");
  }
}

// Solves g(0) x + g' * x = rhs_derivative.
GridFunction solve_for_kernel(const MeasurementTrace& g, const GridFunction& rhs_derivative) {
  return solve_second_kind(g.g[0], g.derivative(1), rhs_derivative);
}

IdentifiedKernel recover_h(const IdentificationInput& inp, const GridFunction& g0_term,
                           const std::optional<GridFunction>& g0_derivative) {
  require_nondegenerate(inp);
  const double inv = 1.0 / inp.lambda0;
  const bool analytic = inp.g.d1 && inp.g.d3 && inp.psi_derivative && g0_derivative;
  // p' straight from third-difference stencils; differencing g'' again loses an order at the ends
  GridFunction dp =
      analytic ? inv * (*inp.g.d3 - *g0_derivative - *inp.psi_derivative)
               : inv * (inp.g.derivative(3) - differentiate(g0_term, 1) - differentiate(inp.psi, 1));
  return IdentifiedKernel{Kernel(solve_for_kernel(inp.g, dp), KernelRole::second_order),
                          analytic ? DerivativePath::analytic : DerivativePath::finite_difference};
}

}  // namespace

IdentifiedKernel identify_h(const IdentificationInput& inp) {
  const TimeGrid& grid = inp.g.g.grid();
  return recover_h(inp, GridFunction::zeros(grid), GridFunction::zeros(grid));
}

IdentifiedKernel identify_h_ip0(const IdentificationInput& inp) {
  if (inp.g0) {
    return recover_h(inp, *inp.g0, std::nullopt);
  }
  if (inp.lambda00) {
    const double l00 = *inp.lambda00;
    std::optional<GridFunction> dg0;
    if (inp.g.d1) dg0 = l00 * *inp.g.d1;
    return recover_h(inp, l00 * inp.g.g, dg0);
  }
  throw std::invalid_argument("identify_h_ip0: needs g0 or lambda00");
}

IdentifiedKernel identify_h_firstkind(const IdentificationInput& inp) {
  require_nondegenerate(inp);
  const TimeGrid& grid = inp.g.g.grid();
  const double inv = 1.0 / inp.lambda0;
  const double g0 = inp.g.g[0];
  const bool analytic = inp.g.d1.has_value();
  // h1 errors reach h through a second difference, so the sampled path needs
  // fourth-order first derivatives to keep h1 smooth up to O(dt^4) at the ends
  const GridFunction dg = analytic ? *inp.g.d1 : differentiate(inp.g.g, 1, 4);
  const double dg0 = dg[0];
  GridFunction rhs =
      inv * (inp.g.g - GridFunction::sample(grid, [&](double t) { return g0 + t * dg0; }) -
             lift1(inp.psi));
  FirstKindDerivatives derivs;
  derivs.kernel = dg;
  derivs.rhs = analytic ? inv * (dg - GridFunction::constant(grid, dg0) - cumulative_integral(inp.psi))
                        : differentiate(rhs, 1, 4);
  const GridFunction h1 = solve_first_kind(inp.g.g, rhs, derivs);
  return IdentifiedKernel{Kernel(differentiate(h1, 2), KernelRole::second_order),
                          analytic ? DerivativePath::analytic : DerivativePath::finite_difference};
}

IdentifiedKernel identify_l(const IdentificationInput& inp) {
  require_nondegenerate(inp);
  const double inv = 1.0 / inp.lambda0;
  const bool analytic = inp.g.d1 && inp.g.d2 && inp.psi_derivative;
  GridFunction dw = analytic ? inv * (*inp.g.d2 - *inp.psi_derivative)
                             : inv * (inp.g.derivative(2) - differentiate(inp.psi, 1));
  return IdentifiedKernel{Kernel(solve_for_kernel(inp.g, dw), KernelRole::first_order),
                          analytic ? DerivativePath::analytic : DerivativePath::finite_difference};
}

double l0_from_data(const IdentificationInput& inp) {
  const double g0 = inp.g.g[0];
  if (g0 == 0.0 || inp.lambda0 == 0.0) {
    throw SolverError("l(0) needs g(0) != 0 and lambda0 != 0");
  }
  return (inp.g.derivative(2)[0] - inp.fprime0phi) / (g0 * inp.lambda0);
}

bool CompatibilityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const CompatibilityCheck& CompatibilityReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no compatibility check named '" + name + "'");
}

double default_compatibility_tolerance(const MeasurementTrace& g) {
  const double dt = g.g.grid().dt();
  return 20.0 * dt * dt * std::max(1.0, g.derivative(2).max_abs());
}

CompatibilityReport check_compatibility(const IdentificationInput& inp, const ModalProblemData& modal,
                                        CompatibilityMode mode, std::optional<double> tolerance) {
  modal.validate();
  const double tol = tolerance.value_or(default_compatibility_tolerance(inp.g));
  const std::size_t j = modal.op.measure_mode() - 1;
  const GridFunction& g = inp.g.g;
  const GridFunction& f = modal.forcing[j];

  CompatibilityReport report;
  auto equal = [&](std::string name, double expected, double actual) {
    report.checks.push_back(
        {std::move(name), expected, actual, tol, false, std::abs(actual - expected) <= tol});
  };
  auto nonzero = [&](std::string name, double actual) {
    report.checks.push_back({std::move(name), 0.0, actual, tol, true, std::abs(actual) > tol});
  };

  switch (mode) {
    case CompatibilityMode::second_order:
      equal("g(0) = (u0,phi)", modal.u0[j], g[0]);
      equal("g'(0) = (u1,phi)", modal.u1[j], inp.g.derivative(1)[0]);
      equal("g''(0) = (f(0),phi)", f[0], inp.g.derivative(2)[0]);
      nonzero("g(0) != 0", g[0]);
      break;
    case CompatibilityMode::first_order:
      equal("g(0) = (u0,phi)", modal.u0[j], g[0]);
      equal("g'(0) = (f(0),phi)", f[0], inp.g.derivative(1)[0]);
      nonzero("g(0) != 0", g[0]);
      break;
    case CompatibilityMode::bvp_first_order:
      equal("g'(0) = (f(0),phi)", f[0], inp.g.derivative(1)[0]);
      equal("g''(0) - (f'(0),phi) = 0", 0.0, inp.g.derivative(2)[0] - differentiate(f, 1)[0]);
      equal("g(T) = (u2,phi)", modal.u2[j], g.back());
      nonzero("g(0) != 0", g[0]);
      break;
  }
  return report;
}

}  // namespace memkern
