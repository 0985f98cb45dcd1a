#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "memkern/spectral.hpp"
#include "memkern/timegrid.hpp"

namespace memkern {

enum class KernelRole {
  second_order,  ///< h in u'' = h * A u + f
  first_order,   ///< l in u'  = l * A u + f
};

/// Memory kernel samples, optionally with an exact derivative trace.
class Kernel {
 public:
  Kernel(GridFunction values, KernelRole role, std::optional<GridFunction> derivative = {});

  const GridFunction& values() const { return values_; }
  KernelRole role() const { return role_; }
  const std::optional<GridFunction>& analytic_derivative() const { return derivative_; }
  const TimeGrid& grid() const { return values_.grid(); }

  double initial_value() const { return values_[0]; }
  bool nonnegative(double slack = 1e-12) const { return values_.min() >= -slack; }

  /// Exact derivative if supplied, otherwise the order-1 finite difference.
  GridFunction derivative() const;

 private:
  GridFunction values_;
  KernelRole role_;
  std::optional<GridFunction> derivative_;
};

struct ModalSolution {
  SpectralOperator op;
  std::vector<GridFunction> modes;
  /// Largest deviation from an independent solution route, when one was run.
  std::optional<double> cross_check;

  const TimeGrid& grid() const { return modes.at(0).grid(); }
  const GridFunction& mode(std::size_t j) const { return modes.at(j - 1); }
};

enum class TraceSource { measured_sampled, analytic };

/// g(t) = (u(t), phi) with optional exact derivatives g', g'', g'''.
struct MeasurementTrace {
  GridFunction g;
  std::optional<GridFunction> d1;
  std::optional<GridFunction> d2;
  std::optional<GridFunction> d3;
  TraceSource source = TraceSource::measured_sampled;

  bool has_analytic(int order) const;
  /// Exact derivative when present, otherwise finite differences of g.
  GridFunction derivative(int order) const;
  /// Largest gap between supplied derivatives and finite differences of g.
  double derivative_inconsistency() const;
};

/// One mode of the second-order Cauchy problem via the fixed-point form
/// u = u0 + c t + lift1(f) + lambda lift1(h) * u.
GridFunction solve_mode_ivp2(double lambda, const Kernel& h, double u0, double c,
                             const GridFunction& f);

/// Per-mode solve with c_j = u1_j. Modes run on up to `threads` threads.
ModalSolution solve_ivp2(const ModalProblemData& data, const Kernel& h, unsigned threads = 1);

/// One mode of u' = lambda l * u + f, u(0) = u0, via
/// u = u0 + 1 * f + lambda (1 * l) * u.
GridFunction solve_mode_ivp1(double lambda, const Kernel& l, double u0, const GridFunction& f);

/// First-order Cauchy problem through its second-order equivalent
/// (h = l', u1 = f(0), forcing f'). Requires l(0) = 0. The result carries the
/// discrepancy against solve_mode_ivp1 in `cross_check`.
ModalSolution solve_ivp1(const ModalProblemData& data, const Kernel& l, unsigned threads = 1);

MeasurementTrace measure(const ModalSolution& sol);

/// g0 = lambda00 g, the extra measurement when phi is also an eigenvector of A0.
MeasurementTrace measure_A0(const ModalSolution& sol, double lambda00);

/// max_{j,n} |u_j'' - lambda_j h * u_j - f_j| with finite-difference u_j''.
double residual_ivp2(const ModalSolution& sol, const Kernel& h, const ModalProblemData& data);

/// max_{j,n} |u_j' - lambda_j l * u_j - f_j| with finite-difference u_j'.
double residual_ivp1(const ModalSolution& sol, const Kernel& l, const ModalProblemData& data);

/// max_j |u_j''(0) - f_j(0)|, which vanishes for exact solutions.
double initial_acceleration_defect(const ModalSolution& sol, const ModalProblemData& data);

namespace detail {
/// Runs fn(i) for i in [0, count) on up to `threads` threads; each index is
/// handled exactly once.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);
}  // namespace detail

}  // namespace memkern
