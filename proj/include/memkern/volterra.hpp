#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memkern/timegrid.hpp"

namespace memkern {

/// Resolvent kernel k of the lifted kernel h1 for eigenvalue lambda:
/// (I - lambda H)^{-1} = I + lambda K with H x = h1 * x and K x = k * x.
struct ResolventKernel {
  double lambda;
  GridFunction k;
  GridFunction source_lift;
};

/// Solves c x + kernel * x = rhs by forward marching with trapezoid weights.
/// Throws SolverError when c or the effective diagonal c + dt/2 kernel(0) is
/// numerically zero.
GridFunction solve_second_kind(double c, const GridFunction& kernel, const GridFunction& rhs);

/// Derivative traces used by solve_first_kind instead of finite differences.
struct FirstKindDerivatives {
  std::optional<GridFunction> kernel;
  std::optional<GridFunction> rhs;
};

/// Solves kernel * x = rhs by differentiating once and marching the resulting
/// second-kind equation kernel(0) x + kernel' * x = rhs'.
GridFunction solve_first_kind(const GridFunction& kernel, const GridFunction& rhs,
                              const FirstKindDerivatives& derivatives = {});

/// Resolvent from the direct solve of k = h1 + lambda k * h1. Requires h1(0) = 0.
ResolventKernel resolvent(const GridFunction& h1, double lambda);

/// Partial Neumann sum  sum_{m=1}^{terms} lambda^{m-1} h_m  with h_1 = h1 and
/// h_m = h1 * h_{m-1}.
GridFunction resolvent_neumann(const GridFunction& h1, double lambda, int terms);

/// M = T * int_0^T |h|.
double bound_M(const GridFunction& h);

struct BoundsReport {
  bool precondition_ok = true;
  std::string precondition_message;
  double M = 0.0;
  /// M exp(lambda M t_n)(1 + eps) - k(t_n), per node
  std::vector<double> upper_margin;
  /// k(t_n) + positivity slack, per node
  std::vector<double> lower_margin;
  double l2_norm_sq = 0.0;
  double l2_bound = 0.0;
  bool pointwise_ok = true;
  bool l2_ok = true;

  bool ok() const { return precondition_ok && pointwise_ok && l2_ok; }
};

inline constexpr double kPositivitySlack = 1e-10;
inline constexpr double kBoundRelativeSlack = 1e-8;

/// Checks 0 <= k <= M e^{lambda M t} and int k^2 <= M e^{2 lambda M T} / (2 lambda).
/// The sign precondition is checked on the lifted kernel stored in rk.
BoundsReport check_bounds(const ResolventKernel& rk, double M);

/// Same, with M computed from h and the sign precondition checked on h itself.
BoundsReport check_bounds(const ResolventKernel& rk, const GridFunction& h);

}  // namespace memkern
