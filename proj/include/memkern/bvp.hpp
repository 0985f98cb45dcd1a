#pragma once

#include <string>
#include <vector>

#include "memkern/direct.hpp"
#include "memkern/spectral.hpp"
#include "memkern/timegrid.hpp"

namespace memkern {

enum class BvpStatus { unique, nonunique, unsolvable };

std::string to_string(BvpStatus status);

/// Outcome of the per-mode mixed problem. `c` is u_j'(0) for the
/// second-order problem and u_j(0) for the first-order one.
struct BvpModeReport {
  std::size_t mode = 0;
  double denominator = 0.0;
  double numerator = 0.0;
  double denominator_tolerance = 0.0;
  double numerator_tolerance = 0.0;
  double c = 0.0;
  BvpStatus status = BvpStatus::unique;
};

struct ModeBvpResult {
  /// For non-unique or unsolvable modes this is the c = 0 representative.
  GridFunction trace;
  BvpModeReport report;
};

struct BvpSolution {
  ModalSolution solution;
  std::vector<BvpModeReport> reports;
};

inline constexpr double kDefaultBvpTolerance = 1e-10;

/// u'' = lambda h * u + f, u(0) = u0, u(T) = u2, through the resolvent
/// representation
///   u = u0 + t c + F + lambda (k*1) u0 + lambda (k*t) c + lambda k*F,  F = lift1(f),
/// with c fixed by the endpoint condition. The denominator is
/// D = T + lambda int_0^T k(T-s) s ds and `tol` is relative to max(T, lambda T int|k|).
ModeBvpResult solve_mode_bvp2(double lambda, const Kernel& h, double u0, double u2,
                              const GridFunction& f, double tol = kDefaultBvpTolerance);

/// All modes of the second-order mixed problem (data.u0, data.u2). Throws
/// SolverError naming every unsolvable mode.
BvpSolution solve_bvp2(const ModalProblemData& data, const Kernel& h,
                       double tol = kDefaultBvpTolerance, unsigned threads = 1);

/// u' = lambda l * u + f, u(T) = u2, with l(0) = 0:
///   u = c (1 + lambda k*1) + 1*f + lambda k*(1*f),  c = u(0),
/// where k resolves the running integral of l. D = 1 + lambda int_0^T k.
ModeBvpResult solve_mode_bvp1(double lambda, const Kernel& l, const GridFunction& f, double u2,
                              double tol = kDefaultBvpTolerance);

BvpSolution solve_bvp1(const ModalProblemData& data, const Kernel& l,
                       double tol = kDefaultBvpTolerance, unsigned threads = 1);

/// Node-by-node verdicts for the two sufficient sign conditions.
struct SignConditionReport {
  std::vector<double> t;
  std::vector<bool> first;
  std::vector<bool> second;
  bool analytic_derivatives = false;

  bool first_holds() const;
  bool second_holds() const;
  bool holds() const { return first_holds() && second_holds(); }
};

/// g(0) g'(t) < 0 and lambda0 g(0) [g'''(t) - lambda0 g'(t) - fprime_phi(t)] > 0,
/// with fprime_phi = (f'(t), phi). Sufficient for solvability of the
/// second-order mixed problem.
SignConditionReport check_sign_conditions2(const MeasurementTrace& g, const GridFunction& fprime_phi,
                                           double lambda0);

/// g(0) g'(t) < 0 and lambda0 g(0) [g''(t) - fprime_phi(t)] > 0; sufficient for
/// the first-order mixed problem.
SignConditionReport check_sign_conditions1(const MeasurementTrace& g, const GridFunction& fprime_phi,
                                           double lambda0);

enum class ProblemOrder { first, second };

struct ConvergenceReport {
  ProblemOrder order = ProblemOrder::second;
  double M = 0.0;
  std::vector<double> c;
  std::vector<double> L;
  /// L_j lambda_j^3 exp(2 lambda_j M T)
  std::vector<double> terms;
  std::vector<double> partial_sums;
  double tail_sum = 0.0;
  /// Last term not smaller than the one before it.
  bool growing = false;
};

/// Weights L_j and series terms for the modal data of a mixed problem.
/// Second order: L_j = u0_j^2 + T^2 c_j^2 + max|lift1(f_j)|^2, M from h.
/// First order:  L_j = u2_j^2 + c_j^2 + max|1*f_j|^2, M from h = l'.
ConvergenceReport convergence_diagnostic(const ModalProblemData& data, const Kernel& kernel,
                                         ProblemOrder which);

/// 6 L_j [1 + 0.5 M T lambda_j exp(2 lambda_j M T)].
double u_bound(const ConvergenceReport& report, std::size_t j, double lambda, double T);

/// sup_t |u_j(t)|^2 <= u_bound(j) (1 + 1e-8) for every mode.
bool check_u_bound(const ModalSolution& sol, const ConvergenceReport& report);

}  // namespace memkern
