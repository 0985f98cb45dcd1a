#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memkern/direct.hpp"
#include "memkern/spectral.hpp"
#include "memkern/timegrid.hpp"

namespace memkern {

/// Data of the kernel identification problems: the measurement g = (u, phi),
/// psi = (f, phi), and the eigenvalue lambda0 with A* phi = lambda0 phi.
struct IdentificationInput {
  MeasurementTrace g;
  GridFunction psi;
  double lambda0 = 0.0;
  /// exact psi', used together with exact g derivatives
  std::optional<GridFunction> psi_derivative{};
  /// second measurement g0 = (u, A0* phi)
  std::optional<GridFunction> g0{};
  /// eigenvalue of A0* at phi; stands in for g0 = lambda00 g
  std::optional<double> lambda00{};
  /// (f'(0), phi)
  double fprime0phi = 0.0;
};

enum class DerivativePath { finite_difference, analytic };

std::string to_string(DerivativePath path);

struct IdentifiedKernel {
  Kernel kernel;
  DerivativePath path;
};

/// Recovers h from g(0) h + g' * h = p',  p = (g'' - psi) / lambda0.
/// Throws SolverError when g(0) = 0 or lambda0 = 0.
IdentifiedKernel identify_h(const IdentificationInput& inp);

/// Same pipeline with q = (g'' - g0 - psi) / lambda0.
IdentifiedKernel identify_h_ip0(const IdentificationInput& inp);

/// Alternate route: solves the first-kind equation
///   g * h1 = [g - g(0) - t g'(0) - lift1(psi)] / lambda0
/// for h1 = lift1(h) and returns h = h1''.
IdentifiedKernel identify_h_firstkind(const IdentificationInput& inp);

/// Recovers l from g(0) l + g' * l = w',  w = (g' - psi) / lambda0.
IdentifiedKernel identify_l(const IdentificationInput& inp);

/// l(0) = (g''(0) - (f'(0), phi)) / (g(0) lambda0).
double l0_from_data(const IdentificationInput& inp);

enum class CompatibilityMode { second_order, first_order, bvp_first_order };

struct CompatibilityCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  /// true for "actual must be nonzero" checks, which pass iff |actual| > tolerance
  bool nonzero = false;
  bool pass = false;

  double defect() const { return actual - expected; }
};

struct CompatibilityReport {
  std::vector<CompatibilityCheck> checks;

  bool all_pass() const;
  const CompatibilityCheck& find(const std::string& name) const;
};

/// Default tolerance for the equality checks: 20 dt^2 max(1, max|g''|).
double default_compatibility_tolerance(const MeasurementTrace& g);

/// Necessary conditions exact measurements satisfy at the measured mode.
CompatibilityReport check_compatibility(const IdentificationInput& inp, const ModalProblemData& modal,
                                        CompatibilityMode mode,
                                        std::optional<double> tolerance = std::nullopt);

}  // namespace memkern
