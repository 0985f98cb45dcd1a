#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "memkern/timegrid.hpp"

namespace memkern {

enum class SpatialBasis { none, dirichlet_laplacian_1d };

/// Self-adjoint operator represented by finitely many eigenpairs. Mode indices
/// are 1-based throughout, matching the usual numbering of eigenpairs.
class SpectralOperator {
 public:
  SpectralOperator(std::vector<double> eigenvalues, std::size_t measure_mode,
                   SpatialBasis basis = SpatialBasis::none);

  std::size_t modes() const { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  double eigenvalue(std::size_t j) const { return eigenvalues_.at(j - 1); }
  std::size_t measure_mode() const { return measure_mode_; }
  double measure_eigenvalue() const { return eigenvalue(measure_mode_); }
  SpatialBasis basis() const { return basis_; }

  /// phi_j(x); requires a spatial basis.
  double eigenfunction(std::size_t j, double x) const;

  /// True if all eigenvalues are positive and nondecreasing.
  bool positive_nondecreasing() const;

 private:
  std::vector<double> eigenvalues_;
  std::size_t measure_mode_;
  SpatialBasis basis_;
};

/// -d^2/dx^2 on (0,1) with u(0) = u(1) = 0: lambda_j = (j pi)^2,
/// phi_j(x) = sqrt(2) sin(j pi x).
SpectralOperator dirichlet_laplacian_1d(std::size_t modes, std::size_t measure_mode = 1);

/// Samples of a spatial field on a uniform grid over [0, 1].
struct SpatialField {
  std::vector<double> x;
  std::vector<double> value;
};

std::vector<double> uniform_points(std::size_t count);

/// Coefficients (v, phi_j), j = 1..J, by the trapezoid rule. Needs at least
/// 8 J uniformly spaced samples covering [0, 1].
std::vector<double> project(const SpatialField& field, const SpectralOperator& op);

/// sum_j coeffs_j phi_j(x) at the given points.
SpatialField synthesize(std::span<const double> coeffs, const SpectralOperator& op,
                        std::span<const double> points);

/// Spectral projection onto the first keep modes.
std::vector<double> truncate_noisy(std::span<const double> coeffs, std::size_t keep);

void write_field_csv(std::ostream& out, const SpatialField& field);
SpatialField read_field_csv(std::istream& in);

/// Modal coefficients of the initial/terminal states and forcing traces.
struct ModalProblemData {
  SpectralOperator op;
  std::vector<double> u0;
  std::vector<double> u1;
  std::vector<double> u2;
  std::vector<GridFunction> forcing;

  const TimeGrid& grid() const { return forcing.at(0).grid(); }

  /// Throws std::invalid_argument on length or grid mismatches.
  void validate() const;

  static ModalProblemData zeros(SpectralOperator op, const TimeGrid& grid);
};

}  // namespace memkern
