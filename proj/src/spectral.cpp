#include "memkern/spectral.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "memkern/csv.hpp"

namespace memkern {

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues, std::size_t measure_mode,
                                   SpatialBasis basis)
    : eigenvalues_(std::move(eigenvalues)), measure_mode_(measure_mode), basis_(basis) {
  if (eigenvalues_.empty()) throw std::invalid_argument("SpectralOperator: no eigenvalues");
  if (measure_mode_ < 1 || measure_mode_ > eigenvalues_.size()) {
    throw std::invalid_argument("SpectralOperator: measurement mode out of range");
  }
  for (double l : eigenvalues_) {
    if (!std::isfinite(l)) throw std::invalid_argument("SpectralOperator: non-finite eigenvalue");
  }
  if (measure_eigenvalue() == 0.0) {
    throw std::invalid_argument("SpectralOperator: the measured eigenvalue must be nonzero");
  }
}

double SpectralOperator::eigenfunction(std::size_t j, double x) const {
  if (basis_ != SpatialBasis::dirichlet_laplacian_1d) {
    throw std::invalid_argument("SpectralOperator: no spatial basis");
  }
  if (j < 1 || j > modes()) throw std::out_of_range("SpectralOperator: mode out of range");
  return std::numbers::sqrt2 * std::sin(static_cast<double>(j) * std::numbers::pi * x);
}

bool SpectralOperator::positive_nondecreasing() const {
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
    if (!(eigenvalues_[i] > 0.0)) return false;
    if (i > 0 && eigenvalues_[i] < eigenvalues_[i - 1]) return false;
  }
  return true;
}

SpectralOperator dirichlet_laplacian_1d(std::size_t modes, std::size_t measure_mode) {
  if (modes < 1) throw std::invalid_argument("dirichlet_laplacian_1d: need at least one mode");
  std::vector<double> lambda(modes);
  for (std::size_t j = 1; j <= modes; ++j) {
    const double w = static_cast<double>(j) * std::numbers::pi;
    lambda[j - 1] = w * w;
  }
  return SpectralOperator(std::move(lambda), measure_mode, SpatialBasis::dirichlet_laplacian_1d);
}

std::vector<double> uniform_points(std::size_t count) {
  if (count < 2) throw std::invalid_argument("uniform_points: need at least two points");
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i) {
    x[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return x;
}

namespace {

void require_basis(const SpectralOperator& op) {
  if (op.basis() == SpatialBasis::none) {
    throw std::invalid_argument("spectral operator has no spatial basis");
  }
}

void require_uniform_unit_grid(std::span<const double> x, std::size_t min_points) {
  if (x.size() < min_points) {
    throw std::invalid_argument("spatial grid under-resolved: need at least " +
                                std::to_string(min_points) + " points");
  }
  const double h = 1.0 / static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - static_cast<double>(i) * h) > 1e-9) {
      throw std::invalid_argument("spatial samples must be uniform on [0, 1]");
    }
  }
}

}  // namespace

std::vector<double> project(const SpatialField& field, const SpectralOperator& op) {
  require_basis(op);
  if (field.x.size() != field.value.size()) {
    throw std::invalid_argument("project: x and value columns differ in length");
  }
  require_uniform_unit_grid(field.x, 8 * op.modes());
  const std::size_t P = field.x.size();
  const double h = 1.0 / static_cast<double>(P - 1);
  std::vector<double> coeffs(op.modes(), 0.0);
  for (std::size_t j = 1; j <= op.modes(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
      const double w = (i == 0 || i + 1 == P) ? 0.5 : 1.0;
      s += w * field.value[i] * op.eigenfunction(j, field.x[i]);
    }
    coeffs[j - 1] = s * h;
  }
  return coeffs;
}

SpatialField synthesize(std::span<const double> coeffs, const SpectralOperator& op,
                        std::span<const double> points) {
  require_basis(op);
  if (coeffs.size() != op.modes()) {
    throw std::invalid_argument("synthesize: coefficient count differs from mode count");
  }
  SpatialField field{std::vector<double>(points.begin(), points.end()),
                     std::vector<double>(points.size(), 0.0)};
  for (std::size_t i = 0; i < points.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 1; j <= op.modes(); ++j) s += coeffs[j - 1] * op.eigenfunction(j, points[i]);
    field.value[i] = s;
  }
  return field;
}

std::vector<double> truncate_noisy(std::span<const double> coeffs, std::size_t keep) {
  if (keep > coeffs.size()) throw std::invalid_argument("truncate_noisy: keep exceeds mode count");
  std::vector<double> out(coeffs.begin(), coeffs.end());
  for (std::size_t j = keep; j < out.size(); ++j) out[j] = 0.0;
  return out;
}

void write_field_csv(std::ostream& out, const SpatialField& field) {
  CsvTable table{{"x", "value"}, {field.x, field.value}};
  write_csv(out, table);
}

SpatialField read_field_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  return SpatialField{table.column("x"), table.column("value")};
}

void ModalProblemData::validate() const {
  const std::size_t J = op.modes();
  if (u0.size() != J || u1.size() != J || u2.size() != J || forcing.size() != J) {
    throw std::invalid_argument("modal data: every list must have one entry per mode");
  }
  for (const auto& f : forcing) {
    if (!(f.grid() == forcing.front().grid())) {
      throw std::invalid_argument("modal data: forcing traces must share one grid");
    }
  }
}

ModalProblemData ModalProblemData::zeros(SpectralOperator op, const TimeGrid& grid) {
  const std::size_t J = op.modes();
  return ModalProblemData{std::move(op), std::vector<double>(J, 0.0), std::vector<double>(J, 0.0),
                          std::vector<double>(J, 0.0),
                          std::vector<GridFunction>(J, GridFunction::zeros(grid))};
}

}  // namespace memkern
