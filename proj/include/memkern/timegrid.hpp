#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace memkern {

/// Uniform grid t_n = n * T / N, n = 0..N, on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  std::size_t size() const { return steps_ + 1; }
  double dt() const { return horizon_ / static_cast<double>(steps_); }
  double node(std::size_t n) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t steps_;
};

/// Real function sampled at every node of a TimeGrid.
class GridFunction {
 public:
  GridFunction(TimeGrid grid, std::vector<double> values);

  static GridFunction zeros(const TimeGrid& grid);
  static GridFunction constant(const TimeGrid& grid, double value);
  static GridFunction sample(const TimeGrid& grid,
                             const std::function<double(double)>& f);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t n) const { return values_[n]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  double max_abs() const;
  double min() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

/// max_n |a_n - b_n|; throws on grid mismatch.
double max_abs_diff(const GridFunction& a, const GridFunction& b);

void require_same_grid(const GridFunction& a, const GridFunction& b);

/// Trapezoidal product quadrature of (a*b)(t_n) = int_0^{t_n} a(t_n - s) b(s) ds.
/// The result vanishes at t_0.
GridFunction convolve(const GridFunction& a, const GridFunction& b);

/// int_0^{t_n} (t_n - s) r(s) ds, i.e. the convolution of r with t.
GridFunction lift1(const GridFunction& r);

/// Running trapezoid integral int_0^{t_n} r(s) ds.
GridFunction cumulative_integral(const GridFunction& r);

/// Trapezoid rule over the whole grid.
double integrate(const GridFunction& r);

/// Finite-difference derivative of the given order (1, 2 or 3): central
/// stencils in the interior, one-sided stencils near the ends.
/// Requires N >= 4 for order <= 2 and N >= 6 for order 3. `accuracy` 4
/// widens every stencil to fourth-order truncation error and needs
/// N >= order + 5.
GridFunction differentiate(const GridFunction& g, int order, int accuracy = 2);

/// Finite-difference weights for the derivative of the given order at
/// point x0 from arbitrary abscissae (Fornberg's recursion).
std::vector<double> fd_weights(double x0, std::span<const double> xs, int order);

}  // namespace memkern
