#include "memkern/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace memkern {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("TimeGrid: horizon must be positive and finite");
  }
  if (steps < 2) {
    throw std::invalid_argument("TimeGrid: need at least 2 steps");
  }
}

double TimeGrid::node(std::size_t n) const {
  // exact at both ends
  if (n == steps_) return horizon_;
  return static_cast<double>(n) * horizon_ / static_cast<double>(steps_);
}

GridFunction::GridFunction(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("GridFunction: expected " + std::to_string(grid_.size()) +
                                " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
  }
}

GridFunction GridFunction::zeros(const TimeGrid& grid) {
  return GridFunction(grid, std::vector<double>(grid.size(), 0.0));
}

GridFunction GridFunction::constant(const TimeGrid& grid, double value) {
  return GridFunction(grid, std::vector<double>(grid.size(), value));
}

GridFunction GridFunction::sample(const TimeGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = f(grid.node(n));
  return GridFunction(grid, std::move(v));
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other.values_[n];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other.values_[n];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

GridFunction convolve(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  const std::size_t size = a.size();
  const double dt = a.grid().dt();
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> c(size, 0.0);
  for (std::size_t n = 1; n < size; ++n) {
    double s = 0.5 * (av[n] * bv[0] + av[0] * bv[n]);
    for (std::size_t i = 1; i < n; ++i) s += av[n - i] * bv[i];
    c[n] = dt * s;
  }
  return GridFunction(a.grid(), std::move(c));
}

GridFunction lift1(const GridFunction& r) {
  return convolve(GridFunction::sample(r.grid(), [](double t) { return t; }), r);
}

GridFunction cumulative_integral(const GridFunction& r) {
  const double dt = r.grid().dt();
  std::vector<double> c(r.size(), 0.0);
  for (std::size_t n = 1; n < r.size(); ++n) c[n] = c[n - 1] + 0.5 * dt * (r[n - 1] + r[n]);
  return GridFunction(r.grid(), std::move(c));
}

double integrate(const GridFunction& r) {
  double s = 0.5 * (r.front() + r.back());
  for (std::size_t n = 1; n + 1 < r.size(); ++n) s += r[n];
  return s * r.grid().dt();
}

std::vector<double> fd_weights(double x0, std::span<const double> xs, int order) {
  const std::size_t n = xs.size();
  const auto m = static_cast<std::size_t>(order);
  if (n <= m) throw std::invalid_argument("fd_weights: too few points for derivative order");
  // c[k][j]: weight of xs[j] for the k-th derivative
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c[m];
}

GridFunction differentiate(const GridFunction& g, int order, int accuracy) {
  if (order < 1 || order > 3) throw std::invalid_argument("differentiate: order must be 1, 2 or 3");
  if (accuracy != 2 && accuracy != 4) throw std::invalid_argument("differentiate: accuracy must be 2 or 4");
  const std::size_t steps = g.grid().steps();
  // central stencils are n-half..n+half; one-sided stencils use order+accuracy points
  const std::size_t half = static_cast<std::size_t>((order - 1) / 2 + accuracy / 2);
  const std::size_t one_sided = static_cast<std::size_t>(order + accuracy);
  const std::size_t min_steps = accuracy == 2 ? (order == 3 ? 6 : 4) : one_sided + 1;
  if (steps < min_steps) {
    throw std::invalid_argument("differentiate: grid too coarse for order " + std::to_string(order));
  }
  const double scale = std::pow(g.grid().dt(), -order);

  std::vector<double> out(g.size());
  std::vector<double> offsets;
  for (std::size_t n = 0; n <= steps; ++n) {
    std::size_t lo = 0;
    std::size_t count = 0;
    if (n >= half && n + half <= steps) {
      lo = n - half;
      count = 2 * half + 1;
    } else if (n < half) {
      lo = 0;
      count = one_sided;
    } else {
      lo = steps + 1 - one_sided;
      count = one_sided;
    }
    offsets.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      offsets[i] = static_cast<double>(lo + i) - static_cast<double>(n);
    }
    const auto w = fd_weights(0.0, offsets, order);
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += w[i] * g[lo + i];
    out[n] = s * scale;
  }
  return GridFunction(g.grid(), std::move(out));
}

}  // namespace memkern
