#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epat/errors.hpp"

namespace epat {

/// Uniform node-centred grid over the closed rectangle
/// [origin, origin + ((nx-1)hx, (ny-1)hy)]. Node (i, j) has linear index
/// j*nx + i (row-major, y outer).
struct Grid2D {
  int nx = 3;
  int ny = 3;
  double hx = 1.0;
  double hy = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double hx_, double hy_, double x0_ = 0.0,
         double y0_ = 0.0)
      : nx(nx_), ny(ny_), hx(hx_), hy(hy_), x0(x0_), y0(y0_) {
    validate();
  }

  /// Grid covering [x0, x0+lx] x [y0, y0+ly] with the given node counts.
  static Grid2D covering(int nx, int ny, double lx = 1.0, double ly = 1.0,
                         double x0 = 0.0, double y0 = 0.0) {
    detail::require<ConfigError>(nx >= 3 && ny >= 3,
                                 "grid needs at least 3 nodes per axis");
    return Grid2D(nx, ny, lx / (nx - 1), ly / (ny - 1), x0, y0);
  }

  void validate() const {
    detail::require<ConfigError>(nx >= 3 && ny >= 3,
                                 "grid needs at least 3 nodes per axis");
    detail::require<ConfigError>(hx > 0.0 && hy > 0.0 && std::isfinite(hx) &&
                                     std::isfinite(hy),
                                 "grid spacings must be positive");
  }

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
  double x(int i) const { return x0 + i * hx; }
  double y(int j) const { return y0 + j * hy; }
  double lx() const { return (nx - 1) * hx; }
  double ly() const { return (ny - 1) * hy; }
  double diameter() const { return std::hypot(lx(), ly()); }
  double hmin() const { return std::min(hx, hy); }
  bool on_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
  }

  /// Trapezoidal quadrature weight: 1 interior, 1/2 face, 1/4 corner.
  double trapezoid_weight(int i, int j) const {
    double w = 1.0;
    if (i == 0 || i == nx - 1) w *= 0.5;
    if (j == 0 || j == ny - 1) w *= 0.5;
    return w;
  }

  /// Same rectangle with `factor` times as many cells per axis.
  Grid2D refined(int factor) const {
    return Grid2D((nx - 1) * factor + 1, (ny - 1) * factor + 1, hx / factor,
                  hy / factor, x0, y0);
  }

  friend bool operator==(const Grid2D &a, const Grid2D &b) {
    return a.nx == b.nx && a.ny == b.ny && a.hx == b.hx && a.hy == b.hy &&
           a.x0 == b.x0 && a.y0 == b.y0;
  }
};

inline void require_same_grid(const Grid2D &a, const Grid2D &b,
                              const char *what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": grid mismatch");
}

/// Real-valued function sampled at the nodes of a Grid2D.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const Grid2D &g, double fill = 0.0)
      : grid_(g), values_(g.size(), fill) {}
  ScalarField(const Grid2D &g, std::vector<double> values)
      : grid_(g), values_(std::move(values)) {
    if (values_.size() != g.size())
      throw DimensionError("field has " + std::to_string(values_.size()) +
                           " values, grid expects " + std::to_string(g.size()));
  }

  template <class F> static ScalarField sample(const Grid2D &g, F &&f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
  }

  const Grid2D &grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double &operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double &operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double> &data() { return values_; }
  const std::vector<double> &data() const { return values_; }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
  }
  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return v == 0.0; });
  }

  ScalarField &operator+=(const ScalarField &o) {
    require_same_grid(grid_, o.grid_, "field +=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  ScalarField &operator-=(const ScalarField &o) {
    require_same_grid(grid_, o.grid_, "field -=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  ScalarField &operator*=(double s) {
    for (double &v : values_) v *= s;
    return *this;
  }
  /// this += s * o
  ScalarField &axpy(double s, const ScalarField &o) {
    require_same_grid(grid_, o.grid_, "field axpy");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
    return *this;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField &b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField &b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

private:
  Grid2D grid_;
  std::vector<double> values_;
};

} // namespace epat
