#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "epat/boundary.hpp"
#include "epat/grid.hpp"

namespace epat {

/// Uniform time axis t_k = k dt, k = 0..nt, with tau = nt dt.
struct TimeAxis {
  double dt = 1.0;
  int nt = 1;

  TimeAxis() = default;
  TimeAxis(double dt_, int nt_) : dt(dt_), nt(nt_) {
    detail::require<ConfigError>(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    detail::require<ConfigError>(nt >= 1, "need at least one time step");
  }
  /// Smallest number of steps covering tau with dt <= dt_max.
  static TimeAxis covering(double tau, double dt_max) {
    detail::require<ConfigError>(tau > 0.0 && dt_max > 0.0, "tau and dt must be positive");
    const int nt = std::max(1, static_cast<int>(std::ceil(tau / dt_max - 1e-9)));
    return TimeAxis(tau / nt, nt);
  }

  double tau() const { return nt * dt; }
  /// Trapezoidal time weight of sample k.
  double weight(int k) const { return (k == 0 || k == nt) ? 0.5 : 1.0; }

  friend bool operator==(const TimeAxis &a, const TimeAxis &b) {
    return a.dt == b.dt && a.nt == b.nt;
  }
};

/// Space-time samples on (0, tau) x dOmega, stored time-outer:
/// value(k, b) for k = 0..nt and boundary slot b.
class BoundaryTrace {
public:
  BoundaryTrace() = default;
  BoundaryTrace(std::shared_ptr<const BoundarySpec> bnd, const TimeAxis &times)
      : bnd_(std::move(bnd)), times_(times), values_((times.nt + 1) * bnd_->size(), 0.0) {}
  BoundaryTrace(std::shared_ptr<const BoundarySpec> bnd, const TimeAxis &times,
                std::vector<double> values)
      : bnd_(std::move(bnd)), times_(times), values_(std::move(values)) {
    detail::require<DimensionError>(values_.size() == (times.nt + 1) * bnd_->size(),
                                    "trace size does not match (nt+1) x boundary nodes");
  }

  const BoundarySpec &boundary() const { return *bnd_; }
  const std::shared_ptr<const BoundarySpec> &boundary_ptr() const { return bnd_; }
  const TimeAxis &times() const { return times_; }
  int nt() const { return times_.nt; }
  std::size_t n_nodes() const { return bnd_->size(); }

  double &operator()(int k, std::size_t b) { return values_[k * bnd_->size() + b]; }
  double operator()(int k, std::size_t b) const { return values_[k * bnd_->size() + b]; }
  double *slice(int k) { return values_.data() + k * bnd_->size(); }
  const double *slice(int k) const { return values_.data() + k * bnd_->size(); }

  std::vector<double> &data() { return values_; }
  const std::vector<double> &data() const { return values_; }

  bool gamma_supported() const {
    for (int k = 0; k <= nt(); ++k)
      for (std::size_t b = 0; b < n_nodes(); ++b)
        if (!bnd_->in_gamma(b) && (*this)(k, b) != 0.0) return false;
    return true;
  }
  /// Zero every sample at nodes outside the observed set.
  BoundaryTrace &restrict_to_gamma() {
    for (int k = 0; k <= nt(); ++k)
      for (std::size_t b = 0; b < n_nodes(); ++b)
        if (!bnd_->in_gamma(b)) (*this)(k, b) = 0.0;
    return *this;
  }
  bool is_zero() const {
    for (double v : values_)
      if (v != 0.0) return false;
    return true;
  }
  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  BoundaryTrace &operator+=(const BoundaryTrace &o) {
    require_compatible(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  BoundaryTrace &operator-=(const BoundaryTrace &o) {
    require_compatible(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  BoundaryTrace &operator*=(double s) {
    for (double &v : values_) v *= s;
    return *this;
  }
  BoundaryTrace &axpy(double s, const BoundaryTrace &o) {
    require_compatible(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
    return *this;
  }
  friend BoundaryTrace operator+(BoundaryTrace a, const BoundaryTrace &b) { return a += b; }
  friend BoundaryTrace operator-(BoundaryTrace a, const BoundaryTrace &b) { return a -= b; }
  friend BoundaryTrace operator*(double s, BoundaryTrace a) { return a *= s; }

  /// Throws unless this trace lives on `bnd` x `times`.
  void require_on(const BoundarySpec &bnd, const TimeAxis &times) const {
    if (!(bnd_.get() == &bnd || *bnd_ == bnd) || !(times_ == times))
      throw DimensionError("trace does not match the run's boundary and time axis");
  }

  void require_compatible(const BoundaryTrace &o) const {
    if (!(bnd_ == o.bnd_ || *bnd_ == *o.bnd_) || !(times_ == o.times_))
      throw DimensionError("traces live on different boundaries or time axes");
  }

private:
  std::shared_ptr<const BoundarySpec> bnd_;
  TimeAxis times_;
  std::vector<double> values_;
};

/// Cauchy data (u, u_t) at one instant.
struct CauchyPair {
  ScalarField u;
  ScalarField ut;

  CauchyPair() = default;
  CauchyPair(ScalarField u_, ScalarField ut_) : u(std::move(u_)), ut(std::move(ut_)) {
    require_same_grid(u.grid(), ut.grid(), "cauchy pair");
  }
  /// (u0, 0)
  static CauchyPair lift(const ScalarField &u0) {
    return CauchyPair(u0, ScalarField(u0.grid(), 0.0));
  }
  const Grid2D &grid() const { return u.grid(); }
};

} // namespace epat
