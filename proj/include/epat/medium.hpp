#pragma once

#include "epat/grid.hpp"

namespace epat {

/// Coefficients of A u = c^2 Lap u - q u. The metric is the Euclidean
/// identity, so the volume weight of the H^0 inner product is c^-2.
class MediumParams {
public:
  MediumParams() = default;
  MediumParams(ScalarField c, ScalarField q) : c_(std::move(c)), q_(std::move(q)) {
    require_same_grid(c_.grid(), q_.grid(), "medium");
    detail::require<ContractError>(c_.all_finite() && q_.all_finite(),
                                   "medium coefficients must be finite");
    detail::require<ContractError>(c_.min() > 0.0, "wave speed must be positive");
    detail::require<ContractError>(q_.min() >= 0.0, "potential must be non-negative");
  }
  explicit MediumParams(ScalarField c) : MediumParams(c, ScalarField(c.grid(), 0.0)) {}

  static MediumParams uniform(const Grid2D &g, double c = 1.0, double q = 0.0) {
    return MediumParams(ScalarField(g, c), ScalarField(g, q));
  }

  const Grid2D &grid() const { return c_.grid(); }
  const ScalarField &c() const { return c_; }
  const ScalarField &q() const { return q_; }
  double c_max() const { return c_.max(); }
  double c_min() const { return c_.min(); }
  bool q_zero() const { return q_.is_zero(); }

  /// c^-2 at linear index k.
  double inv_c2(std::size_t k) const { return 1.0 / (c_[k] * c_[k]); }

private:
  ScalarField c_;
  ScalarField q_;
};

} // namespace epat
