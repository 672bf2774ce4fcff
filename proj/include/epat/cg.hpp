#pragma once

#include <cmath>
#include <vector>

#include "epat/errors.hpp"

namespace epat {

struct CGOptions {
  int max_iters = 200;
  double rel_tol = 1e-8;
  bool history = true;

  void validate() const {
    detail::require<ConfigError>(max_iters >= 1, "max_iters must be >= 1");
    detail::require<ConfigError>(rel_tol > 0.0, "rel_tol must be positive");
  }
};

template <class Vec> struct CGResult {
  Vec x;
  int iterations = 0;
  bool converged = false;
  /// Relative residual norms, starting with 1 for the initial guess.
  std::vector<double> residuals;
};

/// Conjugate gradients for a self-adjoint positive operator `op` with respect
/// to the inner product `dot`, started from zero. Vec needs copy, axpy and
/// operator*=.
template <class Vec, class Op, class Dot>
CGResult<Vec> conjugate_gradient(const Op &op, const Vec &b, const Dot &dot, const CGOptions &opts) {
  opts.validate();
  CGResult<Vec> out{b, 0, false, {}};
  out.x *= 0.0;
  const double bnorm = std::sqrt(dot(b, b));
  if (!std::isfinite(bnorm)) throw DivergenceError("right-hand side is not finite");
  if (bnorm == 0.0) {
    out.converged = true;
    if (opts.history) out.residuals.push_back(0.0);
    return out;
  }
  if (opts.history) out.residuals.push_back(1.0);

  Vec r = b;
  Vec p = b;
  double rr = dot(r, r);
  for (int it = 1; it <= opts.max_iters; ++it) {
    Vec ap = op(p);
    const double pap = dot(p, ap);
    if (!std::isfinite(pap)) throw DivergenceError("non-finite curvature in conjugate gradients");
    if (pap <= 0.0)
      throw DivergenceError("operator is not positive definite (p'Ap = " + std::to_string(pap) + ")");
    const double alpha = rr / pap;
    out.x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    const double rr_new = dot(r, r);
    if (!std::isfinite(rr_new)) throw DivergenceError("non-finite residual in conjugate gradients");
    out.iterations = it;
    const double rel = std::sqrt(rr_new) / bnorm;
    if (opts.history) out.residuals.push_back(rel);
    if (rel <= opts.rel_tol) {
      out.converged = true;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    p *= beta;
    p.axpy(1.0, r);
  }
  return out;
}

} // namespace epat
