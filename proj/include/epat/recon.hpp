#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "epat/cg.hpp"
#include "epat/operators.hpp"

namespace epat {

struct NeumannOptions {
  int max_terms = 100;
  double rel_tol = 1e-8;
  bool history = true;

  void validate() const {
    detail::require<ConfigError>(max_terms >= 1, "max_terms must be >= 1");
    detail::require<ConfigError>(rel_tol > 0.0, "rel_tol must be positive");
  }
};

struct ReconReport {
  ScalarField estimate;
  int iterations = 0;
  /// CG: relative residuals. Neumann: hr_norm(update) / hr_norm(partial sum).
  /// The first entry belongs to the initial guess.
  std::vector<double> history;
  /// Neumann only: hr_norm(update_{k+1}) / hr_norm(update_k).
  std::vector<double> ratios;
  bool converged = false;
  /// Neumann: last measured update ratio. CG: mean residual reduction per
  /// iteration.
  double rate = 0.0;
  std::vector<std::string> warnings;
};

namespace detail {

inline void require_data(const BoundaryTrace &d, const WaveRunConfig &cfg) {
  cfg.validate();
  d.require_on(cfg.boundary(), cfg.times);
  if (!d.gamma_supported()) throw ContractError("data must vanish outside the observed set");
  if (!d.all_finite()) throw ContractError("data contain non-finite values");
}

inline void require_exact_adjoint(const WaveRunConfig &cfg) {
  if (cfg.adjoint_mode != AdjointMode::exact_discrete)
    throw ConfigError("conjugate gradients need adjoint_mode = exact_discrete");
}

inline CGResult<ScalarField> solve_normal(const ScalarField &b, const WaveRunConfig &cfg,
                                          const CGOptions &opts) {
  auto op = [&](const ScalarField &x) { return normal_op(x, cfg); };
  auto dot = [&](const ScalarField &x, const ScalarField &y) { return inner_omega(x, y, cfg.med); };
  return conjugate_gradient(op, b, dot, opts);
}

} // namespace detail

/// Conjugate gradients on S S* x = S U d from x = 0.
inline ReconReport reconstruct_cg(const BoundaryTrace &d, const WaveRunConfig &cfg,
                                  const CGOptions &opts = {}) {
  detail::require_exact_adjoint(cfg);
  detail::require_data(d, cfg);
  opts.validate();
  auto res = detail::solve_normal(rhs_method1(d, cfg), cfg, opts);
  ReconReport rep;
  rep.estimate = std::move(res.x);
  rep.iterations = res.iterations;
  rep.history = std::move(res.residuals);
  rep.converged = res.converged;
  if (rep.iterations > 0 && rep.history.size() > 1 && rep.history.back() > 0.0)
    rep.rate = std::pow(rep.history.back(), 1.0 / rep.iterations);
  return rep;
}

/// Partial sums of sum_n K^n A d, iterated as x <- A d + K x.
inline ReconReport reconstruct_neumann(const BoundaryTrace &d, const WaveRunConfig &cfg,
                                       const NeumannOptions &opts = {}) {
  detail::require_data(d, cfg);
  opts.validate();
  const BoundarySpec &bnd = cfg.boundary();
  ReconReport rep;
  if (!bnd.gamma_is_support_of_lambda())
    rep.warnings.push_back("observed set differs from {lambda > 0}; K need not be a contraction");

  ScalarField x = backproject(d, cfg);
  if (!x.all_finite()) throw DivergenceError("back-projection produced non-finite values");
  rep.iterations = 1;

  if (d.is_zero()) {
    rep.estimate = std::move(x);
    rep.converged = true;
    if (opts.history) rep.history.push_back(0.0);
    return rep;
  }

  double xnorm = hr_norm(x, cfg.med);
  if (xnorm == 0.0) {
    // Non-zero data with vanishing back-projection: the impedance is zero on
    // the observed set and the sum cannot converge to anything informative.
    // Probe K once to report its behaviour.
    ScalarField probe = ScalarField::sample(cfg.grid(), [&](double px, double py) {
      const Grid2D &g = cfg.grid();
      const double sx = (px - g.x0) / g.lx() - 0.5, sy = (py - g.y0) / g.ly() - 0.5;
      return std::exp(-(sx * sx + sy * sy) / 0.02);
    });
    const double p0 = hr_norm(probe, cfg.med);
    const double p1 = hr_norm(error_op(probe, cfg), cfg.med);
    rep.rate = p1 / p0;
    rep.ratios.push_back(rep.rate);
    rep.warnings.push_back("back-projection of the data vanishes (lambda = 0 on the observed set)");
    rep.estimate = std::move(x);
    rep.converged = false;
    if (opts.history) rep.history.push_back(0.0);
    return rep;
  }

  if (opts.history) rep.history.push_back(1.0);
  ScalarField update = x;
  double unorm = xnorm;
  bool tol_reached = false;
  for (int term = 1; term < opts.max_terms; ++term) {
    update = error_op(update, cfg);
    if (!update.all_finite()) throw DivergenceError("Neumann update is not finite");
    x += update;
    const double next = hr_norm(update, cfg.med);
    rep.ratios.push_back(next / unorm);
    unorm = next;
    xnorm = hr_norm(x, cfg.med);
    rep.iterations = term + 1;
    const double rel = xnorm > 0.0 ? unorm / xnorm : 0.0;
    if (opts.history) rep.history.push_back(rel);
    if (rel <= opts.rel_tol) {
      tol_reached = true;
      break;
    }
  }
  if (!rep.ratios.empty()) rep.rate = rep.ratios.back();
  const std::size_t tail = std::min<std::size_t>(3, rep.ratios.size());
  bool sustained = true;
  for (std::size_t k = rep.ratios.size() - tail; k < rep.ratios.size(); ++k)
    sustained = sustained && rep.ratios[k] < 1.0;
  rep.converged = tol_reached && sustained;

  if (cfg.med.q_zero() && bnd.lambda_integral() > 0.0)
    x = compatibility_shift(CauchyPair::lift(x), bnd, cfg.med).u;
  rep.estimate = std::move(x);
  return rep;
}

/// C phi = S* (S S*)^-1 phi: a boundary source steering zero Cauchy data to
/// (., phi) at t = tau.
inline BoundaryTrace control_apply(const ScalarField &phi, const WaveRunConfig &cfg,
                                   const CGOptions &opts = {}) {
  detail::require_exact_adjoint(cfg);
  cfg.validate();
  require_same_grid(phi.grid(), cfg.grid(), "control_apply");
  opts.validate();
  auto res = detail::solve_normal(phi, cfg, opts);
  return solution_op_adjoint(res.x, cfg);
}

} // namespace epat
