#pragma once

#include <cmath>

#include "epat/boundary.hpp"
#include "epat/medium.hpp"
#include "epat/trace.hpp"

namespace epat {

/// <f, g>_Omega = sum f g c^-2 w hx hy with trapezoidal weights w.
inline double inner_omega(const ScalarField &f, const ScalarField &g, const MediumParams &med) {
  require_same_grid(f.grid(), g.grid(), "inner_omega");
  require_same_grid(f.grid(), med.grid(), "inner_omega");
  const Grid2D &gr = f.grid();
  double s = 0.0;
  for (int j = 0; j < gr.ny; ++j)
    for (int i = 0; i < gr.nx; ++i) {
      const std::size_t k = gr.index(i, j);
      s += f[k] * g[k] * med.inv_c2(k) * gr.trapezoid_weight(i, j);
    }
  return s * gr.hx * gr.hy;
}

inline double norm_omega(const ScalarField &f, const MediumParams &med) {
  return std::sqrt(inner_omega(f, f, med));
}

/// Space-time quadrature over the boundary: trapezoidal in time, arc length
/// in space, weighted by c^-2 at the boundary node.
inline double inner_trace(const BoundaryTrace &a, const BoundaryTrace &b,
                          const MediumParams &med) {
  a.require_compatible(b);
  const BoundarySpec &bnd = a.boundary();
  require_same_grid(bnd.grid(), med.grid(), "inner_trace");
  const TimeAxis &ta = a.times();
  double s = 0.0;
  for (int k = 0; k <= ta.nt; ++k) {
    double row = 0.0;
    for (std::size_t n = 0; n < bnd.size(); ++n) {
      const BoundaryNode &node = bnd.node(n);
      row += a(k, n) * b(k, n) * med.inv_c2(node.index) * node.ds;
    }
    s += ta.weight(k) * row;
  }
  return s * ta.dt;
}

inline double norm_trace(const BoundaryTrace &a, const MediumParams &med) {
  return std::sqrt(inner_trace(a, a, med));
}

namespace detail {
/// Second-order derivative along one axis: centred inside, one-sided
/// three-point formula on the faces.
inline double diff_x(const ScalarField &u, int i, int j) {
  const Grid2D &g = u.grid();
  if (i == 0) return (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) / (2.0 * g.hx);
  if (i == g.nx - 1)
    return (3.0 * u(i, j) - 4.0 * u(i - 1, j) + u(i - 2, j)) / (2.0 * g.hx);
  return (u(i + 1, j) - u(i - 1, j)) / (2.0 * g.hx);
}
inline double diff_y(const ScalarField &u, int i, int j) {
  const Grid2D &g = u.grid();
  if (j == 0) return (-3.0 * u(i, 0) + 4.0 * u(i, 1) - u(i, 2)) / (2.0 * g.hy);
  if (j == g.ny - 1)
    return (3.0 * u(i, j) - 4.0 * u(i, j - 1) + u(i, j - 2)) / (2.0 * g.hy);
  return (u(i, j + 1) - u(i, j - 1)) / (2.0 * g.hy);
}

inline double potential_energy(const ScalarField &u, const MediumParams &med) {
  const Grid2D &g = u.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double ux = diff_x(u, i, j), uy = diff_y(u, i, j);
      s += (ux * ux + uy * uy + med.inv_c2(k) * med.q()[k] * u[k] * u[k]) *
           g.trapezoid_weight(i, j);
    }
  return 0.5 * s * g.hx * g.hy;
}
} // namespace detail

/// E = 1/2 int |grad u|^2 + c^-2 q u^2 + c^-2 ut^2.
inline double energy(const CauchyPair &state, const MediumParams &med) {
  require_same_grid(state.u.grid(), med.grid(), "energy");
  require_same_grid(state.ut.grid(), med.grid(), "energy");
  return detail::potential_energy(state.u, med) + 0.5 * inner_omega(state.ut, state.ut, med);
}

/// Dirichlet norm (1/2 int |grad u|^2 + c^-2 q u^2)^{1/2}; a seminorm when q = 0.
inline double hr_norm(const ScalarField &u0, const MediumParams &med) {
  require_same_grid(u0.grid(), med.grid(), "hr_norm");
  return std::sqrt(detail::potential_energy(u0, med));
}

/// int_Omega c^-2 ut dx + int_dOmega lambda u dS, invariant in time when q = 0.
inline double compatibility_functional(const CauchyPair &state, const BoundarySpec &bnd,
                                       const MediumParams &med) {
  require_same_grid(state.grid(), bnd.grid(), "compatibility functional");
  require_same_grid(state.grid(), med.grid(), "compatibility functional");
  const Grid2D &g = state.grid();
  double vol = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      vol += state.ut(i, j) * med.inv_c2(g.index(i, j)) * g.trapezoid_weight(i, j);
  vol *= g.hx * g.hy;
  double surf = 0.0;
  for (std::size_t b = 0; b < bnd.size(); ++b)
    surf += bnd.lambda(b) * state.u[bnd.node(b).index] * bnd.node(b).ds;
  return vol + surf;
}

/// Shifts u by the constant that makes the compatibility functional vanish.
/// Only meaningful for q = 0; requires int lambda dS > 0.
inline CauchyPair compatibility_shift(const CauchyPair &state, const BoundarySpec &bnd,
                                      const MediumParams &med) {
  require_same_grid(state.grid(), med.grid(), "compatibility_shift");
  detail::require<ContractError>(med.q_zero(), "compatibility shift requires q = 0");
  const double lam = bnd.lambda_integral();
  if (!(lam > 0.0))
    throw DegenerateError("compatibility shift undefined: boundary integral of lambda is zero");
  const double shift = compatibility_functional(state, bnd, med) / lam;
  CauchyPair out = state;
  for (double &v : out.u.data()) v -= shift;
  return out;
}

} // namespace epat
