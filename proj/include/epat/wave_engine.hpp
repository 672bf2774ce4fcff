#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epat/boundary.hpp"
#include "epat/medium.hpp"
#include "epat/norms.hpp"
#include "epat/trace.hpp"

namespace epat {

/// Boundary condition applied by one solve. `g` denotes the outward normal
/// derivative imposed through the ghost node.
enum class BCVariant {
  robin_plus,            // du/dn + lambda u_t = 0
  robin_minus,           // du/dn - lambda u_t = 0
  neumann_source,        // du/dn + lambda u_t = zeta on Gamma, du/dn = 0 elsewhere
  backprojection_source, // du/dn = s on Gamma (s = -lambda d_t data), 0 elsewhere
  pure_neumann,          // du/dn = 0
};

enum class AdjointMode { pde_faithful, exact_discrete };
enum class Direction { forward, backward };

inline bool carries_source(BCVariant bc) {
  return bc == BCVariant::neumann_source || bc == BCVariant::backprojection_source;
}
inline int robin_sign(BCVariant bc) {
  switch (bc) {
  case BCVariant::robin_plus:
  case BCVariant::neumann_source: return 1;
  case BCVariant::robin_minus: return -1;
  default: return 0;
  }
}

struct WaveRunConfig {
  MediumParams med;
  std::shared_ptr<const BoundarySpec> bnd;
  TimeAxis times;
  double cfl_factor = 0.5;
  AdjointMode adjoint_mode = AdjointMode::exact_discrete;

  WaveRunConfig() = default;
  WaveRunConfig(MediumParams m, std::shared_ptr<const BoundarySpec> b, TimeAxis t,
                double cfl = 0.5, AdjointMode mode = AdjointMode::exact_discrete)
      : med(std::move(m)), bnd(std::move(b)), times(t), cfl_factor(cfl), adjoint_mode(mode) {
    validate();
  }

  /// Picks the largest dt allowed by the CFL factor that divides tau evenly.
  static WaveRunConfig for_tau(MediumParams m, std::shared_ptr<const BoundarySpec> b,
                               double tau, double cfl = 0.5,
                               AdjointMode mode = AdjointMode::exact_discrete) {
    detail::require<ConfigError>(cfl > 0.0 && cfl <= 1.0, "cfl factor must lie in (0, 1]");
    const double dt_max = cfl * m.grid().hmin() / m.c_max();
    return WaveRunConfig(std::move(m), std::move(b), TimeAxis::covering(tau, dt_max), cfl, mode);
  }

  const Grid2D &grid() const { return med.grid(); }
  const BoundarySpec &boundary() const { return *bnd; }
  double dt() const { return times.dt; }
  int nt() const { return times.nt; }
  double tau() const { return times.tau(); }

  WaveRunConfig with_mode(AdjointMode m) const {
    WaveRunConfig out = *this;
    out.adjoint_mode = m;
    return out;
  }
  WaveRunConfig with_times(TimeAxis t) const {
    WaveRunConfig out = *this;
    out.times = t;
    out.validate();
    return out;
  }

  void validate() const {
    detail::require<ConfigError>(bnd != nullptr, "run config has no boundary");
    require_same_grid(med.grid(), bnd->grid(), "run config");
    detail::require<ConfigError>(cfl_factor > 0.0 && cfl_factor <= 1.0,
                                 "cfl factor must lie in (0, 1]");
    const Grid2D &g = med.grid();
    const double cmax = med.c_max();
    if (times.dt > cfl_factor * g.hmin() / cmax * (1.0 + 1e-12))
      throw ConfigError("CFL violation: dt = " + std::to_string(times.dt) + " exceeds " +
                        std::to_string(cfl_factor * g.hmin() / cmax));
    // Leapfrog with the 5-point Laplacian is stable only below this bound.
    const double courant = cmax * times.dt * std::sqrt(1.0 / (g.hx * g.hx) + 1.0 / (g.hy * g.hy));
    if (courant > 1.0)
      throw ConfigError("CFL violation: c dt sqrt(1/hx^2 + 1/hy^2) = " + std::to_string(courant) +
                        " > 1");
  }
};

/// Per-run coefficient tables for the explicit three-level update
///   u+ = 2u - u- + dt^2 (c^2 Lap_h u - q u) + dt^2 c^2 ghost g
/// where the boundary Laplacian mirrors the missing neighbour and g is the
/// imposed normal derivative. A centred u_t in g makes the Robin update a
/// scalar implicit solve per boundary node.
class LeapfrogKernel {
public:
  explicit LeapfrogKernel(const WaveRunConfig &cfg)
      : grid_(cfg.grid()), bnd_(cfg.bnd), dt_(cfg.dt()) {
    const std::size_t n = grid_.size();
    dt2c2_.resize(n);
    dt2q_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double c = cfg.med.c()[k];
      dt2c2_[k] = dt_ * dt_ * c * c;
      dt2q_[k] = dt_ * dt_ * cfg.med.q()[k];
    }
    const std::size_t nb = bnd_->size();
    inject_.resize(nb);
    alpha_.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const BoundaryNode &node = bnd_->node(b);
      inject_[b] = dt2c2_[node.index] * node.ghost;
      alpha_[b] = 0.5 * inject_[b] * bnd_->lambda(b) / dt_;
    }
  }

  const Grid2D &grid() const { return grid_; }
  const BoundarySpec &boundary() const { return *bnd_; }
  double dt() const { return dt_; }
  /// dt^2 c^2 ghost at boundary slot b.
  double inject(std::size_t b) const { return inject_[b]; }
  /// dt c^2 ghost lambda / 2 at boundary slot b.
  double alpha(std::size_t b) const { return alpha_[b]; }

  /// out = dt^2 (c^2 Lap_N u - q u), Neumann mirror at the faces.
  void apply_scaled_operator(std::span<const double> u, std::span<double> out) const {
    const int nx = grid_.nx, ny = grid_.ny;
    const double ihx2 = 1.0 / (grid_.hx * grid_.hx), ihy2 = 1.0 / (grid_.hy * grid_.hy);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx;
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t k = row + i;
        const double lap = (u[k - 1] - 2.0 * u[k] + u[k + 1]) * ihx2 +
                           (u[k - nx] - 2.0 * u[k] + u[k + nx]) * ihy2;
        out[k] = dt2c2_[k] * lap - dt2q_[k] * u[k];
      }
    }
    for (const BoundaryNode &node : bnd_->nodes()) {
      const std::size_t k = node.index;
      out[k] = dt2c2_[k] * boundary_laplacian(u, node) - dt2q_[k] * u[k];
    }
  }

  /// One leapfrog step. `sign` selects the Robin term (+1 plus, -1 minus,
  /// 0 none); `source` (one value per boundary slot, or empty) adds to g.
  void step(std::span<const double> prev, std::span<const double> now, std::span<double> next,
            int sign, std::span<const double> source) const {
    const int nx = grid_.nx, ny = grid_.ny;
    const double ihx2 = 1.0 / (grid_.hx * grid_.hx), ihy2 = 1.0 / (grid_.hy * grid_.hy);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx;
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t k = row + i;
        const double lap = (now[k - 1] - 2.0 * now[k] + now[k + 1]) * ihx2 +
                           (now[k - nx] - 2.0 * now[k] + now[k + nx]) * ihy2;
        next[k] = 2.0 * now[k] - prev[k] + dt2c2_[k] * lap - dt2q_[k] * now[k];
      }
    }
    const auto &nodes = bnd_->nodes();
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      const std::size_t k = nodes[b].index;
      const double a = sign * alpha_[b];
      double rhs = 2.0 * now[k] - (1.0 - a) * prev[k] + dt2c2_[k] * boundary_laplacian(now, nodes[b]) -
                   dt2q_[k] * now[k];
      if (!source.empty()) rhs += inject_[b] * source[b];
      next[k] = rhs / (1.0 + a);
    }
  }

  /// Second level from Cauchy data (u, v):
  ///   u1 = u + dt v + dt^2/2 (A u + c^2 ghost g0), g0 = source/(1 + sign alpha) - sign lambda v.
  /// The source carries the same implicit Robin factor as in step().
  void start(std::span<const double> u, std::span<const double> v, std::span<double> u1, int sign,
             std::span<const double> source) const {
    apply_scaled_operator(u, u1);
    for (std::size_t k = 0; k < u1.size(); ++k)
      u1[k] = u[k] + (v.empty() ? 0.0 : dt_ * v[k]) + 0.5 * u1[k];
    const auto &nodes = bnd_->nodes();
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      const std::size_t k = nodes[b].index;
      double g = source.empty() ? 0.0 : source[b] / (1.0 + sign * alpha_[b]);
      if (!v.empty()) g -= sign * bnd_->lambda(b) * v[k];
      u1[k] += 0.5 * inject_[b] * g;
    }
  }

  /// Mirror-ghost Laplacian at a boundary node.
  double boundary_laplacian(std::span<const double> u, const BoundaryNode &node) const {
    const int nx = grid_.nx;
    const std::size_t k = node.index;
    const double ihx2 = 1.0 / (grid_.hx * grid_.hx), ihy2 = 1.0 / (grid_.hy * grid_.hy);
    const double xm = node.i > 0 ? u[k - 1] : u[k + 1];
    const double xp = node.i < nx - 1 ? u[k + 1] : u[k - 1];
    const double ym = node.j > 0 ? u[k - nx] : u[k + nx];
    const double yp = node.j < grid_.ny - 1 ? u[k + nx] : u[k - nx];
    return (xm - 2.0 * u[k] + xp) * ihx2 + (ym - 2.0 * u[k] + yp) * ihy2;
  }

private:
  Grid2D grid_;
  std::shared_ptr<const BoundarySpec> bnd_;
  double dt_;
  std::vector<double> dt2c2_, dt2q_;
  std::vector<double> inject_, alpha_;
};

/// Solution of a forward solve.
struct Trajectory {
  std::vector<ScalarField> snapshots; // empty unless requested
  BoundaryTrace trace;                // all boundary nodes, k = 0..nt
  CauchyPair final_state;             // (u, u_t) at t = tau, u_t centred
  /// Staggered leapfrog energy E^{n+1/2}, n = 0..nt-1 (when requested).
  std::vector<double> discrete_energy;
  /// Discrete int c^-2 u_t + int lambda u dS at half steps (when requested).
  std::vector<double> conserved;
};

struct ForwardOptions {
  bool keep_snapshots = false;
  bool record_diagnostics = false;
};

namespace detail {

inline void require_gamma_source(const BoundarySpec &bnd, std::span<const double> src) {
  for (std::size_t b = 0; b < bnd.size(); ++b)
    if (!bnd.in_gamma(b) && src[b] != 0.0)
      throw ContractError("boundary source is non-zero outside the observed set");
}

/// -<A_h u, v>_Omega, the bilinear form of the scheme (A_h = c^2 Lap_N - q).
inline double scheme_form(const LeapfrogKernel &kern, const MediumParams &med,
                          std::span<const double> u, std::span<const double> v,
                          std::vector<double> &scratch) {
  scratch.resize(u.size());
  kern.apply_scaled_operator(u, scratch);
  const Grid2D &g = kern.grid();
  const double inv_dt2 = 1.0 / (kern.dt() * kern.dt());
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      s -= scratch[k] * inv_dt2 * v[k] * med.inv_c2(k) * g.trapezoid_weight(i, j);
    }
  return s * g.hx * g.hy;
}

inline double staggered_energy(const LeapfrogKernel &kern, const MediumParams &med,
                               std::span<const double> u0, std::span<const double> u1,
                               std::vector<double> &scratch) {
  const Grid2D &g = kern.grid();
  const double dt = kern.dt();
  double kin = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = (u1[k] - u0[k]) / dt;
      kin += d * d * med.inv_c2(k) * g.trapezoid_weight(i, j);
    }
  kin *= g.hx * g.hy;
  return 0.5 * kin + 0.5 * scheme_form(kern, med, u1, u0, scratch);
}

inline double staggered_conserved(const LeapfrogKernel &kern, const MediumParams &med,
                                  std::span<const double> u0, std::span<const double> u1) {
  const Grid2D &g = kern.grid();
  const double dt = kern.dt();
  double vol = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      vol += (u1[k] - u0[k]) / dt * med.inv_c2(k) * g.trapezoid_weight(i, j);
    }
  vol *= g.hx * g.hy;
  double surf = 0.0;
  const BoundarySpec &bnd = kern.boundary();
  for (std::size_t b = 0; b < bnd.size(); ++b) {
    const std::size_t k = bnd.node(b).index;
    surf += bnd.lambda(b) * 0.5 * (u0[k] + u1[k]) * bnd.node(b).ds;
  }
  return vol + surf;
}

/// Three rotating time levels.
struct Levels {
  std::vector<double> prev, now, next;
  explicit Levels(std::size_t n) : prev(n, 0.0), now(n, 0.0), next(n, 0.0) {}
  void rotate() {
    std::swap(prev, now);
    std::swap(now, next);
  }
};

} // namespace detail

/// u at t + dt from (u at t - dt, u at t).
inline ScalarField step_scheme(const ScalarField &state_prev, const ScalarField &state_now,
                               const WaveRunConfig &cfg, BCVariant bc,
                               const std::optional<std::vector<double>> &source_slice = std::nullopt) {
  cfg.validate();
  require_same_grid(state_prev.grid(), cfg.grid(), "step_scheme");
  require_same_grid(state_now.grid(), cfg.grid(), "step_scheme");
  if (carries_source(bc) != source_slice.has_value())
    throw ContractError("a boundary source must be given exactly for source-carrying variants");
  std::span<const double> src;
  if (source_slice) {
    detail::require<DimensionError>(source_slice->size() == cfg.boundary().size(),
                                    "source slice needs one value per boundary node");
    detail::require_gamma_source(cfg.boundary(), *source_slice);
    src = *source_slice;
  }
  LeapfrogKernel kern(cfg);
  ScalarField next(cfg.grid());
  kern.step(state_prev.values(), state_now.values(), next.values(), robin_sign(bc), src);
  return next;
}

/// Forward problem with impedance boundary, u(0) = u0, u_t(0) = 0.
inline Trajectory forward_solve(const ScalarField &u0, const WaveRunConfig &cfg,
                                const ForwardOptions &opts = {}) {
  cfg.validate();
  require_same_grid(u0.grid(), cfg.grid(), "forward_solve");
  const Grid2D &g = cfg.grid();
  const BoundarySpec &bnd = cfg.boundary();
  const int nt = cfg.nt();
  LeapfrogKernel kern(cfg);

  Trajectory out;
  out.trace = BoundaryTrace(cfg.bnd, cfg.times);
  auto record = [&](int k, const std::vector<double> &u) {
    double *row = out.trace.slice(k);
    for (std::size_t b = 0; b < bnd.size(); ++b) row[b] = u[bnd.node(b).index];
    if (opts.keep_snapshots) out.snapshots.emplace_back(g, u);
  };

  detail::Levels lv(g.size());
  std::vector<double> scratch;
  lv.now = u0.data();
  kern.start(lv.now, {}, lv.next, +1, {});
  record(0, lv.now);
  lv.rotate();
  for (int n = 1;; ++n) {
    if (opts.record_diagnostics) {
      out.discrete_energy.push_back(detail::staggered_energy(kern, cfg.med, lv.prev, lv.now, scratch));
      out.conserved.push_back(detail::staggered_conserved(kern, cfg.med, lv.prev, lv.now));
    }
    record(n, lv.now);
    kern.step(lv.prev, lv.now, lv.next, +1, {});
    if (n == nt) break;
    lv.rotate();
  }
  // lv.prev = u^{nt-1}, lv.now = u^{nt}, lv.next = u^{nt+1}
  ScalarField ut(g);
  for (std::size_t k = 0; k < g.size(); ++k) ut[k] = (lv.next[k] - lv.prev[k]) / (2.0 * cfg.dt());
  out.final_state = CauchyPair(ScalarField(g, lv.now), std::move(ut));
  return out;
}

/// Discrete measurement map: forward trace restricted to the observed set.
inline BoundaryTrace measure(const ScalarField &u0, const WaveRunConfig &cfg) {
  BoundaryTrace tr = forward_solve(u0, cfg).trace;
  return tr.restrict_to_gamma();
}

/// Control problem: zero Cauchy data at t = 0, du/dn + lambda u_t = zeta on
/// Gamma. Returns xi_t(tau) by a centred difference over one extra step.
inline ScalarField solution_op(const BoundaryTrace &zeta, const WaveRunConfig &cfg) {
  cfg.validate();
  zeta.require_on(cfg.boundary(), cfg.times);
  if (!zeta.gamma_supported()) throw ContractError("control must vanish outside the observed set");
  const Grid2D &g = cfg.grid();
  const int nt = cfg.nt();
  const std::size_t nb = cfg.boundary().size();
  LeapfrogKernel kern(cfg);
  detail::Levels lv(g.size());
  kern.start(lv.now, {}, lv.next, +1, std::span<const double>(zeta.slice(0), nb));
  lv.rotate();
  for (int n = 1; n <= nt; ++n) {
    kern.step(lv.prev, lv.now, lv.next, +1, std::span<const double>(zeta.slice(n), nb));
    if (n < nt) lv.rotate();
  }
  ScalarField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = (lv.next[k] - lv.prev[k]) / (2.0 * cfg.dt());
  return out;
}

namespace detail {

/// Algebraic transpose of solution_op with respect to inner_omega and
/// inner_trace, by a reverse sweep of the update recurrence. The sweep is
/// written in primal variables eta = M^-1 xi_bar, which lets it reuse the
/// forward stencil since M A_h is symmetric.
inline BoundaryTrace solution_op_transpose(const ScalarField &z, const WaveRunConfig &cfg) {
  const Grid2D &g = cfg.grid();
  const BoundarySpec &bnd = cfg.boundary();
  const int nt = cfg.nt();
  const double dt = cfg.dt();
  const std::size_t n = g.size();
  LeapfrogKernel kern(cfg);

  std::vector<double> eta_hi(n), eta_mid(n, 0.0), eta_lo(n), theta(n), work(n);
  for (std::size_t k = 0; k < n; ++k) {
    eta_hi[k] = z[k] / (2.0 * dt);  // eta^{nt+1}
    eta_lo[k] = -z[k] / (2.0 * dt); // eta^{nt-1}
  }
  BoundaryTrace out(cfg.bnd, cfg.times);
  auto c2 = [&](std::size_t k) { return cfg.med.c()[k] * cfg.med.c()[k]; };

  for (int step = nt; step >= 1; --step) {
    // eta_hi = eta^{step+1} is complete here.
    theta = eta_hi;
    for (std::size_t b = 0; b < bnd.size(); ++b) {
      const std::size_t k = bnd.node(b).index;
      theta[k] = eta_hi[k] / (1.0 + kern.alpha(b));
      if (bnd.in_gamma(b)) out(step, b) = c2(k) * dt * theta[k] / cfg.times.weight(step);
    }
    kern.apply_scaled_operator(theta, work);
    for (std::size_t k = 0; k < n; ++k) eta_mid[k] += 2.0 * theta[k] + work[k];
    for (std::size_t k = 0; k < n; ++k) eta_lo[k] -= theta[k];
    for (std::size_t b = 0; b < bnd.size(); ++b) {
      const std::size_t k = bnd.node(b).index;
      eta_lo[k] += kern.alpha(b) * theta[k];
    }
    std::swap(eta_hi, eta_mid);
    std::swap(eta_mid, eta_lo);
    std::fill(eta_lo.begin(), eta_lo.end(), 0.0);
  }
  // eta_hi = eta^1 feeds the start level.
  for (std::size_t b = 0; b < bnd.size(); ++b) {
    const std::size_t k = bnd.node(b).index;
    if (bnd.in_gamma(b))
      out(0, b) = c2(k) * dt * eta_hi[k] / (1.0 + kern.alpha(b)) * (0.5 / cfg.times.weight(0));
  }
  return out;
}

} // namespace detail

/// Time-reverse of a trace: v(t) -> v(tau - t).
inline BoundaryTrace time_reverse(const BoundaryTrace &tr) {
  BoundaryTrace out(tr.boundary_ptr(), tr.times());
  const int nt = tr.nt();
  for (int k = 0; k <= nt; ++k)
    std::copy(tr.slice(nt - k), tr.slice(nt - k) + tr.n_nodes(), out.slice(k));
  return out;
}

/// Adjoint of solution_op. pde_faithful solves the time-reversed impedance
/// problem (w(tau) = z, w_t(tau) = 0, dw/dn - lambda w_t = 0), which under
/// t -> tau - t is the forward problem, so S* z = U(Lambda z).
/// exact_discrete returns the algebraic transpose.
inline BoundaryTrace solution_op_adjoint(const ScalarField &z, const WaveRunConfig &cfg) {
  cfg.validate();
  require_same_grid(z.grid(), cfg.grid(), "solution_op_adjoint");
  if (cfg.adjoint_mode == AdjointMode::exact_discrete) return detail::solution_op_transpose(z, cfg);
  return time_reverse(measure(z, cfg));
}

/// Time derivative of a trace: centred inside, one-sided second order at the
/// ends (first order when nt = 1).
inline BoundaryTrace trace_time_derivative(const BoundaryTrace &d) {
  BoundaryTrace out(d.boundary_ptr(), d.times());
  const int nt = d.nt();
  const double dt = d.times().dt;
  const std::size_t nb = d.n_nodes();
  for (std::size_t b = 0; b < nb; ++b) {
    if (nt == 1) {
      out(0, b) = out(1, b) = (d(1, b) - d(0, b)) / dt;
      continue;
    }
    out(0, b) = (-3.0 * d(0, b) + 4.0 * d(1, b) - d(2, b)) / (2.0 * dt);
    out(nt, b) = (3.0 * d(nt, b) - 4.0 * d(nt - 1, b) + d(nt - 2, b)) / (2.0 * dt);
    for (int k = 1; k < nt; ++k) out(k, b) = (d(k + 1, b) - d(k - 1, b)) / (2.0 * dt);
  }
  return out;
}

/// Back-projection: v(tau) = v_t(tau) = 0, dv/dn = -lambda d_t(data) on
/// Gamma, solved backward to t = 0. Returns v(0).
inline ScalarField backproject(const BoundaryTrace &d, const WaveRunConfig &cfg) {
  cfg.validate();
  d.require_on(cfg.boundary(), cfg.times);
  if (!d.gamma_supported()) throw ContractError("data must vanish outside the observed set");
  const Grid2D &g = cfg.grid();
  const BoundarySpec &bnd = cfg.boundary();
  const int nt = cfg.nt();
  const std::size_t nb = bnd.size();

  BoundaryTrace src = trace_time_derivative(d);
  for (int k = 0; k <= nt; ++k)
    for (std::size_t b = 0; b < nb; ++b) src(k, b) *= -bnd.lambda(b);

  // Run in reversed time s = tau - t; the imposed normal derivative keeps
  // its value at each physical instant.
  LeapfrogKernel kern(cfg);
  detail::Levels lv(g.size());
  kern.start(lv.now, {}, lv.next, 0, std::span<const double>(src.slice(nt), nb));
  lv.rotate();
  for (int s = 1; s < nt; ++s) {
    kern.step(lv.prev, lv.now, lv.next, 0, std::span<const double>(src.slice(nt - s), nb));
    lv.rotate();
  }
  return ScalarField(g, lv.now);
}

/// Evolution of Cauchy data by |t_steps| steps. Backward runs negate the
/// velocity, march forward and negate again, which is exact for the
/// time-symmetric Neumann scheme. The terminal velocity is centred, so a
/// Neumann forward/backward round trip returns the input up to rounding.
inline CauchyPair evolve_cauchy(const CauchyPair &state, int t_steps, BCVariant bc,
                                Direction direction, const WaveRunConfig &cfg) {
  cfg.validate();
  require_same_grid(state.grid(), cfg.grid(), "evolve_cauchy");
  detail::require<ContractError>(bc == BCVariant::robin_plus || bc == BCVariant::pure_neumann,
                                 "evolve_cauchy supports robin_plus and pure_neumann only");
  detail::require<ContractError>(t_steps >= 0, "t_steps must be non-negative");
  if (direction == Direction::backward && bc == BCVariant::robin_plus &&
      !cfg.boundary().lambda_zero())
    throw ContractError("the impedance semigroup cannot be run backward when lambda != 0");
  if (t_steps == 0) return state;

  const Grid2D &g = cfg.grid();
  const double sgn = direction == Direction::backward ? -1.0 : 1.0;
  const int rsign = bc == BCVariant::robin_plus ? 1 : 0;
  LeapfrogKernel kern(cfg);
  detail::Levels lv(g.size());
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) v[k] = sgn * state.ut[k];
  lv.now = state.u.data();
  kern.start(lv.now, v, lv.next, rsign, {});
  lv.rotate();
  for (int n = 1; n <= t_steps; ++n) {
    kern.step(lv.prev, lv.now, lv.next, rsign, {});
    if (n < t_steps) lv.rotate();
  }
  // t_steps == 1: prev = u^0, now = u^1, next = u^2
  ScalarField ut(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    ut[k] = sgn * (lv.next[k] - lv.prev[k]) / (2.0 * cfg.dt());
  return CauchyPair(ScalarField(g, lv.now), std::move(ut));
}

} // namespace epat
