#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "epat/norms.hpp"
#include "epat/wave_engine.hpp"

namespace epat {

/// Type-erased linear map with an optional adjoint.
template <class Domain, class Codomain> struct LinearMap {
  std::string name;
  std::function<Codomain(const Domain &)> apply;
  std::function<Domain(const Codomain &)> adjoint;

  Codomain operator()(const Domain &x) const { return apply(x); }
  bool has_adjoint() const { return static_cast<bool>(adjoint); }
};

using FieldMap = LinearMap<ScalarField, ScalarField>;
using TraceMap = LinearMap<BoundaryTrace, BoundaryTrace>;

/// S S*: H0(Omega) -> H0(Omega).
inline ScalarField normal_op(const ScalarField &phi, const WaveRunConfig &cfg) {
  return solution_op(solution_op_adjoint(phi, cfg), cfg);
}

/// K = Id - A Lambda.
inline ScalarField error_op(const ScalarField &u0, const WaveRunConfig &cfg) {
  ScalarField out = u0;
  out -= backproject(measure(u0, cfg), cfg);
  return out;
}

/// K through the semigroups: first component of S_N(-tau) S_R(tau) (u0, 0).
inline ScalarField error_op_factored(const ScalarField &u0, const WaveRunConfig &cfg) {
  CauchyPair s = evolve_cauchy(CauchyPair::lift(u0), cfg.nt(), BCVariant::robin_plus,
                               Direction::forward, cfg);
  return evolve_cauchy(s, cfg.nt(), BCVariant::pure_neumann, Direction::backward, cfg).u;
}

/// Multiplies a trace by c^2 at each boundary node. This is the Riesz map
/// from the unweighted boundary pairing to inner_trace.
inline BoundaryTrace scale_by_c2(BoundaryTrace tr, const MediumParams &med) {
  const BoundarySpec &bnd = tr.boundary();
  for (std::size_t b = 0; b < bnd.size(); ++b) {
    const double c = med.c()[bnd.node(b).index];
    for (int k = 0; k <= tr.nt(); ++k) tr(k, b) *= c * c;
  }
  return tr;
}

/// b = S U d, right-hand side of the normal equations. The data are paired
/// with controls through the unweighted boundary integral, so U d is mapped
/// into the c^-2 weighted trace space first (a no-op where c = 1 on the
/// boundary).
inline ScalarField rhs_method1(const BoundaryTrace &d, const WaveRunConfig &cfg) {
  return solution_op(scale_by_c2(time_reverse(d), cfg.med), cfg);
}

inline LinearMap<ScalarField, BoundaryTrace> measurement_map(const WaveRunConfig &cfg) {
  return {"Lambda", [cfg](const ScalarField &u) { return measure(u, cfg); }, {}};
}
inline LinearMap<BoundaryTrace, ScalarField> solution_map(const WaveRunConfig &cfg) {
  return {"S", [cfg](const BoundaryTrace &z) { return solution_op(z, cfg); },
          [cfg](const ScalarField &f) { return solution_op_adjoint(f, cfg); }};
}
inline LinearMap<BoundaryTrace, ScalarField> backprojection_map(const WaveRunConfig &cfg) {
  return {"A", [cfg](const BoundaryTrace &d) { return backproject(d, cfg); }, {}};
}
inline FieldMap normal_map(const WaveRunConfig &cfg) {
  auto f = [cfg](const ScalarField &x) { return normal_op(x, cfg); };
  return {"SS*", f, f};
}
inline FieldMap error_map(const WaveRunConfig &cfg) {
  return {"K", [cfg](const ScalarField &x) { return error_op(x, cfg); }, {}};
}
inline TraceMap time_reversal_map() {
  auto f = [](const BoundaryTrace &t) { return time_reverse(t); };
  return {"U", f, f};
}

/// Grid-independent smooth random data, used to probe the adjoint pair.
class SmoothRandomData {
public:
  explicit SmoothRandomData(std::uint64_t seed) : rng_(seed) {}

  /// Sum of three Gaussian bumps with random centres, widths and signs,
  /// windowed by sin^2 so the field and its normal derivative vanish on the
  /// boundary.
  ScalarField field(const Grid2D &g) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    struct Bump { double x, y, s, a; };
    std::vector<Bump> bumps;
    for (int m = 0; m < 3; ++m)
      bumps.push_back({g.x0 + (0.2 + 0.6 * u(rng_)) * g.lx(), g.y0 + (0.2 + 0.6 * u(rng_)) * g.ly(),
                       (0.1 + 0.15 * u(rng_)) * std::min(g.lx(), g.ly()), 2.0 * u(rng_) - 1.0});
    return ScalarField::sample(g, [&](double x, double y) {
      double v = 0.0;
      for (const Bump &b : bumps)
        v += b.a * std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (b.s * b.s));
      constexpr double pi = 3.141592653589793;
      const double wx = std::sin(pi * (x - g.x0) / g.lx()), wy = std::sin(pi * (y - g.y0) / g.ly());
      return v * wx * wx * wy * wy;
    });
  }

  /// Low-order trigonometric polynomial in (t / tau, arc length / perimeter),
  /// zeroed outside the observed set.
  BoundaryTrace trace(const WaveRunConfig &cfg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double coef[3][3][2];
    for (auto &a : coef)
      for (auto &b : a)
        for (double &c : b) c = u(rng_);
    const BoundarySpec &bnd = cfg.boundary();
    std::vector<double> arc(bnd.size());
    double acc = 0.0;
    for (std::size_t b = 0; b < bnd.size(); ++b) {
      arc[b] = acc;
      acc += bnd.node(b).ds;
    }
    const double perim = acc, tau = cfg.tau();
    BoundaryTrace out(cfg.bnd, cfg.times);
    constexpr double two_pi = 6.283185307179586;
    for (int k = 0; k <= cfg.nt(); ++k) {
      const double t = k * cfg.dt() / tau;
      for (std::size_t b = 0; b < bnd.size(); ++b) {
        if (!bnd.in_gamma(b)) continue;
        const double s = arc[b] / perim;
        double v = 0.0;
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q)
            v += std::cos(two_pi * p * t) *
                 (coef[p][q][0] * std::cos(two_pi * q * s) + coef[p][q][1] * std::sin(two_pi * q * s));
        out(k, b) = v;
      }
    }
    return out;
  }

private:
  std::mt19937_64 rng_;
};

struct AdjointCheckRow {
  int trial = 0;
  AdjointMode mode = AdjointMode::exact_discrete;
  double defect = 0.0;
};

struct AdjointCheckReport {
  std::vector<AdjointCheckRow> rows;
  double max_exact = 0.0;
  double max_pde = 0.0;
};

inline const char *mode_name(AdjointMode m) {
  return m == AdjointMode::exact_discrete ? "exact" : "pde";
}

/// |<S zeta, phi> - <zeta, S* phi>| / (|zeta| |phi|) for seeded smooth random
/// pairs, in both adjoint modes.
inline AdjointCheckReport adjoint_check(const WaveRunConfig &cfg, int n_trials, std::uint64_t seed) {
  detail::require<ContractError>(n_trials >= 1, "adjoint_check needs at least one trial");
  cfg.validate();
  AdjointCheckReport rep;
  SmoothRandomData gen(seed);
  for (int t = 0; t < n_trials; ++t) {
    const BoundaryTrace zeta = gen.trace(cfg);
    const ScalarField phi = gen.field(cfg.grid());
    const double lhs = inner_omega(solution_op(zeta, cfg), phi, cfg.med);
    const double scale = norm_trace(zeta, cfg.med) * norm_omega(phi, cfg.med);
    for (AdjointMode m : {AdjointMode::exact_discrete, AdjointMode::pde_faithful}) {
      const double rhs = inner_trace(zeta, solution_op_adjoint(phi, cfg.with_mode(m)), cfg.med);
      const double defect = scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
      rep.rows.push_back({t, m, defect});
      double &mx = m == AdjointMode::exact_discrete ? rep.max_exact : rep.max_pde;
      mx = std::max(mx, defect);
    }
  }
  return rep;
}

} // namespace epat
