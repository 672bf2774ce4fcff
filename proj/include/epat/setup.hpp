#pragma once

#include <memory>

#include "epat/phantom.hpp"
#include "epat/wave_engine.hpp"

namespace epat {

/// Resolution-independent description of an experiment: medium, impedance
/// and observed set. Builds run configurations on any grid.
struct RunSetup {
  MediumSpec medium;
  BoundaryProfile lambda;
  /// Extra observed arcs; the observed set always contains {lambda > 0}.
  BoundaryProfile gamma;
  double cfl = 0.5;

  std::shared_ptr<const BoundarySpec> boundary(const Grid2D &g) const {
    return std::make_shared<const BoundarySpec>(BoundarySpec::from_profiles(g, lambda, gamma));
  }

  WaveRunConfig config(const Grid2D &g, double tau,
                       AdjointMode mode = AdjointMode::exact_discrete) const {
    return WaveRunConfig::for_tau(medium.sample(g), boundary(g), tau, cfl, mode);
  }

  /// The run of `coarse` on a grid with `factor` times as many cells per
  /// axis and a time step divided by `factor`, so every coarse sample has a
  /// coincident fine sample.
  WaveRunConfig refined(const WaveRunConfig &coarse, int factor) const {
    detail::require<ConfigError>(factor >= 1, "refinement factor must be >= 1");
    const Grid2D g = coarse.grid().refined(factor);
    return WaveRunConfig(medium.sample(g), boundary(g),
                         TimeAxis(coarse.dt() / factor, coarse.nt() * factor), coarse.cfl_factor,
                         coarse.adjoint_mode);
  }
};

/// Data for `coarse` generated on the finer run `fine` and sampled back.
inline BoundaryTrace measure_refined(const ScalarField &u0_fine, const WaveRunConfig &coarse,
                                     const WaveRunConfig &fine) {
  return restrict_trace(measure(u0_fine, fine), coarse.bnd, coarse.times);
}

} // namespace epat
