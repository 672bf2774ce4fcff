// Synthetic closed-loop run: data from a finer grid, reconstruction by both
// methods, errors printed per iteration count.

#include <cstdio>

#include "epat/epat.hpp"

int main(int argc, char **argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 65;
  epat::RunSetup setup;
  setup.medium = epat::MediumSpec::lens(1.0, 0.2, 0.15);
  setup.lambda = epat::BoundaryProfile::constant(1.0);

  const auto grid = epat::Grid2D::covering(n, n);
  const auto bnd = setup.boundary(grid);
  const auto rays = epat::estimate_tau(setup.medium.on(grid), *bnd, 12, 24, 10.0, 2e-3);
  const double tau = 1.5 * rays.summary.tau_hat.value();
  std::printf("tau_hat = %.4f, tau = %.4f\n", *rays.summary.tau_hat, tau);

  const auto cfg = setup.config(grid, tau);
  const auto fine = setup.refined(cfg, 2);
  epat::PhantomSpec ph;
  ph.blobs = {{0.42, 0.55, 0.05, 1.0}, {0.6, 0.4, 0.035, 0.7}};
  const auto u0 = epat::make_phantom(ph, grid);
  const auto d = epat::measure_refined(epat::make_phantom(ph, fine.grid()), cfg, fine);

  auto rel = [&](const epat::ScalarField &x) {
    return epat::norm_omega(x - u0, cfg.med) / epat::norm_omega(u0, cfg.med);
  };
  epat::CGOptions co;
  co.max_iters = 50;
  co.rel_tol = 1e-6;
  const auto cg = epat::reconstruct_cg(d, cfg, co);
  std::printf("cg:      %3d iterations, error %.4f\n", cg.iterations, rel(cg.estimate));

  epat::NeumannOptions no;
  no.max_terms = 40;
  no.rel_tol = 1e-6;
  const auto neu = epat::reconstruct_neumann(d, cfg, no);
  std::printf("neumann: %3d terms, error %.4f, last ratio %.3f\n", neu.iterations, rel(neu.estimate), neu.rate);
  epat::io::save_pgm("closed_loop_cg.pgm", cg.estimate);
  return 0;
}
