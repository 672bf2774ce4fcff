// Values frozen from tests/oracles/oracle.py, an independent dense-matrix
// implementation of the same discretisation.

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "epat/epat.hpp"

using namespace epat;

namespace {

constexpr double kTight = 1e-12;

struct SmallRun {
  Grid2D g = Grid2D::covering(6, 5, 1.0, 0.8);
  MediumParams med{ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.3 * x * y; }),
                   ScalarField::sample(g, [](double x, double) { return 0.2 * x; })};
  std::shared_ptr<const BoundarySpec> bnd = std::make_shared<const BoundarySpec>(
      BoundarySpec::from_profiles(g, BoundaryProfile::faces({Face::bottom, Face::right}, 0.7)));
  WaveRunConfig cfg{med, bnd, TimeAxis(0.05, 12)};
};

const int kProbe[6][2] = {{0, 0}, {3, 0}, {5, 2}, {2, 4}, {0, 3}, {2, 2}};

void expect_rel(double got, double want, double tol = kTight) {
  EXPECT_NEAR(got, want, tol * std::max(1.0, std::abs(want)));
}

} // namespace

TEST(Oracle, InnerOmegaWithVariableSpeed) {
  const Grid2D g = Grid2D::covering(5, 5);
  const auto f = ScalarField::sample(g, [](double x, double y) { return std::sin(x + 2 * y); });
  const auto h = ScalarField::sample(g, [](double x, double y) { return std::cos(3 * x - y); });
  const MediumParams med(ScalarField::sample(g, [](double x, double y) { return 1 + 0.5 * x * y; }));
  expect_rel(inner_omega(f, h, med), 0.21750001043106784);
}

TEST(Oracle, InnerTraceOnRectangle) {
  const Grid2D g = Grid2D::covering(4, 5, 1.5, 2.0);
  const MediumParams med(ScalarField::sample(g, [](double x, double y) { return 1 + 0.1 * x + 0.2 * y; }));
  auto bnd = std::make_shared<const BoundarySpec>(BoundarySpec::from_profiles(g, BoundaryProfile::constant(1.0)));
  const TimeAxis t(0.1, 3);
  BoundaryTrace a(bnd, t), b(bnd, t);
  for (int k = 0; k <= 3; ++k)
    for (std::size_t n = 0; n < bnd->size(); ++n) {
      a(k, n) = std::sin(k + static_cast<double>(n));
      b(k, n) = std::cos(2.0 * k - static_cast<double>(n));
    }
  expect_rel(inner_trace(a, b, med), -0.030773627864236895);
}

TEST(Oracle, EnergyOfQuadraticState) {
  const Grid2D g = Grid2D::covering(6, 5, 1.0, 0.8);
  const MediumParams med(ScalarField::sample(g, [](double x, double) { return 1 + 0.2 * x; }),
                         ScalarField::sample(g, [](double, double y) { return 0.5 * y; }));
  CauchyPair s(ScalarField::sample(g, [](double x, double y) { return x * x * y; }),
               ScalarField::sample(g, [](double x, double y) { return x * y; }));
  expect_rel(energy(s, med), 0.23182457902010981);
}

TEST(Oracle, ForwardSolveWithPartialImpedance) {
  SmallRun r;
  auto u0 = ScalarField::sample(r.g, [](double x, double y) {
    return std::exp(-((x - 0.4) * (x - 0.4) + (y - 0.45) * (y - 0.45)) / 0.05);
  });
  ForwardOptions opts;
  opts.keep_snapshots = true;
  const Trajectory tr = forward_solve(u0, r.cfg, opts);
  const double want_nt[6] = {0.29088256340615465, 0.09769878085378797, 0.1474617572562823,
                             -0.17106629803811876, 0.27957501927008371, 0.21887453710786195};
  for (int p = 0; p < 6; ++p) expect_rel(tr.snapshots[12](kProbe[p][0], kProbe[p][1]), want_nt[p]);
  const double want_k5[6] = {0.051300428619077687, 0.12791928973775871, 0.19646492644642211,
                             0.12704093090799248,  0.037513708345978551, 0.0068606550931627156};
  for (std::size_t b = 0; b < 6; ++b) expect_rel(tr.trace(5, b), want_k5[b]);
}

TEST(Oracle, ControlSolve) {
  SmallRun r;
  BoundaryTrace zeta(r.bnd, r.cfg.times);
  for (int k = 0; k <= 12; ++k)
    for (std::size_t b = 0; b < r.bnd->size(); ++b)
      if (r.bnd->in_gamma(b)) zeta(k, b) = std::sin(0.3 * k + static_cast<double>(b));
  const ScalarField v = solution_op(zeta, r.cfg);
  const double want[6] = {-0.9079474723001576, 0.72388260120636294, -0.94698330896146043,
                          0.13503146965780366, 0.18653999798257145, 0.078517038991366556};
  for (int p = 0; p < 6; ++p) expect_rel(v(kProbe[p][0], kProbe[p][1]), want[p]);
}

TEST(Oracle, ExactAdjointMatchesDenseTranspose) {
  SmallRun r;
  const auto z = ScalarField::sample(r.g, [](double x, double y) { return std::cos(2 * x - y) * x * (1 - x); });
  const BoundaryTrace s = solution_op_adjoint(z, r.cfg);
  const double k0[6] = {0.096967671425396085, 0.075256591014570481, 0.020933263632966277,
                        0.042039739433772323, 0.075669599950154473, 0.076513098846809971};
  const double k7[6] = {0.057123901898922365, 0.05040737757435184, 0.069923263925249224,
                        0.066031173448884123, 0.04491450871075154,  0.011281128368025197};
  const double knt[6] = {0, 0.12542107152379717, 0.14230605127091042, 0.07401349878672478,
                         -0.0039761051644308168, 0};
  for (std::size_t b = 0; b < 6; ++b) {
    expect_rel(s(0, b), k0[b], 1e-10);
    expect_rel(s(7, b), k7[b], 1e-10);
    EXPECT_NEAR(s(12, b), knt[b], 1e-10);
  }
}

TEST(Oracle, BackProjection) {
  SmallRun r;
  BoundaryTrace d(r.bnd, r.cfg.times);
  const double nb = static_cast<double>(r.bnd->size());
  for (int k = 0; k <= 12; ++k)
    for (std::size_t b = 0; b < r.bnd->size(); ++b)
      if (r.bnd->in_gamma(b)) d(k, b) = std::cos(0.2 * k) * (static_cast<double>(b) + 1) / nb;
  const ScalarField v = backproject(d, r.cfg);
  const double want[6] = {0.16744854348827631, 0.44888866125902493, 0.82168287016913932,
                          0.11374095936961384, 0.0091681475350783165, 0.12400495732719964};
  for (int p = 0; p < 6; ++p) expect_rel(v(kProbe[p][0], kProbe[p][1]), want[p]);
}

TEST(Oracle, BilliardTauForRightFace) {
  const Grid2D g = Grid2D::covering(33, 33);
  const BoundarySpec bnd = BoundarySpec::from_profiles(g, BoundaryProfile::faces({Face::right}, 1.0));
  const MediumSpec med = MediumSpec::constant(1.0).on(g);
  DirectionFan fan;
  fan.kind = DirectionFan::Kind::horizontal;
  fan.half_angle_deg = 10.0;
  const RayReport rep = estimate_tau(med, bnd, 20, 42, 10.0, 1e-3, fan);
  ASSERT_TRUE(rep.summary.tau_hat.has_value());
  EXPECT_NEAR(*rep.summary.tau_hat, 2.0054675584743467, 1e-6);
}
