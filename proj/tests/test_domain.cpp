#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "epat/epat.hpp"

using namespace epat;

namespace {

ScalarField random_field(const Grid2D &g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (double &v : f.data()) v = u(rng);
  return f;
}

std::shared_ptr<const BoundarySpec> full_boundary(const Grid2D &g, double lambda = 1.0) {
  return std::make_shared<const BoundarySpec>(BoundarySpec::from_profiles(g, BoundaryProfile::constant(lambda)));
}

} // namespace

TEST(Grid, RejectsDegenerateShapes) {
  EXPECT_THROW(Grid2D(2, 5, 0.1, 0.1), ConfigError);
  EXPECT_THROW(Grid2D(5, 5, 0.0, 0.1), ConfigError);
  EXPECT_THROW(Grid2D(5, 5, 0.1, -1.0), ConfigError);
  EXPECT_NO_THROW(Grid2D(3, 3, 0.5, 0.5));
}

TEST(Grid, TrapezoidWeightsIntegrateArea) {
  const Grid2D g = Grid2D::covering(7, 4, 2.0, 0.75);
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s += g.trapezoid_weight(i, j);
  EXPECT_NEAR(s * g.hx * g.hy, 1.5, 1e-14);
  EXPECT_DOUBLE_EQ(g.trapezoid_weight(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(g.trapezoid_weight(3, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.trapezoid_weight(3, 2), 1.0);
}

TEST(Grid, FieldSizeIsChecked) {
  const Grid2D g = Grid2D::covering(4, 4);
  EXPECT_THROW(ScalarField(g, std::vector<double>(15)), DimensionError);
}

TEST(Boundary, CounterClockwiseEnumeration) {
  const Grid2D g = Grid2D::covering(5, 4, 1.0, 0.6);
  const auto nodes = enumerate_boundary(g);
  ASSERT_EQ(nodes.size(), 2u * (5 + 4) - 4);
  EXPECT_EQ(nodes[0].i, 0);
  EXPECT_EQ(nodes[0].j, 0);
  EXPECT_EQ(nodes[4].i, 4);
  EXPECT_EQ(nodes[4].j, 0);
  EXPECT_EQ(nodes[7].i, 4);
  EXPECT_EQ(nodes[7].j, 3);
  EXPECT_EQ(nodes[8].i, 3);
  EXPECT_EQ(nodes[8].j, 3);
  EXPECT_EQ(nodes.back().i, 0);
  EXPECT_EQ(nodes.back().j, 1);
  for (std::size_t b = 0; b < nodes.size(); ++b) EXPECT_EQ(nodes[b].index, g.index(nodes[b].i, nodes[b].j));
}

TEST(Boundary, ArcWeightsAndGhostFactors) {
  const Grid2D g = Grid2D::covering(6, 5, 1.0, 0.8);
  const BoundarySpec bnd = BoundarySpec::from_profiles(g, BoundaryProfile::constant(1.0));
  EXPECT_NEAR(bnd.perimeter(), 3.6, 1e-14);
  for (const BoundaryNode &n : bnd.nodes()) {
    // ghost * trapezoid area equals the arc weight, the identity behind the
    // boundary quadrature of the scheme.
    EXPECT_NEAR(n.ghost * g.trapezoid_weight(n.i, n.j) * g.hx * g.hy, n.ds, 1e-14);
    if (n.is_corner()) {
      EXPECT_NEAR(n.ds, 0.5 * (g.hx + g.hy), 1e-15);
    }
  }
}

TEST(Boundary, ProfileLanguage) {
  const Grid2D g = Grid2D::covering(11, 11);
  const auto bnd = BoundarySpec::from_profiles(g, BoundaryProfile::parse("faces:right,top:0.5+arc:left,0,0.5:2"));
  EXPECT_DOUBLE_EQ(bnd.lambda(bnd.slot_of(10, 5)), 0.5);
  EXPECT_DOUBLE_EQ(bnd.lambda(bnd.slot_of(5, 10)), 0.5);
  EXPECT_DOUBLE_EQ(bnd.lambda(bnd.slot_of(0, 3)), 2.0);
  EXPECT_DOUBLE_EQ(bnd.lambda(bnd.slot_of(0, 8)), 0.0);
  EXPECT_DOUBLE_EQ(bnd.lambda(bnd.slot_of(5, 0)), 0.0);
  EXPECT_TRUE(bnd.gamma_is_support_of_lambda());
  EXPECT_TRUE(BoundarySpec::from_profiles(g, BoundaryProfile::parse("none")).lambda_zero());
  EXPECT_THROW(BoundaryProfile::parse("faces:north:1"), Error);
  EXPECT_THROW(BoundaryProfile::parse("arc:left,0.6,0.2:1"), FormatError);
  EXPECT_THROW(BoundaryProfile::parse("full:-1"), FormatError);
  EXPECT_THROW(BoundaryProfile::parse("everywhere"), FormatError);
}

TEST(Boundary, ObservedSetContainsImpedanceSupport) {
  const Grid2D g = Grid2D::covering(4, 4);
  std::vector<double> lam(12, 0.0);
  lam[3] = 1.0;
  std::vector<std::uint8_t> gam(12, 0);
  EXPECT_THROW(BoundarySpec(g, lam, gam), ContractError);
  gam[3] = 1;
  EXPECT_NO_THROW(BoundarySpec(g, lam, gam));
  lam[2] = -0.1;
  EXPECT_THROW(BoundarySpec(g, lam), ContractError);
  EXPECT_THROW(BoundarySpec(g, std::vector<double>(11, 0.0)), DimensionError);
}

TEST(Boundary, ExtraObservedArcs) {
  const Grid2D g = Grid2D::covering(9, 9);
  const auto bnd = BoundarySpec::from_profiles(g, BoundaryProfile::parse("faces:bottom:1"),
                                               BoundaryProfile::parse("faces:top:1"));
  EXPECT_TRUE(bnd.in_gamma(bnd.slot_of(4, 8)));
  EXPECT_DOUBLE_EQ(bnd.lambda(bnd.slot_of(4, 8)), 0.0);
  EXPECT_FALSE(bnd.in_gamma(bnd.slot_of(0, 4)));
  EXPECT_FALSE(bnd.gamma_is_support_of_lambda());
}

TEST(Medium, RejectsNonPhysicalCoefficients) {
  const Grid2D g = Grid2D::covering(4, 4);
  EXPECT_THROW(MediumParams(ScalarField(g, 0.0)), ContractError);
  EXPECT_THROW(MediumParams(ScalarField(g, 1.0), ScalarField(g, -0.5)), ContractError);
  ScalarField c(g, 1.0);
  c[5] = std::nan("");
  EXPECT_THROW(MediumParams{c}, ContractError);
}

TEST(InnerOmega, ClosedForms) {
  const Grid2D g = Grid2D::covering(3, 3);
  const auto med = MediumParams::uniform(g);
  EXPECT_EQ(inner_omega(ScalarField(g), ScalarField(g), med), 0.0);
  EXPECT_NEAR(inner_omega(ScalarField(g, 1.0), ScalarField(g, 1.0), med), 1.0, 1e-15);
}

TEST(InnerOmega, MatchesBruteForceQuadrature) {
  const Grid2D g = Grid2D::covering(5, 5);
  const MediumParams med(ScalarField::sample(g, [](double x, double y) { return 1.0 + x + 0.5 * y; }));
  const auto f = random_field(g, 1), h = random_field(g, 2);
  double want = 0.0;
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) {
      const double wi = (i == 0 || i == 4) ? 0.5 : 1.0, wj = (j == 0 || j == 4) ? 0.5 : 1.0;
      const double c = med.c()(i, j);
      want += f(i, j) * h(i, j) / (c * c) * wi * wj * g.hx * g.hy;
    }
  EXPECT_NEAR(inner_omega(f, h, med), want, 1e-14);
  EXPECT_NEAR(inner_omega(f, h, med), inner_omega(h, f, med), 1e-15);
  EXPECT_GT(inner_omega(f, f, med), 0.0);
}

TEST(InnerOmega, GridMismatch) {
  const Grid2D a = Grid2D::covering(4, 4), b = Grid2D::covering(5, 4);
  EXPECT_THROW(inner_omega(ScalarField(a), ScalarField(b), MediumParams::uniform(a)), DimensionError);
}

TEST(InnerTrace, UnitPerimeterUnitWindow) {
  const Grid2D g = Grid2D::covering(6, 6, 0.25, 0.25);
  const auto bnd = full_boundary(g);
  const auto med = MediumParams::uniform(g);
  const TimeAxis t(0.1, 10);
  BoundaryTrace one(bnd, t);
  for (double &v : one.data()) v = 1.0;
  EXPECT_NEAR(inner_trace(one, one, med), 1.0, 1e-14);
  EXPECT_EQ(inner_trace(BoundaryTrace(bnd, t), BoundaryTrace(bnd, t), med), 0.0);
}

TEST(InnerTrace, MatchesBruteForceQuadrature) {
  const Grid2D g = Grid2D::covering(5, 4, 1.0, 0.6);
  const auto bnd = full_boundary(g);
  const MediumParams med(ScalarField::sample(g, [](double x, double y) { return 1.2 + x * y; }));
  const TimeAxis t(0.05, 7);
  BoundaryTrace a(bnd, t), b(bnd, t);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double &v : a.data()) v = u(rng);
  for (double &v : b.data()) v = u(rng);
  double want = 0.0;
  for (int k = 0; k <= 7; ++k)
    for (std::size_t n = 0; n < bnd->size(); ++n) {
      const double c = med.c()[bnd->node(n).index];
      want += a(k, n) * b(k, n) / (c * c) * bnd->node(n).ds * t.dt * ((k == 0 || k == 7) ? 0.5 : 1.0);
    }
  EXPECT_NEAR(inner_trace(a, b, med), want, 1e-14);
  EXPECT_NEAR(inner_trace(a, b, med), inner_trace(b, a, med), 1e-15);
}

TEST(InnerTrace, AxisMismatch) {
  const Grid2D g = Grid2D::covering(4, 4);
  const auto bnd = full_boundary(g);
  EXPECT_THROW(inner_trace(BoundaryTrace(bnd, TimeAxis(0.1, 3)), BoundaryTrace(bnd, TimeAxis(0.1, 4)),
                           MediumParams::uniform(g)),
               DimensionError);
}

TEST(Energy, ClosedForms) {
  const Grid2D g = Grid2D::covering(9, 9);
  const auto med1 = MediumParams::uniform(g);
  EXPECT_EQ(energy(CauchyPair(ScalarField(g), ScalarField(g)), med1), 0.0);
  EXPECT_NEAR(energy(CauchyPair(ScalarField(g, 1.0), ScalarField(g)), med1), 0.0, 1e-15);
  const auto med2 = MediumParams::uniform(g, 2.0);
  EXPECT_NEAR(energy(CauchyPair(ScalarField(g), ScalarField(g, 1.0)), med2), 0.125, 1e-15);
}

TEST(Energy, SplitsIntoDirichletAndKineticParts) {
  const Grid2D g = Grid2D::covering(12, 10, 1.0, 0.8);
  const MediumParams med(ScalarField::sample(g, [](double x, double) { return 1 + 0.3 * x; }),
                         ScalarField::sample(g, [](double, double y) { return y; }));
  const auto u = random_field(g, 4), ut = random_field(g, 5);
  const double hr = hr_norm(u, med);
  EXPECT_NEAR(energy(CauchyPair(u, ut), med), hr * hr + 0.5 * inner_omega(ut, ut, med), 1e-13);
  EXPECT_GE(energy(CauchyPair(u, ut), med), 0.0);
}

TEST(Energy, GradientIsSecondOrderAtFaces) {
  // x^2 is reproduced exactly by the one-sided three-point formula.
  const Grid2D g = Grid2D::covering(7, 7);
  const auto u = ScalarField::sample(g, [](double x, double) { return x * x; });
  const double want = 0.5 * (4.0 / 3.0);
  const double got = hr_norm(u, MediumParams::uniform(g));
  // Trapezoid quadrature of (2x)^2 carries an O(h^2) error only.
  EXPECT_NEAR(got * got, want, 4.0 * g.hx * g.hx / 12.0 + 1e-14);
}

TEST(HrNorm, SeminormWithoutPotential) {
  const Grid2D g = Grid2D::covering(6, 6);
  EXPECT_EQ(hr_norm(ScalarField(g), MediumParams::uniform(g)), 0.0);
  EXPECT_NEAR(hr_norm(ScalarField(g, 3.0), MediumParams::uniform(g)), 0.0, 1e-15);
  EXPECT_GT(hr_norm(ScalarField(g, 3.0), MediumParams::uniform(g, 1.0, 1.0)), 0.0);
}

TEST(Compatibility, ShiftClosedFormAndIdempotence) {
  const Grid2D g = Grid2D::covering(8, 8);
  const auto bnd = full_boundary(g);
  const auto med = MediumParams::uniform(g);
  const CauchyPair one(ScalarField(g, 1.0), ScalarField(g));
  const CauchyPair s = compatibility_shift(one, *bnd, med);
  for (double v : s.u.data()) EXPECT_NEAR(v, 0.0, 1e-15);

  const MediumParams var(ScalarField::sample(g, [](double x, double y) { return 1 + 0.4 * x * y; }));
  const CauchyPair r(random_field(g, 6), random_field(g, 7));
  const CauchyPair once = compatibility_shift(r, *bnd, var);
  EXPECT_LT(std::abs(compatibility_functional(once, *bnd, var)), 1e-12);
  const CauchyPair twice = compatibility_shift(once, *bnd, var);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(twice.u[k], once.u[k], 1e-13);
    EXPECT_EQ(once.ut[k], r.ut[k]);
  }
}

TEST(Compatibility, CompatibleStateUnchanged) {
  const Grid2D g = Grid2D::covering(8, 8);
  const auto bnd = full_boundary(g);
  const auto med = MediumParams::uniform(g);
  const CauchyPair z(ScalarField::sample(g, [](double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); }),
                     ScalarField(g));
  const CauchyPair s = compatibility_shift(z, *bnd, med);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(s.u[k], z.u[k], 1e-14);
}

TEST(Compatibility, PreconditionsAreEnforced) {
  const Grid2D g = Grid2D::covering(5, 5);
  const CauchyPair s(ScalarField(g, 1.0), ScalarField(g));
  EXPECT_THROW(compatibility_shift(s, *full_boundary(g, 0.0), MediumParams::uniform(g)), DegenerateError);
  EXPECT_THROW(compatibility_shift(s, *full_boundary(g), MediumParams::uniform(g, 1.0, 0.5)), ContractError);
}

TEST(TimeAxis, CoveringDividesWindowEvenly) {
  const TimeAxis t = TimeAxis::covering(1.0, 0.3);
  EXPECT_EQ(t.nt, 4);
  EXPECT_NEAR(t.tau(), 1.0, 1e-15);
  EXPECT_THROW(TimeAxis(0.0, 3), ConfigError);
  EXPECT_THROW(TimeAxis(0.1, 0), ConfigError);
}

TEST(Trace, RestrictionToObservedSet) {
  const Grid2D g = Grid2D::covering(5, 5);
  auto bnd = std::make_shared<const BoundarySpec>(BoundarySpec::from_profiles(g, BoundaryProfile::parse("faces:left:1")));
  BoundaryTrace t(bnd, TimeAxis(0.1, 2));
  for (double &v : t.data()) v = 1.0;
  EXPECT_FALSE(t.gamma_supported());
  t.restrict_to_gamma();
  EXPECT_TRUE(t.gamma_supported());
  for (std::size_t b = 0; b < bnd->size(); ++b) EXPECT_EQ(t(1, b), bnd->in_gamma(b) ? 1.0 : 0.0);
}
