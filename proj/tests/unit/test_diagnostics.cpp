#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chemohapto/diagnostics.hpp"
#include "chemohapto/error.hpp"
#include "chemohapto/solver.hpp"
#include "chemohapto/verify.hpp"

using namespace chemohapto;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

Field2D smooth_positive(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const double a = d(rng), b = d(rng), c = d(rng);
  return Field2D::from_function(g, [&](double x, double y) {
    return 1.5 + a * std::cos(kPi * x) + 0.3 * b * std::cos(2 * kPi * y) + 0.2 * c * std::cos(kPi * x) * std::cos(kPi * y);
  });
}

}  // namespace

TEST(Entropy, Values) {
  EXPECT_EQ(entropy(Field2D(Grid(8, 8), 1.0)), 0.0);
  EXPECT_NEAR(entropy(Field2D(Grid(8, 8), kE)), kE, 1e-13);
  // Half the unit square at 2, the other half empty.
  Field2D u(Grid(4, 4));
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 2; ++i) u(i, j) = 2.0;
  EXPECT_NEAR(entropy(u), 0.5 * 2.0 * std::log(2.0), 1e-14);
}

TEST(Entropy, LowerBound) {
  const Grid g(16, 16);
  for (double c : {1e-6, 0.1, 1.0 / kE, 0.9}) EXPECT_GE(entropy(Field2D(g, c)), -g.area() / kE - 1e-15);
}

TEST(GFunctional, Values) {
  const Grid g(8, 8, 2.0, 1.0);
  EXPECT_NEAR(g_functional(Field2D(g, 0.0), 1), kE * 2.0, 1e-13);
  EXPECT_NEAR(g_functional(Field2D(g, 0.0), 2), std::exp(kE) * 2.0, 1e-12);
  EXPECT_NEAR(g_functional(Field2D(g, kE * kE - kE), 1), 2.0 * kE * kE * 2.0, 1e-12);
  EXPECT_GE(g_functional(Field2D(g, 3.0), 3), g.area() * e_tower(3));
  EXPECT_THROW(g_functional(Field2D(g, 0.0), 4), Error);
}

TEST(Identity, StationaryStateHasNoResidual) {
  ModelParams p;
  p.grid = Grid(16, 16);
  p.kinetics = KineticSpec::logistic(1.0);
  p.tau = 1.0;
  State s;
  s.u = Field2D(p.grid, 1.0);
  s.v = Field2D(p.grid, 1.0);
  s.w = Field2D(p.grid, 0.0);
  EXPECT_LE(energy_identity_residual(s, s, p, 1e-3), 1e-10);
  EXPECT_LE(identity_terms(iterlog_kernel(1), s, s, p, 1e-3).residual(), 1e-10);
}

TEST(Identity, KernelDerivatives) {
  const IdentityKernel k = iterlog_kernel(2);
  EXPECT_DOUBLE_EQ(k.k, std::exp(kE));
  EXPECT_NEAR(k.h(0.0), 1.0, 1e-15);
  const double u = 3.0, step = 1e-5;
  EXPECT_NEAR(k.dh(u), (k.h(u + step) - k.h(u - step)) / (2 * step), 1e-8);
  EXPECT_NEAR(k.d2h(u), (k.dh(u + step) - k.dh(u - step)) / (2 * step), 1e-8);
  const IdentityKernel l = log_kernel();
  EXPECT_EQ(l.k, 0.0);
  EXPECT_NEAR(l.dh(2.0), 0.5, 1e-15);
}

TEST(Identity, ResidualConvergesUnderRefinement) {
  const ConvergenceStudy s = identity_convergence({16, 32, 64}, 0);
  EXPECT_TRUE(s.decreasing());
  EXPECT_GE(s.min_order(), 0.9);
}

TEST(DeltaW, ConstantMatrix) {
  ModelParams p;
  p.grid = Grid(16, 16);
  p.tau = 1.0;
  State s;
  s.u = Field2D(p.grid, 1.0);
  s.v = Field2D(p.grid, 1.0);
  s.w = Field2D(p.grid, 0.5);
  DerivedConstants d;
  d.kappa = 0.3;
  d.w0_max = 0.5;
  EXPECT_NEAR(delta_w_bound_check(s, d, p), -0.5 - 0.3, 1e-14);
}

TEST(DeltaW, InitialDataWithinKappa) {
  ModelParams p;
  p.grid = Grid(64, 64);
  p.tau = 0.0;
  InitialData ic;
  ic.u0 = Field2D(p.grid, 1.0);
  ic.v0 = Field2D(p.grid, 0.0);
  ic.w0 = Field2D::from_function(p.grid, [](double x, double y) {
    return 0.5 + 0.25 * std::cos(kPi * x) * std::cos(kPi * y);
  });
  ic.validate(p);
  const DerivedConstants d = derive_constants(p, ic);
  State s;
  s.u = ic.u0;
  s.v = ic.v0;
  s.w = ic.w0;
  EXPECT_LE(delta_w_bound_check(s, d, p), 0.0);
}

TEST(DeltaW, RefinementStaysNegativeOrShrinks) {
  const ConvergenceStudy s = delta_w_refinement({32, 64, 128});
  const bool negative = *std::max_element(s.error.begin(), s.error.end()) <= 0.0;
  EXPECT_TRUE(negative || s.decreasing());
}

TEST(Gn, ConstantFloorAndInvariances) {
  const Grid g(32, 32, 2.0, 1.0);
  const GnEstimate e = gn_estimate(g, 4, 2, 2);
  EXPECT_DOUBLE_EQ(e.constant_floor, std::pow(2.0, 0.25 - 0.5));
  EXPECT_GE(e.value, e.constant_floor);
  EXPECT_DOUBLE_EQ(e.delta, 0.5);
  EXPECT_NEAR(gn_ratio(Field2D(g, 3.0), 4, 2, 2), e.constant_floor, 1e-14);

  const Field2D phi = smooth_positive(g, 5);
  EXPECT_NEAR(gn_ratio(7.5 * phi, 4, 2, 2), gn_ratio(phi, 4, 2, 2), 1e-13);
  EXPECT_NEAR(gn_ratio(reflect_x(phi), 4, 2, 2), gn_ratio(phi, 4, 2, 2), 1e-13);
  EXPECT_NEAR(gn_ratio(reflect_y(phi), 4, 2, 2), gn_ratio(phi, 4, 2, 2), 1e-13);

  const Grid sq(32, 32);
  EXPECT_NEAR(gn_constant_estimate(sq, 4, 2, 2), gn_constant_estimate(sq.transposed(), 4, 2, 2), 1e-12);
  EXPECT_THROW(gn_estimate(sq, 2, 3, 1), InvalidInput);
}

TEST(Gn, LargerFamilyNeverLowersBound) {
  const Grid g(32, 32);
  const GnEstimate e = gn_estimate(g, 3, 1, 1);
  EXPECT_GE(e.value, e.constant_floor);
  const Field2D corner = Field2D::from_function(g, [](double x, double y) {
    return std::exp(-(x * x + y * y) / (2 * 0.05 * 0.05));
  });
  EXPECT_GE(e.value, gn_ratio(corner, 3, 1, 1));
}

TEST(AlphaCutoff, Pieces) {
  EXPECT_EQ(alpha_cutoff(0.5, 1.0), 0.0);
  EXPECT_EQ(alpha_cutoff(-1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(alpha_cutoff(1.5, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(alpha_cutoff(-1.75, 1.0), 1.5);
  EXPECT_EQ(alpha_cutoff(3.0, 1.0), 3.0);
}

TEST(LogGn, ConstantsAndChecks) {
  const Grid g(32, 32);
  const LogGnConstants c = log_gn_constants(g, 1, 3.0, 1.0, 0.1);
  EXPECT_GT(c.log_lambda, 0.0);
  EXPECT_DOUBLE_EQ(c.C, 8.0 * c.C1);

  const LogGnResult flat = log_gn_check(Field2D(g, 0.5), 1, 3.0, 1.0, 0.1, c);
  EXPECT_TRUE(flat.holds);
  EXPECT_EQ(flat.eps_term, 0.0);

  const Field2D eig = Field2D::from_function(g, [](double x, double y) {
    return 50.0 * (1.0 + std::cos(kPi * x) * std::cos(kPi * y));
  });
  EXPECT_TRUE(log_gn_check(eig, 1, 3.0, 1.0, 0.1).holds);
  EXPECT_THROW(log_gn_constants(g, 1, 3.0, 4.0, 0.1), InvalidInput);
}

TEST(LogGn, RandomFields) {
  for (int m : {1, 2}) EXPECT_EQ(log_gn_failures(Grid(32, 32), m, 3.0, 1.0, 0.1, 50, 17), 0) << m;
}

TEST(Record, HomogeneousValues) {
  ModelParams p;
  p.grid = Grid(8, 8);
  State s;
  s.u = Field2D(p.grid, 2.0);
  s.v = Field2D(p.grid, 2.0);
  s.w = Field2D(p.grid, 0.0);
  s.t = 1.5;
  const DiagnosticsRecord r = make_record(s, p, DerivedConstants{}, 1);
  EXPECT_EQ(r.t, 1.5);
  EXPECT_NEAR(r.mass, 2.0, 1e-14);
  EXPECT_NEAR(r.l2_u, 2.0, 1e-14);
  EXPECT_EQ(r.linf_u, 2.0);
  EXPECT_NEAR(r.entropy, 2.0 * std::log(2.0), 1e-14);
  EXPECT_EQ(r.grad_v_l4, 0.0);
  EXPECT_EQ(r.linf_grad_w, 0.0);
}
