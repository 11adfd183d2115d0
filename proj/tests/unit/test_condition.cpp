#include <gtest/gtest.h>

#include <cmath>

#include "chemohapto/condition.hpp"
#include "chemohapto/error.hpp"

using namespace chemohapto;

namespace {

ModelParams params_for(double chi, double tau, KineticSpec k) {
  ModelParams p;
  p.chi = chi;
  p.xi = 1.0;
  p.tau = tau;
  p.kinetics = k;
  p.grid = Grid(32, 32);
  return p;
}

InitialData data_with_mass(const ModelParams& p, double mass) {
  InitialData ic;
  ic.u0 = Field2D(p.grid, mass / p.grid.area());
  ic.v0 = Field2D(p.grid, 0.0);
  ic.w0 = Field2D(p.grid, 0.5);
  ic.validate(p);
  return ic;
}

std::vector<DiagnosticsRecord> series(int n, double (*f)(double)) {
  std::vector<DiagnosticsRecord> r(n);
  for (int i = 0; i < n; ++i) {
    r[i].t = i;
    r[i].mass = r[i].l2_u = r[i].linf_u = f(i);
  }
  return r;
}

}  // namespace

TEST(CheckTheorem, IterLogTauZeroDamping) {
  const ModelParams p = params_for(3.0, 0.0, KineticSpec::iter_log(2, 1.0));
  const ThresholdReport t = check_theorem(p, data_with_mass(p, 10.0), 3);
  EXPECT_EQ(t.condition_case, ConditionCase::tau0_damping);
  ASSERT_EQ(t.mu_r_estimates.size(), 3u);
  EXPECT_NEAR(t.mu_r_estimates[1].value, 1.0, 0.05);
  EXPECT_TRUE(t.tau0_damping_holds);
}

TEST(CheckTheorem, LogisticThresholdTrivial) {
  const ModelParams p = params_for(5.0, 1.0, KineticSpec::logistic(1.0));
  const ThresholdReport t = check_theorem(p, data_with_mass(p, 100.0), 2);
  EXPECT_TRUE(t.mu1_infinite);
  EXPECT_EQ(t.threshold_lhs, 0.0);
  EXPECT_EQ(t.condition_case, ConditionCase::threshold_inequality);
  EXPECT_FALSE(t.tau0_damping_holds);
}

TEST(CheckTheorem, ZeroKineticsMassThreshold) {
  const ModelParams p = params_for(1.0, 1.0, KineticSpec::zero());
  const GnEstimate gn = gn_estimate(p.grid, 4, 2, 2);
  const double critical = 1.0 / (2.0 * std::pow(gn.value, 4));
  const ThresholdReport below = check_theorem(p, data_with_mass(p, 0.9 * critical), 1, gn);
  const ThresholdReport above = check_theorem(p, data_with_mass(p, 1.1 * critical), 1, gn);
  EXPECT_EQ(below.mu_r_estimates[0].value, 0.0);
  EXPECT_NEAR(below.M1, 0.9 * critical, 1e-12);
  EXPECT_NEAR(below.threshold_rhs, critical, 1e-12);
  EXPECT_EQ(below.condition_case, ConditionCase::threshold_inequality);
  EXPECT_EQ(above.condition_case, ConditionCase::not_satisfied);
  EXPECT_EQ(below.C_GN, gn.value);
  EXPECT_DOUBLE_EQ(below.C_GN4_bound, std::pow(gn.value, 4));
}

TEST(CheckTheorem, ShrinkingMassKeepsVerdict) {
  const ModelParams p = params_for(2.0, 1.0, KineticSpec::sub_log_pow(1.0, 1.0, 0.5));
  const GnEstimate gn = gn_estimate(p.grid, 4, 2, 2);
  bool seen_true = false;
  for (double m : {4.0, 1.0, 0.25, 0.05, 0.01}) {
    const bool holds = check_theorem(p, data_with_mass(p, m), 1, gn).threshold_inequality_holds;
    if (seen_true) {
      EXPECT_TRUE(holds) << m;
    }
    seen_true = seen_true || holds;
  }
}

TEST(CheckTheorem, M1AtLeastMass) {
  const ModelParams p = params_for(1.0, 1.0, KineticSpec::sub_log_log_log(2.0, 1.0));
  const ThresholdReport t = check_theorem(p, data_with_mass(p, 3.0), 1);
  EXPECT_GE(t.M1, t.u0_mass);
  EXPECT_NEAR(t.u0_mass, 3.0, 1e-12);
}

TEST(Plateau, Ratios) {
  const auto flat = series(20, [](double) { return 2.0; });
  EXPECT_EQ(plateau_ratio(flat, &DiagnosticsRecord::mass), 1.0);
  const auto ramp = series(21, [](double t) { return 1.0 + t; });
  EXPECT_NEAR(plateau_ratio(ramp, &DiagnosticsRecord::mass), 21.0 / 11.0, 1e-14);
  const auto zero = series(20, [](double) { return 0.0; });
  EXPECT_EQ(plateau_ratio(zero, &DiagnosticsRecord::mass), 1.0);
  const auto late = series(20, [](double t) { return t < 10 ? 0.0 : 1.0; });
  EXPECT_TRUE(std::isinf(plateau_ratio(late, &DiagnosticsRecord::mass)));
}

TEST(Plateau, TableNames) {
  const auto flat = series(20, [](double) { return 1.0; });
  std::vector<std::string> names;
  for (const PlateauEntry& e : plateau_table(flat, 0.0, 1.0)) names.push_back(e.name);
  EXPECT_EQ(names, (std::vector<std::string>{"mass", "g_m", "l2_u", "linf_u", "linf_grad_v", "linf_grad_w"}));
  names.clear();
  for (const PlateauEntry& e : plateau_table(flat, 1.0, 1.0)) names.push_back(e.name);
  EXPECT_EQ(names, (std::vector<std::string>{"mass", "entropy", "l2_u", "grad_v_l4", "linf_u",
                                             "linf_grad_v", "linf_grad_w"}));
}

TEST(Classify, Cases) {
  const auto flat = series(16, [](double) { return 1.0; });
  EXPECT_EQ(classify_run(flat, false), RunClass::bounded_plateau);
  EXPECT_EQ(classify_run(flat, true), RunClass::diverged);
  EXPECT_EQ(classify_run(series(16, [](double t) { return std::exp(t); }), false), RunClass::growing);
  EXPECT_EQ(classify_run(series(16, [](double t) { return 1.0 + 0.01 * t; }), false),
            RunClass::bounded_plateau);
  EXPECT_THROW(classify_run(series(15, [](double) { return 1.0; }), false), InvalidInput);
}

TEST(Names, RoundTrip) {
  for (ConditionCase c : {ConditionCase::tau0_damping, ConditionCase::threshold_inequality,
                          ConditionCase::not_satisfied})
    EXPECT_EQ(condition_case_from_string(to_string(c)), c);
  for (RunClass c : {RunClass::bounded_plateau, RunClass::growing, RunClass::diverged})
    EXPECT_EQ(run_class_from_string(to_string(c)), c);
  EXPECT_THROW(run_class_from_string("bogus"), InvalidInput);
}
