#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chemohapto/error.hpp"
#include "chemohapto/kinetics.hpp"
#include "chemohapto/verify.hpp"

using namespace chemohapto;

namespace {
constexpr double kE = std::numbers::e;
}

TEST(ETower, Values) {
  EXPECT_EQ(e_tower(0), 1.0);
  EXPECT_DOUBLE_EQ(e_tower(1), kE);
  EXPECT_DOUBLE_EQ(e_tower(2), std::exp(kE));
  EXPECT_NEAR(e_tower(3), 3814279.1047602, 1e-4);
  EXPECT_THROW(e_tower(4), OverflowError);
  EXPECT_THROW(e_tower(-1), DomainError);
}

TEST(IterLog, Values) {
  EXPECT_EQ(iter_log(0, 5.0), 5.0);
  for (int m = 1; m <= 3; ++m) EXPECT_NEAR(iter_log(m, e_tower(m)), 1.0, 1e-12) << m;
  EXPECT_NEAR(iter_log(2, std::exp(kE)), 1.0, 1e-12);
  EXPECT_THROW(iter_log(2, 0.5), DomainError);
  EXPECT_THROW(iter_log(1, 0.0), DomainError);
}

TEST(IterLog, ShiftedKeepsSmallArguments) {
  EXPECT_NEAR(iter_log_shifted(1, 1e-20, 0), 1e-20, 1e-34);
  EXPECT_NEAR(iter_log_shifted(2, 0.0, 2), 1.0, 1e-15);
  EXPECT_NEAR(iter_log_shifted(3, 5.0, 3), iter_log(3, 5.0 + e_tower(3)), 1e-14);
}

TEST(Kinetics, RangeChecks) {
  EXPECT_THROW(KineticSpec::logistic(0.0), InvalidInput);
  EXPECT_THROW(KineticSpec::sub_log_pow(1.0, 1.0, 1.5), InvalidInput);
  EXPECT_THROW(KineticSpec::sub_log_pow(1.0, -1.0, 0.5), InvalidInput);
  EXPECT_THROW(KineticSpec::sub_log_log_log(1.0, 0.0), InvalidInput);
  EXPECT_THROW(KineticSpec::iter_log(0, 1.0), InvalidInput);
  EXPECT_THROW(KineticSpec::iter_log(1, -1.0), InvalidInput);
}

TEST(Kinetics, EvalF) {
  EXPECT_EQ(eval_f(KineticSpec::logistic(2.0), 1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_f(KineticSpec::logistic(2.0), 0.5, 0.25), 2.0 * 0.5 * 0.25);
  const double s = kE - 1.0;
  EXPECT_NEAR(eval_f(KineticSpec::iter_log(1, 1.0), s, 0.0), s * (1.0 - s), 1e-14);
  EXPECT_EQ(eval_f(KineticSpec::zero(), 3.0, 0.2), 0.0);
  EXPECT_NEAR(eval_f(KineticSpec::sub_log_pow(2.0, 1.0, 0.5), kE - 1.0, 0.5),
              (kE - 1.0) * 1.5 - (kE - 1.0) * (kE - 1.0), 1e-13);
  EXPECT_NEAR(eval_f(KineticSpec::sub_log_log_log(1.0, 1.0), std::exp(kE) - kE, 0.0),
              (std::exp(kE) - kE) - std::pow(std::exp(kE) - kE, 2), 1e-10);
}

TEST(Kinetics, NonincreasingInW) {
  for (const KineticSpec& k : {KineticSpec::logistic(1.0), KineticSpec::sub_log_pow(1.0, 1.0, 0.5),
                               KineticSpec::sub_log_log_log(1.0, 2.0), KineticSpec::iter_log(2, 1.0)})
    for (double s : {0.01, 1.0, 100.0}) EXPECT_LE(eval_f(k, s, 0.9), eval_f(k, s, 0.1));
}

TEST(Kinetics, SourceCap) { EXPECT_EQ(f_source_cap_violations(10000, 3), 0); }

TEST(MuR, Zero) {
  for (int r = 1; r <= 3; ++r) {
    const MuEstimate e = mu_r_estimate(KineticSpec::zero(), r, 1.0);
    EXPECT_EQ(e.value, 0.0);
    EXPECT_FALSE(e.infinite);
  }
}

TEST(MuR, LogisticIsInfinite) {
  EXPECT_TRUE(mu_r_estimate(KineticSpec::logistic(1.0), 1, 1.0).infinite);
  EXPECT_TRUE(mu_r_estimate(KineticSpec::sub_log_pow(1.0, 1.0, 0.5), 1, 1.0).infinite);
}

TEST(MuR, IterLogTable) {
  for (int k = 1; k <= 3; ++k)
    for (double mu : {0.5, 2.0}) {
      const KineticSpec spec = KineticSpec::iter_log(k, mu);
      double prev = -1.0;
      for (int r = 1; r <= k; ++r) {
        const MuEstimate e = mu_r_estimate(spec, r, 0.5);
        ASSERT_FALSE(e.infinite);
        if (r < k) EXPECT_LT(std::abs(e.value), 1e-2 * mu) << k << " " << r;
        else EXPECT_NEAR(e.value, mu, 0.05 * mu) << k;
        EXPECT_GE(e.value, prev);
        prev = e.value;
      }
      EXPECT_TRUE(mu_r_estimate(spec, k + 1, 0.5).infinite);
    }
}

TEST(MuR, ShortScheduleToTwelveDecades) {
  TailSchedule s = default_tail_schedule(1);
  s.log_s_min = std::log(1e2);
  s.log_s_max = std::log(1e12);
  s.depth = 1;
  EXPECT_NEAR(mu_r_estimate(KineticSpec::iter_log(1, 1.0), 1, 0.5, s).value, 1.0, 0.05);
}

TEST(M1, Zero) {
  EXPECT_EQ(m1_compute(KineticSpec::zero(), 0.7, 3.0, 1.0), 0.7);
}

TEST(M1, LogisticClosedForm) {
  // sup_s s(1 - s) + eta s = (1 + eta)^2 / 4, minimised over (0, 1] at eta = 1.
  EXPECT_NEAR(m1_objective(KineticSpec::logistic(1.0), 1.0), 1.0, 1e-8);
  EXPECT_NEAR(m1_objective(KineticSpec::logistic(1.0), 0.5), 1.125, 1e-8);
  EXPECT_NEAR(m1_compute(KineticSpec::logistic(1.0), 0.3, 2.0, 1.0), 0.3 + 2.0, 1e-8);
}

TEST(M1, AdditiveInMassAndAboveIt) {
  const KineticSpec k = KineticSpec::sub_log_pow(1.0, 1.0, 0.5);
  const double base = m1_compute(k, 0.0, 1.0, 1.0);
  EXPECT_GE(base, 0.0);
  EXPECT_NEAR(m1_compute(k, 2.5, 1.0, 1.0), 2.5 + base, 1e-9);
  EXPECT_GE(m1_compute(KineticSpec::iter_log(2, 1.0), 4.0, 1.0, 1.0), 4.0);
}

TEST(SupOverPositive, FindsInteriorMax) {
  EXPECT_NEAR(sup_over_positive([](double s) { return s * std::exp(-s); }), 1.0 / kE, 1e-10);
  EXPECT_THROW(sup_over_positive([](double s) { return s; }), ConvergenceError);
}

TEST(IterLogDerivatives, Positive) {
  for (int m = 1; m <= 3; ++m) {
    const IterlogPositivity p = iterlog_positivity(m);
    EXPECT_GT(p.min_first, 0.0) << m;
    EXPECT_GT(p.min_weight, 0.0) << m;
  }
}
