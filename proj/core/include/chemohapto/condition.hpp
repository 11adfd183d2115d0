#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chemohapto/diagnostics.hpp"
#include "chemohapto/kinetics.hpp"
#include "chemohapto/model.hpp"

namespace chemohapto {

enum class ConditionCase { tau0_damping, threshold_inequality, not_satisfied };
enum class RunClass { bounded_plateau, growing, diverged };

std::string to_string(ConditionCase c);
std::string to_string(RunClass c);
ConditionCase condition_case_from_string(const std::string& s);
RunClass run_class_from_string(const std::string& s);

inline constexpr double kMuTol = 1e-3;

struct ThresholdReport {
  std::vector<MuEstimate> mu_r_estimates;
  double M1 = 0.0;
  double u0_mass = 0.0;
  double w0_max = 0.0;
  ConditionCase condition_case = ConditionCase::not_satisfied;
  double C_GN = 0.0;        ///< estimator lower bound for (p, q, r) = (4, 2, 2)
  double C_GN4_bound = 0.0; ///< C_GN^4
  double chi = 0.0;
  double tau = 0.0;
  double mu1 = 0.0;         ///< +inf allowed
  bool mu1_infinite = false;
  double threshold_lhs = 0.0;  ///< (chi - mu1)^+ M1
  double threshold_rhs = 0.0;  ///< 1 / (2 C_GN^4)
  bool tau0_damping_holds = false;
  bool threshold_inequality_holds = false;
  std::string gn_best_shape;
};

/// Evaluates both alternatives of the boundedness condition and reports the
/// first one that holds. C_GN is a lower bound from the estimator, so the
/// threshold side errs on the permissive side.
ThresholdReport check_theorem(const ModelParams& params, const InitialData& ic, int r_max = 3);

/// Same, with a precomputed (4, 2, 2) estimate; it depends only on the grid.
ThresholdReport check_theorem(const ModelParams& params, const InitialData& ic, int r_max,
                              const GnEstimate& gn);

/// max of the series over the second half of the time span divided by its
/// max over the first half. 1 when both vanish, +inf when only the second half
/// is positive.
double plateau_ratio(const std::vector<DiagnosticsRecord>& records,
                     const std::function<double(const DiagnosticsRecord&)>& series);
double plateau_ratio(const std::vector<DiagnosticsRecord>& records,
                     double DiagnosticsRecord::*member);

struct PlateauEntry {
  std::string name;
  double ratio = 0.0;
};
/// Ratios for the bounded quantities: mass, entropy (tau > 0) or g_m
/// (tau = 0), l2_u, grad_v_l4 (tau > 0), linf_u, linf_grad_v, linf_grad_w.
/// The entropy is shifted by |Omega|/e, its lower bound, to make it
/// nonnegative before taking ratios.
std::vector<PlateauEntry> plateau_table(const std::vector<DiagnosticsRecord>& records, double tau,
                                        double area);

inline constexpr double kGrowthRatio = 1.25;

/// Needs at least 16 records (InvalidInput otherwise).
RunClass classify_run(const std::vector<DiagnosticsRecord>& records, bool diverged);

}  // namespace chemohapto
