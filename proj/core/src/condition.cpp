#include "chemohapto/condition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chemohapto/error.hpp"

namespace chemohapto {

std::string to_string(ConditionCase c) {
  switch (c) {
    case ConditionCase::tau0_damping: return "tau0_damping";
    case ConditionCase::threshold_inequality: return "threshold_inequality";
    case ConditionCase::not_satisfied: return "not_satisfied";
  }
  return "not_satisfied";
}

std::string to_string(RunClass c) {
  switch (c) {
    case RunClass::bounded_plateau: return "bounded_plateau";
    case RunClass::growing: return "growing";
    case RunClass::diverged: return "diverged";
  }
  return "diverged";
}

ConditionCase condition_case_from_string(const std::string& s) {
  if (s == "tau0_damping") return ConditionCase::tau0_damping;
  if (s == "threshold_inequality") return ConditionCase::threshold_inequality;
  if (s == "not_satisfied") return ConditionCase::not_satisfied;
  throw InvalidInput("unknown condition case '" + s + "'");
}

RunClass run_class_from_string(const std::string& s) {
  if (s == "bounded_plateau") return RunClass::bounded_plateau;
  if (s == "growing") return RunClass::growing;
  if (s == "diverged") return RunClass::diverged;
  throw InvalidInput("unknown run class '" + s + "'");
}

ThresholdReport check_theorem(const ModelParams& params, const InitialData& ic, int r_max) {
  return check_theorem(params, ic, r_max, gn_estimate(params.grid, 4.0, 2.0, 2.0));
}

ThresholdReport check_theorem(const ModelParams& params, const InitialData& ic, int r_max,
                              const GnEstimate& gn) {
  const double c_gn = gn.value;
  if (r_max < 1) throw InvalidInput("r_max must be >= 1");
  ThresholdReport rep;
  rep.chi = params.chi;
  rep.tau = params.tau;
  rep.u0_mass = integrate(ic.u0);
  rep.w0_max = lebesgue(ic.w0, kInfNorm);
  for (int r = 1; r <= r_max; ++r)
    rep.mu_r_estimates.push_back(mu_r_estimate(params.kinetics, r, rep.w0_max));
  rep.M1 = m1_compute(params.kinetics, rep.u0_mass, params.grid.area(), rep.w0_max);
  rep.C_GN = c_gn;
  rep.gn_best_shape = gn.best_shape;
  rep.C_GN4_bound = std::pow(c_gn, 4);
  rep.threshold_rhs = 1.0 / (2.0 * rep.C_GN4_bound);

  const MuEstimate& m1 = rep.mu_r_estimates.front();
  rep.mu1 = m1.value;
  rep.mu1_infinite = m1.infinite;
  rep.threshold_lhs = m1.infinite ? 0.0 : std::max(params.chi - m1.value, 0.0) * rep.M1;
  rep.threshold_inequality_holds = rep.threshold_lhs < rep.threshold_rhs;
  if (params.tau == 0.0)
    for (const MuEstimate& e : rep.mu_r_estimates)
      if (e.infinite || e.value > kMuTol) rep.tau0_damping_holds = true;

  if (rep.tau0_damping_holds)
    rep.condition_case = ConditionCase::tau0_damping;
  else if (rep.threshold_inequality_holds)
    rep.condition_case = ConditionCase::threshold_inequality;
  else
    rep.condition_case = ConditionCase::not_satisfied;
  return rep;
}

double plateau_ratio(const std::vector<DiagnosticsRecord>& records,
                     double DiagnosticsRecord::*member) {
  return plateau_ratio(records, [member](const DiagnosticsRecord& r) { return r.*member; });
}

double plateau_ratio(const std::vector<DiagnosticsRecord>& records,
                     const std::function<double(const DiagnosticsRecord&)>& series) {
  if (records.size() < 2) throw InvalidInput("plateau ratio needs at least 2 records");
  const double t_mid = 0.5 * (records.front().t + records.back().t);
  double first = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (const DiagnosticsRecord& r : records) {
    double& slot = r.t <= t_mid ? first : second;
    slot = std::max(slot, series(r));
  }
  if (!std::isfinite(second)) return 1.0;
  if (first == second) return 1.0;
  if (first <= 0.0) return second <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return second / first;
}

std::vector<PlateauEntry> plateau_table(const std::vector<DiagnosticsRecord>& records, double tau,
                                        double area) {
  std::vector<PlateauEntry> out;
  auto add = [&](const char* name, double DiagnosticsRecord::*m) {
    out.push_back({name, plateau_ratio(records, m)});
  };
  add("mass", &DiagnosticsRecord::mass);
  if (tau > 0.0) {
    const double shift = area / std::numbers::e;
    out.push_back({"entropy", plateau_ratio(records, [shift](const DiagnosticsRecord& r) {
                     return r.entropy + shift;
                   })});
  } else {
    add("g_m", &DiagnosticsRecord::g_m);
  }
  add("l2_u", &DiagnosticsRecord::l2_u);
  if (tau > 0.0) add("grad_v_l4", &DiagnosticsRecord::grad_v_l4);
  add("linf_u", &DiagnosticsRecord::linf_u);
  add("linf_grad_v", &DiagnosticsRecord::linf_grad_v);
  add("linf_grad_w", &DiagnosticsRecord::linf_grad_w);
  return out;
}

RunClass classify_run(const std::vector<DiagnosticsRecord>& records, bool diverged) {
  if (records.size() < 16)
    throw InvalidInput("classification needs at least 16 records, got " +
                       std::to_string(records.size()));
  if (diverged) return RunClass::diverged;
  if (plateau_ratio(records, &DiagnosticsRecord::linf_u) > kGrowthRatio) return RunClass::growing;
  return RunClass::bounded_plateau;
}

}  // namespace chemohapto
