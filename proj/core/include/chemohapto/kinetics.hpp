#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace chemohapto {

/// m-fold exponential tower of 1: e_tower(0) = 1, e_tower(1) = e, ...
/// Defined for 0 <= m <= 3; e_tower(4) = e^3814279.1 overflows a double and
/// raises OverflowError.
double e_tower(int m);

/// ln applied i times. DomainError when an intermediate iterate is <= 0
/// (iter_log(0, s) = s for any s).
double iter_log(int i, double s);

/// ln^[i](s + e^[shift]) for s >= 0 and shift >= i - 1, evaluated through
/// log1p so that small s keeps full relative accuracy.
double iter_log_shifted(int i, double s, int shift);

namespace kinetics {
struct Zero {};
struct Logistic {
  double mu;
};
struct SubLogPow {
  double a;
  double b;
  double gamma;
};
struct SubLogLogLog {
  double a;
  double b;
};
struct IterLog {
  int k;
  double mu;
};
}  // namespace kinetics

/// Source term f(u, w), one of a closed set of families:
///   Zero            f = 0
///   Logistic        f = mu s (1 - s - w)
///   SubLogPow       f = s (a - w) - b s^2 / ln^gamma(s + 1)
///   SubLogLogLog    f = s (a - w) - b s^2 / ln ln(s + e)
///   IterLog         f = s (1 - w - mu s / prod_{i=1..k} ln^[i](s + e^[i-1]))
/// Every non-Zero member satisfies f(s, w) <= a' - b' s; the pair is computed
/// on construction.
class KineticSpec {
 public:
  using Variant = std::variant<kinetics::Zero, kinetics::Logistic, kinetics::SubLogPow,
                               kinetics::SubLogLogLog, kinetics::IterLog>;

  KineticSpec();
  explicit KineticSpec(Variant v);

  static KineticSpec zero();
  static KineticSpec logistic(double mu);
  static KineticSpec sub_log_pow(double a, double b, double gamma);
  static KineticSpec sub_log_log_log(double a, double b);
  static KineticSpec iter_log(int k, double mu);

  const Variant& variant() const noexcept { return v_; }
  bool is_zero() const noexcept { return std::holds_alternative<kinetics::Zero>(v_); }
  /// "zero", "logistic", "sublog_pow", "sublog_loglog", "iterlog"
  std::string name() const;
  std::string describe() const;

  double cap_a() const noexcept { return a_cap_; }
  double cap_b() const noexcept { return b_cap_; }

 private:
  Variant v_;
  double a_cap_ = 0.0;
  double b_cap_ = 0.0;
};

double eval_f(const KineticSpec& spec, double s, double w);

/// f(s, w) / s, with its limit at s = 0 (possibly -inf).
double growth_rate(const KineticSpec& spec, double s, double w);

/// Large arguments in log coordinates: s = exp(log_s).
struct LogArg {
  double log_s;
  double inv_s;  ///< exp(-log_s), 0 once it underflows
  static LogArg from_log(double log_s);
};

/// -f(s, w) / s^2 evaluated without forming s.
double damping_density(const KineticSpec& spec, const LogArg& s, double w);

/// Segment 1 is geometric in ln s over [log_s_min, log_s_max]. Each further
/// segment d = 2..depth is geometric in ln^[d] s, starting where the previous
/// one ended and running to 1e300; there the shifts e^[i-1] are negligible and
/// the tail ratio is evaluated from the iterated logs alone.
struct TailSchedule {
  double log_s_min;
  double log_s_max = 1e300;
  int depth = 4;
  int points = 64;  ///< per segment
  int w_points = 33;
  double divergence_threshold = 1e6;
  int monotone_window = 8;
};

/// Geometric schedule in ln s starting above the tower threshold for r.
TailSchedule default_tail_schedule(int r);

struct MuEstimate {
  int r = 0;
  double value = 0.0;
  bool infinite = false;
};

/// liminf over s of inf over w in [0, w_max] of -f(s, w) prod_{i<=r} ln^[i] s / s^2,
/// approximated by the minimum over the tail half of the schedule.
MuEstimate mu_r_estimate(const KineticSpec& spec, int r, double w_max,
                         const TailSchedule& schedule);
MuEstimate mu_r_estimate(const KineticSpec& spec, int r, double w_max);

/// sup_{s > 0} fn(s), bracketed on a log grid over [1e-12, 1e200] and refined
/// by golden section. Throws ConvergenceError when the maximum sits at the
/// upper end of the bracket.
double sup_over_positive(const std::function<double(double)>& fn);

/// ||u0||_1 + |Omega| inf_{0 < eta <= b'} max(0, sup_s f(s, 0) + eta s) / eta.
double m1_compute(const KineticSpec& spec, double u0_mass, double area, double w_max);

/// max(0, sup_s f(s, 0) + eta s) / eta, the objective minimized by m1_compute.
double m1_objective(const KineticSpec& spec, double eta);

}  // namespace chemohapto
