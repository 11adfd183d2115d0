#include "chemohapto/kinetics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chemohapto/error.hpp"

namespace chemohapto {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = std::numbers::e;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::array<double, 4>& towers() {
  static const std::array<double, 4> t = [] {
    std::array<double, 4> a{};
    a[0] = 1.0;
    for (int m = 1; m < 4; ++m) a[m] = std::exp(a[m - 1]);
    return a;
  }();
  return t;
}

// s / prod_{i=1..k} ln^[i](s + e^[i-1]), divided factor by factor so that the
// small-s limit does not underflow to 0/0.
double iterlog_ratio(int k, double s) {
  double ratio = s;
  for (int i = 1; i <= k; ++i) ratio /= iter_log_shifted(i, s, i - 1);
  return ratio;
}

// ln(s + c) for s = exp(log_s) given in log coordinates.
double log_shift(const LogArg& s, double c) { return s.log_s + std::log1p(c * s.inv_s); }

double golden_max(const std::function<double(double)>& fn, double lo, double hi, int iters) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < iters; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fn(d);
    }
  }
  return std::max(fc, fd);
}
}  // namespace

double e_tower(int m) {
  if (m < 0) throw DomainError("e_tower needs m >= 0");
  if (m > 3) throw OverflowError("e_tower(" + std::to_string(m) + ") overflows double precision");
  return towers()[m];
}

double iter_log(int i, double s) {
  if (i < 0) throw DomainError("iter_log needs i >= 0");
  for (int j = 0; j < i; ++j) {
    if (!(s > 0.0))
      throw DomainError("iter_log: iterate " + std::to_string(j) + " is not positive");
    s = std::log(s);
  }
  return s;
}

double iter_log_shifted(int i, double s, int shift) {
  if (i < 0) throw DomainError("iter_log_shifted needs i >= 0");
  if (shift < i - 1) throw DomainError("iter_log_shifted needs shift >= i - 1");
  if (!(s >= 0.0)) throw DomainError("iter_log_shifted needs s >= 0");
  if (i == 0) return s + e_tower(shift);
  // ln(e^[j] + x) = e^[j-1] + log1p(x / e^[j]); track only the excess x.
  double x = s;
  for (int j = shift; j > shift - i; --j) x = std::log1p(x / e_tower(j));
  return (shift - i >= 0 ? e_tower(shift - i) : 0.0) + x;
}

LogArg LogArg::from_log(double log_s) { return LogArg{log_s, std::exp(-log_s)}; }

KineticSpec::KineticSpec() : v_(kinetics::Zero{}) {}

KineticSpec::KineticSpec(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const kinetics::Zero&) {},
                 [](const kinetics::Logistic& k) {
                   if (!(k.mu > 0.0) || !std::isfinite(k.mu))
                     throw InvalidInput("logistic: mu must be > 0, got " + std::to_string(k.mu));
                 },
                 [](const kinetics::SubLogPow& k) {
                   if (!std::isfinite(k.a)) throw InvalidInput("sublog_pow: a must be finite");
                   if (!(k.b > 0.0) || !std::isfinite(k.b))
                     throw InvalidInput("sublog_pow: b must be > 0, got " + std::to_string(k.b));
                   if (!(k.gamma > 0.0 && k.gamma < 1.0))
                     throw InvalidInput("sublog_pow: gamma must lie in (0,1), got " +
                                        std::to_string(k.gamma));
                 },
                 [](const kinetics::SubLogLogLog& k) {
                   if (!std::isfinite(k.a)) throw InvalidInput("sublog_loglog: a must be finite");
                   if (!(k.b > 0.0) || !std::isfinite(k.b))
                     throw InvalidInput("sublog_loglog: b must be > 0, got " + std::to_string(k.b));
                 },
                 [](const kinetics::IterLog& k) {
                   if (k.k < 1 || k.k > 4)
                     throw InvalidInput("iterlog: k must lie in [1,4], got " + std::to_string(k.k));
                   if (!(k.mu > 0.0) || !std::isfinite(k.mu))
                     throw InvalidInput("iterlog: mu must be > 0, got " + std::to_string(k.mu));
                 },
             },
             v_);
  if (is_zero()) return;
  b_cap_ = std::visit(overloaded{
                          [](const kinetics::Zero&) { return 0.0; },
                          [](const kinetics::Logistic& k) { return k.mu; },
                          [](const kinetics::SubLogPow& k) { return std::max(k.a, 0.0) + 1.0; },
                          [](const kinetics::SubLogLogLog& k) { return std::max(k.a, 0.0) + 1.0; },
                          [](const kinetics::IterLog&) { return 1.0; },
                      },
                      v_);
  const double b = b_cap_;
  const double sup = sup_over_positive([&](double s) { return eval_f(*this, s, 0.0) + b * s; });
  a_cap_ = sup + 1e-9 * std::max(1.0, std::abs(sup));
}

KineticSpec KineticSpec::zero() { return KineticSpec(kinetics::Zero{}); }
KineticSpec KineticSpec::logistic(double mu) { return KineticSpec(kinetics::Logistic{mu}); }
KineticSpec KineticSpec::sub_log_pow(double a, double b, double gamma) {
  return KineticSpec(kinetics::SubLogPow{a, b, gamma});
}
KineticSpec KineticSpec::sub_log_log_log(double a, double b) {
  return KineticSpec(kinetics::SubLogLogLog{a, b});
}
KineticSpec KineticSpec::iter_log(int k, double mu) { return KineticSpec(kinetics::IterLog{k, mu}); }

std::string KineticSpec::name() const {
  return std::visit(overloaded{
                        [](const kinetics::Zero&) { return std::string("zero"); },
                        [](const kinetics::Logistic&) { return std::string("logistic"); },
                        [](const kinetics::SubLogPow&) { return std::string("sublog_pow"); },
                        [](const kinetics::SubLogLogLog&) { return std::string("sublog_loglog"); },
                        [](const kinetics::IterLog&) { return std::string("iterlog"); },
                    },
                    v_);
}

std::string KineticSpec::describe() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(overloaded{
                 [&](const kinetics::Zero&) { os << "zero"; },
                 [&](const kinetics::Logistic& k) { os << "logistic(mu=" << k.mu << ")"; },
                 [&](const kinetics::SubLogPow& k) {
                   os << "sublog_pow(a=" << k.a << ", b=" << k.b << ", gamma=" << k.gamma << ")";
                 },
                 [&](const kinetics::SubLogLogLog& k) {
                   os << "sublog_loglog(a=" << k.a << ", b=" << k.b << ")";
                 },
                 [&](const kinetics::IterLog& k) {
                   os << "iterlog(k=" << k.k << ", mu=" << k.mu << ")";
                 },
             },
             v_);
  return os.str();
}

double growth_rate(const KineticSpec& spec, double s, double w) {
  if (!(s >= 0.0)) throw DomainError("kinetics: s must be >= 0");
  return std::visit(
      overloaded{
          [](const kinetics::Zero&) { return 0.0; },
          [&](const kinetics::Logistic& k) { return k.mu * (1.0 - s - w); },
          [&](const kinetics::SubLogPow& k) {
            if (s == 0.0) return k.a - w;
            return k.a - w - k.b * s / std::pow(std::log1p(s), k.gamma);
          },
          [&](const kinetics::SubLogLogLog& k) {
            if (s == 0.0) return k.a - w - k.b * kE;
            return k.a - w - k.b * s / iter_log_shifted(2, s, 1);
          },
          [&](const kinetics::IterLog& k) {
            if (s == 0.0) {
              if (k.k == 1) return 1.0 - w - k.mu;
              return -kInf;
            }
            return 1.0 - w - k.mu * iterlog_ratio(k.k, s);
          },
      },
      spec.variant());
}

double eval_f(const KineticSpec& spec, double s, double w) {
  if (s == 0.0) {
    if (const auto* k = std::get_if<kinetics::IterLog>(&spec.variant())) {
      if (k->k == 2) return -k->mu * kE;
      if (k->k > 2) return -kInf;
    }
    return 0.0;
  }
  if (const auto* k = std::get_if<kinetics::Logistic>(&spec.variant()))
    return k->mu * s * (1.0 - s - w);
  return s * growth_rate(spec, s, w);
}

double damping_density(const KineticSpec& spec, const LogArg& s, double w) {
  return std::visit(
      overloaded{
          [](const kinetics::Zero&) { return 0.0; },
          [&](const kinetics::Logistic& k) { return k.mu - k.mu * (1.0 - w) * s.inv_s; },
          [&](const kinetics::SubLogPow& k) {
            return k.b / std::pow(log_shift(s, 1.0), k.gamma) - (k.a - w) * s.inv_s;
          },
          [&](const kinetics::SubLogLogLog& k) {
            return k.b / std::log(log_shift(s, kE)) - (k.a - w) * s.inv_s;
          },
          [&](const kinetics::IterLog& k) {
            double prod = 1.0;
            for (int i = 1; i <= k.k; ++i) {
              double y = log_shift(s, e_tower(i - 1));
              for (int j = 1; j < i; ++j) y = std::log(y);
              prod *= y;
            }
            return k.mu / prod - (1.0 - w) * s.inv_s;
          },
      },
      spec.variant());
}

TailSchedule default_tail_schedule(int r) {
  if (r < 1) throw DomainError("mu_r needs r >= 1");
  TailSchedule s;
  s.log_s_min = std::max(std::log(1e2), e_tower(r - 1) + 1.0);
  return s;
}

MuEstimate mu_r_estimate(const KineticSpec& spec, int r, double w_max) {
  return mu_r_estimate(spec, r, w_max, default_tail_schedule(r));
}

namespace {

// -f(s, w) prod_{i<=r} ln^[i] s / s^2 at s = e^[depth](y), depth >= 2. Here s
// exceeds e^700, so ln^[i](s + e^[i-1]) == ln^[i] s to double precision.
double deep_tail_value(const KineticSpec& spec, int r, double w, int depth, double y) {
  const int kmax = std::visit(overloaded{
                                  [](const kinetics::IterLog& k) { return k.k; },
                                  [](const auto&) { return 2; },
                              },
                              spec.variant());
  const int top = std::max(r, kmax) + 1;
  // L[i] = ln^[i] s for i >= depth, lnL[i] = ln L[i] for every i >= 1.
  std::vector<double> L(top + 2, kInf), lnL(top + 1, kInf);
  L[depth] = y;
  for (int i = depth + 1; i <= top + 1; ++i) {
    if (!(L[i - 1] > 0.0)) throw DomainError("mu_r schedule entered an undefined iterate region");
    L[i] = std::log(L[i - 1]);
  }
  for (int i = depth - 1; i >= 1; --i) L[i] = std::exp(L[i + 1]);
  for (int i = 1; i <= top; ++i) lnL[i] = L[i + 1];
  auto sum_ln = [&](int from, int to) {
    double acc = 0.0;
    for (int i = from; i <= to; ++i) acc += lnL[i];
    return acc;
  };
  const double log_prod = sum_ln(1, r);
  // (a - w) prod / s, with s = exp(L[1]); vanishes unless L[1] is moderate.
  auto linear = [&](double a) {
    const double c = a - w;
    if (c == 0.0 || !std::isfinite(L[1])) return 0.0;
    return c * std::exp(log_prod - L[1]);
  };
  return std::visit(
      overloaded{
          [](const kinetics::Zero&) { return 0.0; },
          [&](const kinetics::Logistic& k) { return k.mu * std::exp(log_prod) - k.mu * linear(1.0); },
          [&](const kinetics::SubLogPow& k) {
            return k.b * std::exp((1.0 - k.gamma) * lnL[1] + sum_ln(2, r)) - linear(k.a);
          },
          [&](const kinetics::SubLogLogLog& k) {
            const double e = r >= 2 ? lnL[1] + sum_ln(3, r) : lnL[1] - lnL[2];
            return k.b * std::exp(e) - linear(k.a);
          },
          [&](const kinetics::IterLog& k) {
            const double e = r >= k.k ? sum_ln(k.k + 1, r) : -sum_ln(r + 1, k.k);
            return k.mu * std::exp(e) - linear(1.0);
          },
      },
      spec.variant());
}

}  // namespace

MuEstimate mu_r_estimate(const KineticSpec& spec, int r, double w_max,
                         const TailSchedule& sched) {
  if (r < 1) throw DomainError("mu_r needs r >= 1");
  if (!(w_max >= 0.0) || !std::isfinite(w_max)) throw InvalidInput("mu_r needs finite w_max >= 0");
  if (sched.points < sched.monotone_window || sched.monotone_window < 2 || sched.w_points < 2 ||
      sched.depth < 1)
    throw InvalidInput("mu_r schedule too short");
  if (!(sched.log_s_min > e_tower(r - 1)) || !(sched.log_s_max > sched.log_s_min))
    throw DomainError("mu_r schedule must start above e_tower(r) and increase");
  if (sched.depth > 1 && !(sched.log_s_max > 700.0))
    throw DomainError("deep mu_r segments need log_s_max > 700");

  MuEstimate est;
  est.r = r;
  if (spec.is_zero()) return est;

  const int n = sched.points;
  std::vector<double> q;
  q.reserve(static_cast<std::size_t>(n) * sched.depth);
  auto geometric = [n](double lo, double hi, int k) {
    return k + 1 == n ? hi : lo * std::exp(std::log(hi / lo) * k / (n - 1));
  };
  auto w_min = [&](auto&& value) {
    double best = kInf;
    for (int j = 0; j < sched.w_points; ++j) best = std::min(best, value(w_max * j / (sched.w_points - 1)));
    return best;
  };

  for (int k = 0; k < n; ++k) {
    const double L = geometric(sched.log_s_min, sched.log_s_max, k);
    const LogArg s = LogArg::from_log(L);
    double prod = 1.0;
    double it = L;
    for (int i = 1; i <= r; ++i) {
      if (i > 1) it = std::log(it);
      if (!(it > 0.0)) throw DomainError("mu_r schedule entered an undefined iterate region");
      prod *= it;
    }
    q.push_back(w_min([&](double w) { return damping_density(spec, s, w) * prod; }));
  }
  double prev_end = sched.log_s_max;
  for (int d = 2; d <= sched.depth; ++d) {
    const double lo = std::log(prev_end), hi = 1e300;
    for (int k = 0; k < n; ++k) {
      const double y = geometric(lo, hi, k);
      q.push_back(w_min([&](double w) { return deep_tail_value(spec, r, w, d, y); }));
    }
    prev_end = hi;
  }

  const int total = static_cast<int>(q.size());
  bool diverging = true;
  for (int k = total - sched.monotone_window; k < total; ++k) {
    if (!(q[k] > sched.divergence_threshold)) diverging = false;
    if (k > total - sched.monotone_window && !(q[k] > q[k - 1] || std::isinf(q[k])))
      diverging = false;
  }
  if (diverging) {
    est.infinite = true;
    est.value = kInf;
    return est;
  }
  est.value = *std::min_element(q.begin() + total / 2, q.end());
  return est;
}

double sup_over_positive(const std::function<double(double)>& fn) {
  constexpr int per_decade = 8;
  constexpr double lo_exp = -12.0, hi_exp = 200.0;
  const int n = static_cast<int>((hi_exp - lo_exp) * per_decade) + 1;
  int arg = -1;
  double best = -kInf;
  for (int k = 0; k < n; ++k) {
    const double v = fn(std::pow(10.0, lo_exp + static_cast<double>(k) / per_decade));
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  const double at_zero = fn(0.0);
  if (arg < 0 && !(at_zero > -kInf)) return -kInf;
  if (arg == n - 1)
    throw ConvergenceError("supremum search did not stabilize: f(s) + eta s still growing at s = 1e200",
                           n, best);
  if (at_zero > best) return at_zero;
  if (arg < 0) return at_zero;
  const double t_lo = lo_exp + static_cast<double>(std::max(arg - 1, 0)) / per_decade;
  const double t_hi = lo_exp + static_cast<double>(arg + 1) / per_decade;
  const double refined =
      golden_max([&](double t) { return fn(std::pow(10.0, t)); }, t_lo, t_hi, 80);
  return std::max(best, refined);
}

double m1_objective(const KineticSpec& spec, double eta) {
  if (!(eta > 0.0)) throw DomainError("m1 objective needs eta > 0");
  const double m = sup_over_positive([&](double s) { return eval_f(spec, s, 0.0) + eta * s; });
  return std::max(0.0, m) / eta;
}

double m1_compute(const KineticSpec& spec, double u0_mass, double area, double w_max) {
  if (!(u0_mass >= 0.0)) throw InvalidInput("m1 needs u0_mass >= 0");
  if (!(area > 0.0)) throw InvalidInput("m1 needs area > 0");
  if (!(w_max >= 0.0)) throw InvalidInput("m1 needs w_max >= 0");
  if (spec.is_zero()) return u0_mass;

  // f decreases in w for every family, so the supremum over w sits at w = 0.
  const double b = spec.cap_b();
  constexpr int n = 64;
  const double lo = std::log(b * 1e-12), hi = std::log(b);
  std::vector<double> vals(n);
  int arg = 0;
  for (int k = 0; k < n; ++k) {
    const double eta = k + 1 == n ? b : std::exp(lo + (hi - lo) * k / (n - 1));
    vals[k] = m1_objective(spec, eta);
    if (vals[k] < vals[arg]) arg = k;
  }
  double best = vals[arg];
  if (best > 0.0) {
    const double t_lo = lo + (hi - lo) * std::max(arg - 1, 0) / (n - 1);
    const double t_hi = lo + (hi - lo) * std::min(arg + 1, n - 1) / (n - 1);
    const double refined = -golden_max(
        [&](double t) { return -m1_objective(spec, std::min(std::exp(t), b)); }, t_lo, t_hi, 60);
    best = std::min(best, refined);
  }
  return u0_mass + area * best;
}

}  // namespace chemohapto
