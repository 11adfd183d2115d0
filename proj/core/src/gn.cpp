#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chemohapto/diagnostics.hpp"
#include "chemohapto/error.hpp"

namespace chemohapto {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Field2D gaussian(const Grid& g, double cx, double cy, double sigma, double offset) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  return Field2D::from_function(g, [&](double x, double y) {
    const double dx = x - cx, dy = y - cy;
    return std::exp(-(dx * dx + dy * dy) * inv) + offset;
  });
}

std::string shape_name(const char* kind, std::initializer_list<double> params) {
  std::ostringstream os;
  os.precision(6);
  os << kind << "(";
  bool first = true;
  for (double p : params) {
    if (!first) os << ", ";
    os << p;
    first = false;
  }
  os << ")";
  return os.str();
}

double log_sum_exp(std::initializer_list<double> logs) {
  double m = -kInf;
  for (double l : logs) m = std::max(m, l);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - m);
  return m + std::log(s);
}
}  // namespace

double gn_ratio(const Field2D& phi, double p, double q, double r) {
  const double delta = 1.0 - q / p;
  const double num = lebesgue(phi, p);
  const double den = std::pow(grad_norm(phi, 2.0), delta) * std::pow(lebesgue(phi, q), 1.0 - delta) +
                     lebesgue(phi, r);
  return den > 0.0 ? num / den : 0.0;
}

GnEstimate gn_estimate(const Grid& g, double p, double q, double r) {
  if (!(p >= 1.0) || !(q > 0.0) || !(q < p) || !(r > 0.0))
    throw InvalidInput("GN estimate needs p >= 1, 0 < q < p, r > 0");
  GnEstimate est;
  est.delta = 1.0 - q / p;
  est.constant_floor = std::pow(g.area(), 1.0 / p - 1.0 / r);
  est.value = est.constant_floor;
  est.best_shape = "constant";

  auto consider = [&](const Field2D& phi, const std::string& name) {
    ++est.evaluations;
    const double v = gn_ratio(phi, p, q, r);
    if (v > est.value) {
      est.value = v;
      est.best_shape = name;
    }
    return v;
  };

  const double pi = std::numbers::pi;
  for (double offset : {0.0, 0.25, 1.0, 4.0})
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b) {
        if (a == 0 && b == 0) continue;
        const Field2D phi = Field2D::from_function(g, [&](double x, double y) {
          return std::cos(a * pi * x / g.lx()) * std::cos(b * pi * y / g.ly()) + offset;
        });
        consider(phi, shape_name("cos", {double(a), double(b), offset}));
      }

  const std::array<double, 3> ax{0.0, 0.5 * g.lx(), g.lx()};
  const std::array<double, 3> ay{0.0, 0.5 * g.ly(), g.ly()};
  const double hmin = std::min(g.hx(), g.hy());
  const double smax = 0.5 * std::min(g.lx(), g.ly());
  double best_g = -1.0;
  std::array<double, 4> seed{};  // cx, cy, ln sigma, offset
  for (double cx : ax)
    for (double cy : ay)
      for (double sigma = 0.5 * hmin; sigma <= smax; sigma *= 2.0) {
        const double v =
            consider(gaussian(g, cx, cy, sigma, 0.0), shape_name("gauss", {cx, cy, sigma, 0.0}));
        if (v > best_g) {
          best_g = v;
          seed = {cx, cy, std::log(sigma), 0.0};
        }
      }

  // Coordinate ascent on the best bump.
  std::array<double, 4> step{0.125 * g.lx(), 0.125 * g.ly(), 0.5, 0.1};
  auto eval = [&](const std::array<double, 4>& s) {
    return consider(gaussian(g, s[0], s[1], std::exp(s[2]), s[3]),
                    shape_name("gauss", {s[0], s[1], std::exp(s[2]), s[3]}));
  };
  auto clamp = [&](std::array<double, 4> s) {
    s[0] = std::clamp(s[0], 0.0, g.lx());
    s[1] = std::clamp(s[1], 0.0, g.ly());
    s[2] = std::clamp(s[2], std::log(0.25 * hmin), std::log(std::max(g.lx(), g.ly())));
    s[3] = std::max(s[3], 0.0);
    return s;
  };
  double cur = best_g;
  for (int halvings = 0; halvings < 10 && est.evaluations < 1500;) {
    bool improved = false;
    for (int c = 0; c < 4; ++c) {
      for (double sgn : {1.0, -1.0}) {
        std::array<double, 4> trial = seed;
        trial[c] += sgn * step[c];
        trial = clamp(trial);
        if (trial == seed) continue;
        const double v = eval(trial);
        if (v > cur) {
          cur = v;
          seed = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      for (double& s : step) s *= 0.5;
      ++halvings;
    }
  }
  return est;
}

double gn_constant_estimate(const Grid& grid, double p, double q, double r) {
  return gn_estimate(grid, p, q, r).value;
}

double alpha_cutoff(double s, double lambda) {
  const double a = std::abs(s);
  if (a <= lambda) return 0.0;
  if (a < 2.0 * lambda) return 2.0 * (a - lambda);
  return a;
}

LogGnConstants log_gn_constants(const Grid& grid, int m, double q, double r, double eps) {
  if (m < 1) throw InvalidInput("log-GN check needs m >= 1");
  if (!(q > 1.0) || !(r > 0.0) || !(r < q)) throw InvalidInput("log-GN check needs q > 1, 0 < r < q");
  if (!(eps > 0.0)) throw InvalidInput("log-GN check needs eps > 0");
  LogGnConstants c;
  c.gn_hat = gn_constant_estimate(grid, q, r, r);
  c.C1 = std::pow(2.0, q - 1.0) * std::pow(c.gn_hat, q);
  c.C = std::pow(2.0, q) * c.C1;

  // g(lambda)/lambda >= ln^[m](lambda + e^[m]); making the latter exceed
  // (2^(2q-r) C1 / eps)^(1/r) enforces the recipe.
  const double log_target = ((2.0 * q - r) * std::log(2.0) + std::log(c.C1) - std::log(eps)) / r;
  const double y = std::exp(log_target) * (1.0 + 1e-6);
  // Undo m logarithms; keep the last two levels: ln(lambda + e^[m]) and its log.
  double level = y;  // ln^[m](lambda + e^[m])
  double prev = std::log(y);
  for (int j = m; j > 1; --j) {
    prev = level;
    level = std::exp(level);
  }
  // level = ln(lambda + e^[m]), prev = ln ln(lambda + e^[m])
  const double em = e_tower(m);
  const double floor_log = std::log(2.0);  // lambda > 1
  if (std::isfinite(level)) {
    if (level > 700.0) {
      c.log_lambda = level;
    } else {
      const double lam = std::exp(level) - em;
      c.log_lambda = std::max(lam > 0.0 ? std::log(lam) : -kInf, floor_log);
    }
    c.loglog_lambda = std::log(c.log_lambda);
  } else if (std::isfinite(prev)) {
    c.log_lambda = kInf;
    c.loglog_lambda = prev;
  } else {
    throw OverflowError("log-GN recipe: no lambda representable even in log-log space");
  }

  // C_eps = 2^q (2 lambda)^q |Omega|
  c.log_C_eps = q * std::log(2.0) + q * (std::log(2.0) + c.log_lambda) + std::log(grid.area());
  c.loglog_C_eps = std::isfinite(c.log_C_eps) ? std::log(std::max(c.log_C_eps, 1e-300))
                                              : std::log(q) + c.loglog_lambda;
  return c;
}

LogGnResult log_gn_check(const Field2D& phi, int m, double q, double r, double eps) {
  return log_gn_check(phi, m, q, r, eps, log_gn_constants(phi.grid(), m, q, r, eps));
}

LogGnResult log_gn_check(const Field2D& phi, int m, double q, double r, double eps,
                         const LogGnConstants& c) {
  LogGnResult res;
  res.constants = c;
  const double lq = lebesgue(phi, q);
  res.lhs = std::pow(lq, q);

  const double k = e_tower(m);
  double gsum = 0.0;
  for (double x : phi.values()) {
    const double s = std::abs(x);
    gsum += std::pow((s + k) * iter_log_shifted(m, s, m), r);
  }
  gsum *= phi.grid().cell_area();
  res.eps_term = eps * std::pow(grad_norm(phi, 2.0), q - r) * gsum;
  res.c_term = c.C * std::pow(lebesgue(phi, r), q);

  auto safe_log = [](double x) { return x > 0.0 ? std::log(x) : -kInf; };
  res.log_rhs = log_sum_exp({safe_log(res.eps_term), safe_log(res.c_term), c.log_C_eps});
  res.holds = res.lhs == 0.0 || safe_log(res.lhs) <= res.log_rhs;
  return res;
}

}  // namespace chemohapto
