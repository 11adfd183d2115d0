#include "chemohapto/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "chemohapto/condition.hpp"
#include "chemohapto/config.hpp"
#include "chemohapto/diagnostics.hpp"
#include "chemohapto/elliptic.hpp"
#include "chemohapto/error.hpp"
#include "chemohapto/kinetics.hpp"
#include "chemohapto/solver.hpp"

namespace chemohapto {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void fill_orders(ConvergenceStudy& s) {
  const std::vector<double>& x = s.variable == "dt" ? s.dt : s.h;
  s.order.clear();
  for (std::size_t i = 0; i + 1 < s.error.size(); ++i)
    s.order.push_back(std::log(s.error[i] / s.error[i + 1]) / std::log(x[i] / x[i + 1]));
}

double max_abs_diff(const Field2D& a, const Field2D& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) m = std::max(m, std::abs(a[c] - b[c]));
  return m;
}

Field2D random_smooth(const Grid& g, std::uint64_t seed, double value, double amplitude) {
  FieldPreset p;
  p.kind = "random";
  p.value = value;
  p.amplitude = amplitude;
  p.modes = 6;
  return build_field(p, g, seed);
}

// Smooth full-model data used by the identity and -Delta w studies.
struct SmoothSetup {
  ModelParams params;
  InitialData ic;
};

SmoothSetup smooth_setup(int n) {
  SmoothSetup s;
  s.params.chi = 1.0;
  s.params.xi = 0.5;
  s.params.tau = 1.0;
  s.params.kinetics = KineticSpec::logistic(1.0);
  s.params.grid = Grid(n, n);
  const Grid& g = s.params.grid;
  s.ic.u0 = Field2D::from_function(g, [](double x, double y) {
    return 1.0 + 0.5 * std::cos(kPi * x) * std::cos(kPi * y);
  });
  s.ic.v0 = Field2D::from_function(g, [](double x, double) { return 0.5 + 0.25 * std::cos(kPi * x); });
  s.ic.w0 = Field2D::from_function(g, [](double, double y) { return 0.5 + 0.25 * std::cos(kPi * y); });
  s.ic.validate(s.params);
  return s;
}

}  // namespace

bool ConvergenceStudy::decreasing() const {
  for (std::size_t i = 0; i + 1 < error.size(); ++i)
    if (!(error[i + 1] < error[i])) return false;
  return true;
}

double ConvergenceStudy::min_order() const {
  if (order.empty()) return kInf;
  return *std::min_element(order.begin(), order.end());
}

ConvergenceStudy laplacian_convergence(const std::vector<int>& levels) {
  ConvergenceStudy s;
  s.title = "Neumann Laplacian, max error";
  s.variable = "h";
  for (int n : levels) {
    const Grid g(n, n);
    const Field2D f = Field2D::from_function(g, [](double x, double y) {
      return std::cos(kPi * x) * std::cos(kPi * y);
    });
    Field2D exact = f;
    exact *= -2.0 * kPi * kPi;
    s.n.push_back(n);
    s.h.push_back(g.hx());
    s.dt.push_back(0.0);
    s.error.push_back(max_abs_diff(laplacian_neumann(f), exact));
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy taxis_convergence(const std::vector<int>& levels) {
  ConvergenceStudy s;
  s.title = "taxis divergence, max error";
  s.variable = "h";
  for (int n : levels) {
    const Grid g(n, n);
    auto u = [](double x, double y) { return 2.0 + std::cos(kPi * x) * std::cos(2.0 * kPi * y); };
    auto phi = [](double x, double y) { return std::cos(kPi * x) + 0.5 * std::cos(kPi * y); };
    const Field2D exact = Field2D::from_function(g, [&](double x, double y) {
      const double ux = -kPi * std::sin(kPi * x) * std::cos(2.0 * kPi * y);
      const double uy = -2.0 * kPi * std::cos(kPi * x) * std::sin(2.0 * kPi * y);
      const double px = -kPi * std::sin(kPi * x), py = -0.5 * kPi * std::sin(kPi * y);
      const double lap = -kPi * kPi * std::cos(kPi * x) - 0.5 * kPi * kPi * std::cos(kPi * y);
      return ux * px + uy * py + u(x, y) * lap;
    });
    const Field2D got =
        taxis_divergence(Field2D::from_function(g, u), Field2D::from_function(g, phi));
    s.n.push_back(n);
    s.h.push_back(g.hx());
    s.dt.push_back(0.0);
    s.error.push_back(max_abs_diff(got, exact));
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy identity_convergence(const std::vector<int>& levels, int m) {
  ConvergenceStudy s;
  s.variable = "dt";
  s.title = m == 0 ? "entropy identity residual" : "ln^[" + std::to_string(m) + "] identity residual";
  const IdentityKernel kernel = m == 0 ? log_kernel() : iterlog_kernel(m);
  constexpr double t_end = 0.01;
  for (int n : levels) {
    SmoothSetup setup = smooth_setup(n);
    Solver solver(setup.params, NumericsConfig{});
    const double h = setup.params.grid.hx();
    const long steps = std::lround(std::ceil(t_end / (0.25 * h * h)));
    const double dt = t_end / steps;
    State st = solver.initial_state(setup.ic);
    State before = st;
    for (long k = 0; k < steps; ++k) {
      before = st;
      solver.step(st, dt);
    }
    s.n.push_back(n);
    s.h.push_back(h);
    s.dt.push_back(dt);
    s.error.push_back(identity_terms(kernel, before, st, setup.params, dt).residual());
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy delta_w_refinement(const std::vector<int>& levels) {
  ConvergenceStudy s;
  s.title = "max of -Laplace w - tau w0_max v - kappa";
  s.variable = "h";
  for (int n : levels) {
    SmoothSetup setup = smooth_setup(n);
    Solver solver(setup.params, NumericsConfig{});
    RunOptions opts;
    opts.t_end = 0.05;
    opts.observe_every = 0.005;
    opts.identity_residual = false;
    const RunResult res = solver.run(setup.ic, opts);
    double worst = -kInf;
    for (const DiagnosticsRecord& r : res.records) worst = std::max(worst, r.delta_w_violation_max);
    s.n.push_back(n);
    s.h.push_back(setup.params.grid.hx());
    s.dt.push_back(0.0);
    s.error.push_back(worst);
  }
  s.order.clear();
  for (std::size_t i = 0; i + 1 < s.error.size(); ++i)
    s.order.push_back(s.error[i] > 0.0 && s.error[i + 1] > 0.0
                          ? std::log(s.error[i] / s.error[i + 1]) / std::log(s.h[i] / s.h[i + 1])
                          : std::numeric_limits<double>::quiet_NaN());
  return s;
}

double conservation_defect(const Grid& g, std::uint64_t seed) {
  const Field2D u = random_smooth(g, seed, 1.0, 0.9);
  const Field2D phi = random_smooth(g, seed + 17, 0.0, 3.0);
  auto rel = [](const Field2D& f) {
    double s = 0.0, a = 0.0;
    for (double x : f.values()) {
      s += x;
      a += std::abs(x);
    }
    return a > 0.0 ? std::abs(s) / a : 0.0;
  };
  double worst = std::max(rel(laplacian_neumann(phi)), rel(taxis_divergence(u, phi)));
  const TransportResult tr = upwind_transport_step(u, phi, 0.5 * g.hx());
  worst = std::max(worst, std::abs(integrate(tr.u) - integrate(u)) / integrate(u));
  return worst;
}

IterlogPositivity iterlog_positivity(int m, int points) {
  IterlogPositivity out{kInf, kInf};
  const double k = e_tower(m);
  auto h = [m](double z) { return iter_log_shifted(m, z, m); };
  for (int p = 0; p < points; ++p) {
    const double z = std::pow(10.0, -6.0 + 18.0 * p / (points - 1));
    const double d = 1e-4 * (z + k);
    const double zm = std::max(z - d, 0.0), zp = z + d;
    const double first = (h(zp) - h(zm)) / (zp - zm);
    const double hz = h(z), hp = h(z + d), hm = z - d >= 0.0 ? h(z - d) : 2.0 * hz - hp;
    const double second = (hp - 2.0 * hz + hm) / (d * d);
    out.min_first = std::min(out.min_first, first);
    out.min_weight = std::min(out.min_weight, 2.0 * first + (z + k) * second);
  }
  return out;
}

int f_source_cap_violations(int samples, std::uint64_t seed) {
  const std::vector<KineticSpec> specs = {
      KineticSpec::logistic(1.0),          KineticSpec::logistic(0.3),
      KineticSpec::sub_log_pow(1.0, 1.0, 0.5), KineticSpec::sub_log_pow(-0.5, 2.0, 0.9),
      KineticSpec::sub_log_log_log(1.0, 1.0),  KineticSpec::sub_log_log_log(2.0, 0.5),
      KineticSpec::iter_log(1, 1.0),       KineticSpec::iter_log(2, 1.0),
      KineticSpec::iter_log(2, 0.2),       KineticSpec::iter_log(3, 1.0),
      KineticSpec::iter_log(4, 1.0)};
  std::mt19937_64 rng(seed);
  int bad = 0;
  for (const KineticSpec& spec : specs)
    for (int i = 0; i < samples; ++i) {
      const double s = std::pow(10.0, -8.0 + 16.0 * unit(rng));
      const double w = 2.0 * unit(rng);
      if (!(eval_f(spec, s, w) <= spec.cap_a() - spec.cap_b() * s + 1e-12)) ++bad;
    }
  return bad;
}

int log_gn_failures(const Grid& g, int m, double q, double r, double eps, int count,
                    std::uint64_t seed) {
  const LogGnConstants c = log_gn_constants(g, m, q, r, eps);
  std::mt19937_64 rng(seed);
  int failures = 0;
  for (int k = 0; k < count; ++k) {
    const double scale = std::pow(10.0, -6.0 + 12.0 * unit(rng));
    Field2D phi = random_smooth(g, rng(), 1.0, 0.95 * unit(rng));
    phi *= scale;
    const double spike = std::pow(10.0, 6.0 * unit(rng)) * scale;
    const double cx = unit(rng), cy = unit(rng), sig = 0.02 + 0.2 * unit(rng);
    phi += Field2D::from_function(g, [&](double x, double y) {
      return spike * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * sig * sig));
    });
    if (!log_gn_check(phi, m, q, r, eps, c).holds) ++failures;
  }
  return failures;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"operators", "identity", "iterlog", "loggn"};
  return names;
}

VerifyReport run_verify_suite(const std::string& suite) {
  VerifyReport rep;
  rep.suite = suite;
  auto add = [&](std::string name, double value, std::string req, bool ok) {
    rep.checks.push_back({std::move(name), value, std::move(req), ok});
  };

  if (suite == "operators") {
    const ConvergenceStudy lap = laplacian_convergence();
    for (std::size_t i = 0; i < lap.order.size(); ++i)
      add("laplacian order " + std::to_string(lap.n[i]) + "->" + std::to_string(lap.n[i + 1]),
          lap.order[i], "|order - 2| <= 0.2", std::abs(lap.order[i] - 2.0) <= 0.2);
    const ConvergenceStudy tax = taxis_convergence();
    add("taxis divergence min order", tax.min_order(), ">= 0.9", tax.min_order() >= 0.9);
    for (int n : {32, 64, 128}) {
      const double d = conservation_defect(Grid(n, n), 7 + n);
      add("conservation defect " + std::to_string(n) + "^2", d, "<= 1e-12", d <= 1e-12);
    }
    {
      const Grid g(64, 48, 1.0, 0.75);
      const Field2D b = random_smooth(g, 3, 1.0, 0.8);
      Field2D x(g);
      HelmholtzSolver hs(g);
      hs.solve(1.0, 0.1, b, x, 1e-10);
      const Field2D ax = apply_helmholtz(1.0, 0.1, x);
      const double rel = max_abs_diff(ax, b) / norm(b, kInfNorm);
      add("helmholtz residual (64x48)", rel, "<= 1e-9", rel <= 1e-9);
    }
    {
      const Grid g(48, 48);
      const Field2D u = random_smooth(g, 11, 1.0, 0.5);
      const Field2D phi = random_smooth(g, 12, 0.0, 1.0);
      const double e1 = max_abs_diff(laplacian_neumann(reflect_x(phi)), reflect_x(laplacian_neumann(phi)));
      const double e2 = max_abs_diff(taxis_divergence(reflect_y(u), reflect_y(phi)),
                                     reflect_y(taxis_divergence(u, phi)));
      const double scale = norm(taxis_divergence(u, phi), kInfNorm) + norm(laplacian_neumann(phi), kInfNorm);
      add("reflection equivariance", (e1 + e2) / scale, "<= 1e-12", (e1 + e2) / scale <= 1e-12);
    }
    rep.studies = {lap, tax};
  } else if (suite == "identity") {
    const ConvergenceStudy ln = identity_convergence({16, 32, 64}, 0);
    add("entropy identity residual decreasing", ln.decreasing() ? 1.0 : 0.0, "monotone", ln.decreasing());
    add("entropy identity min order (dt)", ln.min_order(), ">= 0.9", ln.min_order() >= 0.9);
    const ConvergenceStudy l1 = identity_convergence({16, 32, 64}, 1);
    add("ln^[1] identity residual decreasing", l1.decreasing() ? 1.0 : 0.0, "monotone", l1.decreasing());
    add("ln^[1] identity min order (dt)", l1.min_order(), ">= 0.9", l1.min_order() >= 0.9);
    const ConvergenceStudy dw = delta_w_refinement();
    const bool negative = std::all_of(dw.error.begin(), dw.error.end(), [](double e) { return e <= 0.0; });
    add("-Laplace w bound violation", *std::max_element(dw.error.begin(), dw.error.end()),
        "<= 0, or decreasing under refinement", negative || dw.decreasing());
    rep.studies = {ln, l1, dw};
  } else if (suite == "iterlog") {
    for (int m = 1; m <= 3; ++m) {
      const IterlogPositivity p = iterlog_positivity(m);
      add("h' > 0, m = " + std::to_string(m), p.min_first, "> 0", p.min_first > 0.0);
      add("2h' + (z + e^[m]) h'' > 0, m = " + std::to_string(m), p.min_weight, "> 0",
          p.min_weight > 0.0);
    }
    const int bad = f_source_cap_violations(10000, 5);
    add("f <= a' - b' s violations", bad, "== 0", bad == 0);
    for (int k = 1; k <= 4; ++k) {
      const KineticSpec spec = KineticSpec::iter_log(k, 1.0);
      for (int r = 1; r <= k; ++r) {
        const MuEstimate e = mu_r_estimate(spec, r, 1.0);
        const std::string name = "mu_" + std::to_string(r) + " of iterlog k=" + std::to_string(k);
        if (r < k)
          add(name, e.value, "|mu_r| < 1e-2", !e.infinite && std::abs(e.value) < 1e-2);
        else
          add(name, e.value, "|mu_k - 1| <= 0.05", !e.infinite && std::abs(e.value - 1.0) <= 0.05);
      }
    }
    const MuEstimate lg = mu_r_estimate(KineticSpec::logistic(1.0), 1, 1.0);
    add("mu_1 of logistic", lg.value, "+inf", lg.infinite);
  } else if (suite == "loggn") {
    for (int n : {32, 64, 128})
      for (int m : {1, 2}) {
        const int f = log_gn_failures(Grid(n, n), m, 3.0, 1.0, 0.1, 50, 1000 + n + m);
        add("log-GN failures, m = " + std::to_string(m) + ", " + std::to_string(n) + "^2", f, "== 0",
            f == 0);
      }
  } else {
    throw InvalidInput("unknown verify suite '" + suite + "' (expected operators, identity, iterlog or loggn)");
  }
  return rep;
}

std::string format_study(const ConvergenceStudy& s) {
  std::ostringstream os;
  os << s.title << " (order in " << s.variable << ")\n";
  os << "  " << std::setw(6) << "n" << std::setw(14) << "h" << std::setw(14) << "dt" << std::setw(16)
     << "error" << std::setw(10) << "order\n";
  for (std::size_t i = 0; i < s.error.size(); ++i) {
    os << "  " << std::setw(6) << s.n[i] << std::setw(14) << std::setprecision(6) << s.h[i]
       << std::setw(14) << s.dt[i] << std::setw(16) << std::setprecision(8) << s.error[i];
    if (i > 0) os << std::setw(10) << std::setprecision(4) << s.order[i - 1];
    os << "\n";
  }
  return os.str();
}

std::string format_verify_report(const VerifyReport& r) {
  std::ostringstream os;
  os << "suite " << r.suite << "\n";
  for (const ConvergenceStudy& s : r.studies) os << format_study(s);
  for (const VerifyCheck& c : r.checks)
    os << (c.passed ? "PASS  " : "FAIL  ") << c.name << " = " << std::setprecision(6) << c.value
       << "  (" << c.requirement << ")\n";
  os << (r.passed() ? "suite passed\n" : "suite FAILED\n");
  return os.str();
}

}  // namespace chemohapto
