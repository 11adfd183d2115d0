// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "chemohapto/commands.hpp"
#include "chemohapto/condition.hpp"
#include "chemohapto/config.hpp"
#include "chemohapto/diagnostics.hpp"
#include "chemohapto/io.hpp"
#include "chemohapto/kinetics.hpp"
#include "chemohapto/solver.hpp"
#include "chemohapto/verify.hpp"

namespace fs = std::filesystem;
using namespace chemohapto;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "!! ") + what;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs jobs[0..n) on `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (int t = 0; t < std::max(1, threads); ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
}

ModelParams make_params(const Grid& g, double chi, double xi, double tau, KineticSpec k) {
  ModelParams p;
  p.chi = chi;
  p.xi = xi;
  p.tau = tau;
  p.kinetics = k;
  p.grid = g;
  p.validate();
  return p;
}

InitialData smooth_data(const ModelParams& p, double mass) {
  const Grid& g = p.grid;
  InitialData ic;
  ic.u0 = Field2D::from_function(g, [](double x, double y) {
    return 1.0 + 0.6 * std::cos(kPi * x) * std::cos(2 * kPi * y) + 0.3 * std::cos(3 * kPi * y);
  });
  ic.u0 *= mass / integrate(ic.u0);
  ic.v0 = Field2D::from_function(g, [](double x, double) { return 0.4 + 0.2 * std::cos(kPi * x); });
  ic.w0 = Field2D::from_function(g, [](double x, double y) {
    return 0.5 + 0.25 * std::cos(kPi * x) * std::cos(kPi * y);
  });
  ic.validate(p);
  return ic;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceStudy lap = laplacian_convergence({32, 64, 128});
  for (std::size_t i = 0; i < lap.order.size(); ++i)
    require(o, std::abs(lap.order[i] - 2.0) <= 0.2, "laplacian order " + fmt("%.3f", lap.order[i]));
  double worst = 0.0;
  for (int n : {32, 64, 128}) worst = std::max(worst, conservation_defect(Grid(n, n), 7 + n));
  require(o, worst <= 1e-12, "conservation defect " + fmt("%.2e", worst) + " <= 1e-12");
  const double s = seconds_since(t0);
  require(o, s < 10.0, "runtime " + fmt("%.1f", s) + " s < 10 s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(128, 128);
  const ModelParams p = make_params(g, 0.0, 0.0, 0.0, KineticSpec::zero());
  InitialData ic;
  ic.u0 = Field2D::from_function(g, [](double x, double) { return 1.0 + 0.5 * std::cos(kPi * x); });
  ic.v0 = Field2D(g, 0.0);
  ic.w0 = Field2D(g, 0.0);
  ic.validate(p);
  const Field2D mode = Field2D::from_function(g, [](double x, double) { return std::cos(kPi * x); });
  Solver solver(p, NumericsConfig{});
  State s = solver.initial_state(ic);
  const double dt = 1e-4;
  const int steps = 1000;
  // Least-squares slope of ln(projection) against t.
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (int n = 0; n <= steps; ++n) {
    if (n > 0) solver.step(s, dt);
    const double t = n * dt;
    double proj = 0.0;
    for (std::size_t c = 0; c < mode.size(); ++c) proj += s.u[c] * mode[c];
    const double y = std::log(proj * g.cell_area());
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double cnt = steps + 1;
  const double rate = -(cnt * sty - st * sy) / (cnt * stt - st * st);
  const double rational = std::log1p(kPi * kPi * dt) / dt;
  const double e1 = std::abs(rate - rational) / rational;
  const double e2 = std::abs(rate - kPi * kPi) / (kPi * kPi);
  require(o, e1 <= 0.02, "rate " + fmt("%.5f", rate) + " vs ln(1+pi^2 dt)/dt " + fmt("%.5f", rational) +
                             " rel " + fmt("%.1e", e1) + " <= 2%");
  require(o, e2 <= 0.05, "vs pi^2 rel " + fmt("%.1e", e2) + " <= 5%");
  const double sec = seconds_since(t0);
  require(o, sec < 60.0, "runtime " + fmt("%.1f", sec) + " s < 60 s");
  return o;
}

struct BoundsRun {
  std::string name;
  RunResult result;
  double w0_max = 0.0;
  double m1 = 0.0;
  bool zero = false;
};

std::vector<BoundsRun> mass_law_runs() {
  const Grid g(48, 48);
  const std::vector<std::pair<std::string, KineticSpec>> kinetics = {
      {"logistic", KineticSpec::logistic(1.0)},
      {"sublog_pow", KineticSpec::sub_log_pow(1.0, 1.0, 0.5)},
      {"sublog_loglog", KineticSpec::sub_log_log_log(2.0, 1.0)},
      {"iterlog k=1", KineticSpec::iter_log(1, 1.0)},
      {"iterlog k=2", KineticSpec::iter_log(2, 1.0)},
  };
  std::vector<BoundsRun> runs;
  for (double tau : {0.0, 1.0})
    for (const auto& [name, spec] : kinetics) {
      const ModelParams p = make_params(g, 1.0, 0.5, tau, spec);
      const InitialData ic = smooth_data(p, 2.0);
      RunOptions opts;
      opts.t_end = 1.0;
      opts.observe_every = 0.01;
      opts.identity_residual = false;
      BoundsRun r;
      r.name = name + (tau == 0.0 ? " tau=0" : " tau=1");
      r.w0_max = ic.w0.max();
      r.m1 = m1_compute(spec, integrate(ic.u0), g.area(), r.w0_max);
      r.result = Solver(p, NumericsConfig{}).run(ic, opts);
      runs.push_back(std::move(r));
    }
  return runs;
}

Outcome criterion3(const std::vector<BoundsRun>& runs, RunResult& zero_run) {
  Outcome o;
  {
    const Grid g(48, 48);
    const ModelParams p = make_params(g, 1.0, 0.5, 1.0, KineticSpec::zero());
    const InitialData ic = smooth_data(p, 2.0);
    Solver solver(p, NumericsConfig{});
    State s = solver.initial_state(ic);
    const double m0 = integrate(s.u);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
      solver.step(s, 5e-4);
      worst = std::max(worst, std::abs(integrate(s.u) - m0) / m0);
    }
    require(o, worst <= 1e-9, "zero kinetics drift " + fmt("%.2e", worst) + " <= 1e-9 over 1000 steps");
    RunOptions opts;
    opts.t_end = 0.5;
    opts.observe_every = 0.01;
    opts.identity_residual = false;
    zero_run = solver.run(ic, opts);
  }
  int bad = 0;
  double margin = kInf;
  for (const BoundsRun& r : runs) {
    for (const DiagnosticsRecord& rec : r.result.records) {
      margin = std::min(margin, r.m1 + 1e-3 - rec.mass);
      if (rec.mass > r.m1 + 1e-3) ++bad;
    }
    if (r.result.diverged) {
      ++bad;
      require(o, false, r.name + " diverged: " + r.result.divergence_reason);
    }
  }
  require(o, bad == 0, std::to_string(runs.size()) + " kinetics runs, mass <= M1 + 1e-3 (min margin " +
                           fmt("%.3g", margin) + ")");
  return o;
}

Outcome criterion4(const std::vector<BoundsRun>& runs, const RunResult& zero_run) {
  Outcome o;
  std::vector<std::pair<const RunResult*, double>> all;
  for (const BoundsRun& r : runs) all.emplace_back(&r.result, r.w0_max);
  all.emplace_back(&zero_run, zero_run.derived.w0_max);
  double u_min = kInf, v_min = kInf, w_min = kInf, w_excess = -kInf, w_inc = -kInf;
  for (const auto& [res, w0max] : all) {
    u_min = std::min(u_min, res->bounds.u_min);
    v_min = std::min(v_min, res->bounds.v_min);
    w_min = std::min(w_min, res->bounds.w_min);
    w_excess = std::max(w_excess, res->bounds.w_max - w0max);
    w_inc = std::max(w_inc, res->bounds.w_increase_max);
  }
  require(o, u_min >= 0.0 && v_min >= 0.0, "min u " + fmt("%.2e", u_min) + ", min v " + fmt("%.2e", v_min));
  require(o, w_min >= 0.0 && w_excess <= 0.0,
          "min w " + fmt("%.2e", w_min) + ", max w - |w0|inf " + fmt("%.2e", w_excess));
  require(o, w_inc <= 0.0, "max pointwise w increase " + fmt("%.2e", w_inc));
  const ConvergenceStudy dw = delta_w_refinement({32, 64, 128});
  const bool negative = std::all_of(dw.error.begin(), dw.error.end(), [](double e) { return e <= 0.0; });
  std::string vals;
  for (double e : dw.error) vals += (vals.empty() ? "" : ", ") + fmt("%.2e", e);
  require(o, negative || dw.decreasing(), "-Laplace w violation over 32/64/128: " + vals);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const ConvergenceStudy s = identity_convergence({16, 32, 64}, 0);
  std::string vals;
  for (double e : s.error) vals += (vals.empty() ? "" : ", ") + fmt("%.2e", e);
  require(o, s.decreasing(), "residuals " + vals);
  require(o, s.min_order() >= 0.9, "min order " + fmt("%.3f", s.min_order()) + " >= 0.9");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (double w_max : {0.5, 1.0}) {
    require(o, mu_r_estimate(KineticSpec::logistic(1.0), 1, w_max).infinite,
            "logistic mu_1 = +inf (w_max " + fmt("%.1f", w_max) + ")");
    int bad = 0;
    double worst_k = 0.0;
    for (double mu : {0.5, 1.0, 2.0})
      for (int k = 1; k <= 4; ++k)
        for (int r = 1; r <= k; ++r) {
          const MuEstimate e = mu_r_estimate(KineticSpec::iter_log(k, mu), r, w_max);
          if (e.infinite) {
            ++bad;
          } else if (r < k) {
            if (!(std::abs(e.value) < 1e-2 * mu)) ++bad;
          } else {
            worst_k = std::max(worst_k, std::abs(e.value - mu) / mu);
            if (!(std::abs(e.value - mu) <= 0.05 * mu)) ++bad;
          }
        }
    require(o, bad == 0, "iterlog k=1..4, mu in {0.5,1,2}: worst |mu_k - mu|/mu " + fmt("%.1e", worst_k));
    for (int r = 1; r <= 3; ++r) {
      const MuEstimate e = mu_r_estimate(KineticSpec::zero(), r, w_max);
      if (e.infinite || e.value != 0.0) require(o, false, "zero kinetics mu_" + std::to_string(r));
    }
  }
  const double s = seconds_since(t0);
  require(o, s < 5.0, "runtime " + fmt("%.2f", s) + " s < 5 s");
  return o;
}

Outcome criterion7(const fs::path& config_dir, const fs::path& out, int threads) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig base = load_config(config_dir / "theorem-sweep.toml");
  struct Point {
    double chi;
    std::string kin;
    int k;
    RunReport rep;
  };
  std::vector<Point> pts;
  for (double chi : {0.5, 1.0, 2.0})
    for (const auto& [kin, k] : std::vector<std::pair<std::string, int>>{{"logistic", 1}, {"iterlog", 1}, {"iterlog", 2}})
      pts.push_back({chi, kin, k, {}});
  const GnEstimate gn = gn_estimate(base.grid(), 4, 2, 2);
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    RunConfig c = base;
    c.chi = pts[i].chi;
    c.kinetics.name = pts[i].kin;
    c.kinetics.k = pts[i].k;
    c.kinetics.mu = 1.0;
    c.numerics.threads = 1;
    c.validate();
    pts[i].rep = execute_run(c, out / ("c7_point_" + std::to_string(i)), gn);
  });
  for (const Point& p : pts) {
    const std::string tag = "chi " + fmt("%g", p.chi) + " " + p.kin + (p.kin == "iterlog" ? " k=" + std::to_string(p.k) : "");
    const bool satisfied = p.rep.threshold && p.rep.threshold->condition_case != ConditionCase::not_satisfied;
    const bool bounded = p.rep.run && p.rep.run->classification == RunClass::bounded_plateau;
    double worst = 0.0;
    if (p.rep.run)
      for (const PlateauEntry& e : p.rep.run->plateau) worst = std::max(worst, e.ratio);
    const bool ok = p.rep.error.empty() && satisfied && bounded && worst <= 1.05;
    std::string what = tag + ": " + (p.rep.threshold ? to_string(p.rep.threshold->condition_case) : "no check") +
                       ", " + (p.rep.run && p.rep.run->classification ? to_string(*p.rep.run->classification) : "unclassified") +
                       ", max plateau ratio " + fmt("%.4f", worst);
    if (!p.rep.error.empty()) what += ", error: " + p.rep.error;
    require(o, ok, what);
  }
  const double s = seconds_since(t0);
  require(o, s < 900.0, "runtime " + fmt("%.0f", s) + " s < 900 s");
  return o;
}

Outcome criterion8(const fs::path& config_dir, const fs::path& out, int threads) {
  Outcome o;
  const RunConfig base = load_config(config_dir / "blowup.toml");
  const std::vector<double> scales = {1.0, 30.0};
  std::vector<RunReport> reps(scales.size());
  const GnEstimate gn = gn_estimate(base.grid(), 4, 2, 2);
  parallel_for(scales.size(), threads, [&](std::size_t i) {
    RunConfig c = base;
    c.mass_scale = scales[i];
    c.numerics.threads = 1;
    reps[i] = execute_run(c, out / ("c8_scale_" + fmt("%g", scales[i])), gn);
  });
  const auto& small = reps[0].run;
  const auto& large = reps[1].run;
  require(o, small && small->classification == RunClass::bounded_plateau,
          "mass 2: " + (small && small->classification ? to_string(*small->classification) : "unclassified"));
  const bool fired = large && large->diverged && large->divergence_time < base.t_end;
  require(o, fired, "mass 60: " + (large && large->diverged ? "diverged at t = " + fmt("%.4f", large->divergence_time) +
                                                                  " (" + large->divergence_reason + ")"
                                                            : "no divergence"));
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (int m : {1, 2}) {
    const int f = log_gn_failures(Grid(64, 64), m, 3.0, 1.0, 0.1, 50, 4242 + m);
    require(o, f == 0, "m = " + std::to_string(m) + ": " + std::to_string(f) + "/50 failures");
  }
  return o;
}

Outcome criterion10(const fs::path& config_dir, const fs::path& out) {
  Outcome o;
  RunConfig c = load_config(config_dir / "logistic-tau1.toml");
  c.seed = 11;
  c.numerics.threads = 1;
  const GnEstimate gn = gn_estimate(c.grid(), 4, 2, 2);
  const fs::path a = out / "c10_a", b = out / "c10_b";
  execute_run(c, a, gn);
  execute_run(c, b, gn);
  const std::string sa = read_text(a / "series.csv"), sb = read_text(b / "series.csv");
  require(o, !sa.empty() && sa == sb, "series.csv byte-identical (" + std::to_string(sa.size()) + " bytes)");

  const std::string text = read_text(a / "report.json");
  const RunReport r = parse_report_json(text);
  bool exact = report_json(r) == text;
  if (r.threshold && r.run && r.run->final_record) {
    const RunReport r2 = parse_report_json(report_json(r));
    exact = exact && r2.threshold->M1 == r.threshold->M1 && r2.threshold->C_GN == r.threshold->C_GN &&
            r2.run->final_record->linf_u == r.run->final_record->linf_u &&
            r2.run->divergence_time == r.run->divergence_time;
  } else {
    exact = false;
  }
  require(o, exact, "report.json re-serializes to identical text and fields");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string out = "acceptance_out";
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<int> only;
  app.add_option("--out", out, "scratch directory for run artifacts");
  app.add_option("--threads", threads, "workers for the multi-run criteria")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const fs::path out_dir = out;
  const fs::path config_dir = CHEMOHAPTO_CONFIG_DIR;
  fs::create_directories(out_dir);
  const std::set<int> wanted(only.begin(), only.end());

  std::vector<BoundsRun> runs;
  RunResult zero_run;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"operator correctness", criterion1},
      {"diffusion decay anchor", criterion2},
      {"mass law",
       [&] {
         if (runs.empty()) runs = mass_law_runs();
         return criterion3(runs, zero_run);
       }},
      {"structural bounds",
       [&] {
         if (runs.empty()) {
           runs = mass_law_runs();
           criterion3(runs, zero_run);
         }
         return criterion4(runs, zero_run);
       }},
      {"energy identity convergence", criterion5},
      {"kinetics analytics", criterion6},
      {"theorem embodiment sweep", [&] { return criterion7(config_dir, out_dir, threads); }},
      {"blow-up contrast", [&] { return criterion8(config_dir, out_dir, threads); }},
      {"log-GN checker", criterion9},
      {"determinism and round-trip", [&] { return criterion10(config_dir, out_dir); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s [%.1f s]: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
