#include "chemohapto/commands.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "chemohapto/condition.hpp"
#include "chemohapto/error.hpp"
#include "chemohapto/solver.hpp"
#include "chemohapto/sweep.hpp"
#include "chemohapto/verify.hpp"

namespace chemohapto {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

int config_failure(std::ostream& err, const std::string& what) {
  err << "error: " << what << "\n";
  return 2;
}

}  // namespace

RunConfig resolve_config(const std::filesystem::path& path, const CliOptions& opts) {
  RunConfig cfg = load_config(path);
  if (opts.out) cfg.output.dir = *opts.out;
  if (opts.threads) {
    if (*opts.threads < 1) throw ConfigError("--threads must be >= 1", 0);
    cfg.numerics.threads = *opts.threads;
  }
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

RunReport make_report(const std::string& command, const RunConfig& cfg) {
  RunReport rep;
  rep.command = command;
  rep.chi = cfg.chi;
  rep.xi = cfg.xi;
  rep.tau = cfg.tau;
  rep.kinetics = cfg.kinetics.build().describe();
  rep.nx = cfg.nx;
  rep.ny = cfg.ny;
  rep.lx = cfg.lx;
  rep.ly = cfg.ly;
  rep.seed = cfg.seed;
  return rep;
}

RunReport execute_run(const RunConfig& cfg, const std::filesystem::path& dir, const GnEstimate& gn,
                      std::vector<DiagnosticsRecord>* records) {
  const ModelParams params = cfg.model();
  InitialData ic = cfg.initial_data();
  ic.validate(params);

  RunReport rep = make_report("run", cfg);
  rep.threshold = check_theorem(params, ic, cfg.r_max, gn);

  Solver solver(params, cfg.numerics);
  RunOptions opts = cfg.run_options();
  std::vector<DiagnosticsRecord> seen;
  opts.observer = [&](const State&, const DiagnosticsRecord& r) { seen.push_back(r); };

  RunSummary sum;
  RunResult res;
  bool finished = false;
  try {
    res = solver.run(ic, opts);
    finished = true;
  } catch (const Error& e) {
    rep.error = e.what();
  }

  if (finished) {
    sum.diverged = res.diverged;
    sum.divergence_time = res.divergence_time;
    sum.divergence_reason = res.divergence_reason;
    sum.clip_valid = res.clip_valid;
    sum.steps = res.steps;
    sum.t_final = res.final_state.t;
    sum.bounds = res.bounds;
    sum.derived = res.derived;
    if (res.records.size() >= 16)
      sum.classification = classify_run(res.records, res.diverged);
    else if (res.diverged)
      sum.classification = RunClass::diverged;
    if (res.records.size() >= 2) sum.plateau = plateau_table(res.records, params.tau, params.grid.area());
  } else {
    sum.derived = derive_constants(params, ic);
    sum.t_final = seen.empty() ? 0.0 : seen.back().t;
  }
  if (!seen.empty()) sum.final_record = seen.back();
  rep.run = sum;

  std::filesystem::create_directories(dir);
  if (cfg.output.series) write_text(dir / "series.csv", series_csv(seen));
  if (finished) {
    const State& s = res.final_state;
    const std::pair<const char*, const Field2D*> fields[] = {{"u", &s.u}, {"v", &s.v}, {"w", &s.w}};
    for (const auto& [name, f] : fields) {
      const std::string base = std::string(name) + "_final";
      if (cfg.output.fields) write_field(dir / (base + ".bin"), *f);
      if (cfg.output.svg)
        write_text(dir / (base + ".svg"),
                   heatmap_svg(*f, std::string(name) + " at t = " + num(s.t)));
    }
  }
  if (cfg.output.report) write_text(dir / "report.json", report_json(rep));
  if (records) *records = std::move(seen);
  return rep;
}

std::string format_threshold_report(const ThresholdReport& t) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "mu_r estimates\n";
  for (const MuEstimate& e : t.mu_r_estimates)
    os << "  r = " << e.r << "  mu_r = " << (e.infinite ? std::string("+inf") : num(e.value)) << "\n";
  os << "u0 mass            " << t.u0_mass << "\n";
  os << "w0 max             " << t.w0_max << "\n";
  os << "M1                 " << t.M1 << "\n";
  os << "C_GN (4,2,2)       " << t.C_GN << "  best test field: " << t.gn_best_shape << "\n";
  os << "C_GN^4             " << t.C_GN4_bound << "\n";
  os << "chi, tau           " << t.chi << ", " << t.tau << "\n";
  os << "(chi - mu1)^+ M1   " << t.threshold_lhs << "\n";
  os << "1 / (2 C_GN^4)     " << t.threshold_rhs << "\n";
  os << "tau = 0 damping    " << (t.tau0_damping_holds ? "holds" : "does not hold") << "\n";
  os << "threshold          " << (t.threshold_inequality_holds ? "holds" : "does not hold") << "\n";
  os << "condition          " << to_string(t.condition_case) << "\n";
  return os.str();
}

int cmd_run(const std::string& config, const CliOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = resolve_config(config, opts);
  } catch (const Error& e) {
    return config_failure(err, e.what());
  }
  RunReport rep;
  const std::filesystem::path dir = cfg.output.dir;
  try {
    rep = execute_run(cfg, dir, gn_estimate(cfg.grid(), 4.0, 2.0, 2.0));
  } catch (const InvalidInput& e) {
    return config_failure(err, e.what());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  const RunSummary& s = *rep.run;
  out << "kinetics        " << rep.kinetics << "\n";
  out << "condition       " << to_string(rep.threshold->condition_case) << "\n";
  out << "steps           " << s.steps << "\n";
  out << "final time      " << num(s.t_final) << "\n";
  if (s.diverged)
    out << "diverged        at t = " << num(s.divergence_time) << " (" << s.divergence_reason << ")\n";
  out << "classification  " << (s.classification ? to_string(*s.classification) : "unclassified") << "\n";
  out << "clip valid      " << (s.clip_valid ? "yes" : "no") << "\n";
  out << "output          " << dir.string() << "\n";
  if (!rep.error.empty()) {
    err << "solver error: " << rep.error << "\n";
    return 1;
  }
  return 0;
}

int cmd_check(const std::string& config, const CliOptions& opts, std::ostream& out,
              std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = resolve_config(config, opts);
  } catch (const Error& e) {
    return config_failure(err, e.what());
  }
  try {
    const ModelParams params = cfg.model();
    InitialData ic = cfg.initial_data();
    ic.validate(params);
    RunReport rep = make_report("check", cfg);
    rep.threshold = check_theorem(params, ic, cfg.r_max);
    out << "kinetics           " << rep.kinetics << "\n";
    out << format_threshold_report(*rep.threshold);
    if (cfg.output.report) {
      const std::filesystem::path path = std::filesystem::path(cfg.output.dir) / "report.json";
      write_text(path, report_json(rep));
      out << "report             " << path.string() << "\n";
    }
  } catch (const InvalidInput& e) {
    return config_failure(err, e.what());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err) {
  try {
    const VerifyReport rep = run_verify_suite(suite);
    out << format_verify_report(rep);
    return rep.passed() ? 0 : 1;
  } catch (const InvalidInput& e) {
    return config_failure(err, e.what());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& axis_specs,
              const CliOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::vector<SweepAxis> axes;
  try {
    cfg = resolve_config(config, opts);
    if (axis_specs.empty()) throw InvalidInput("sweep needs at least one --axis");
    for (const std::string& a : axis_specs) axes.push_back(parse_sweep_axis(a));
  } catch (const Error& e) {
    return config_failure(err, e.what());
  }
  const std::filesystem::path dir = cfg.output.dir;
  SweepResult res;
  try {
    res = run_sweep(cfg, axes, dir, cfg.numerics.threads);
  } catch (const InvalidInput& e) {
    return config_failure(err, e.what());
  }
  write_text(dir / "sweep.csv", sweep_csv(res));
  const std::string summary = confusion_summary(res);
  write_text(dir / "summary.txt", summary);
  int failed = 0;
  for (const SweepPointResult& p : res.points)
    if (!p.error.empty()) {
      ++failed;
      err << "point " << p.index << " failed: " << p.error << "\n";
    }
  out << res.points.size() << " points, " << failed << " failed\n" << summary;
  out << "output " << dir.string() << "\n";
  return 0;
}

}  // namespace chemohapto
