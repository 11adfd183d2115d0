#include "chemohapto/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "chemohapto/commands.hpp"
#include "chemohapto/error.hpp"

namespace chemohapto {

namespace {

double parse_num(const std::string& s, const std::string& spec) {
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(x))
    throw InvalidInput("bad number '" + s + "' in axis '" + spec + "'");
  return x;
}

std::string fmt(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v;
  if (steps == 1) return {start};
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / (steps - 1);
    v.push_back(i + 1 == steps ? stop
                : log       ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                            : start + t * (stop - start));
  }
  return v;
}

SweepAxis parse_sweep_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw InvalidInput("axis '" + spec + "' must look like name=start:stop:steps[:log]");
  SweepAxis a;
  a.name = spec.substr(0, eq);
  if (!is_sweep_axis(a.name))
    throw InvalidInput("unknown sweep axis '" + a.name +
                       "' (expected chi, xi, tau, mu, a, b, gamma, k or mass_scale)");
  std::vector<std::string> parts;
  std::stringstream ss(spec.substr(eq + 1));
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.size() < 3 || parts.size() > 4)
    throw InvalidInput("axis '" + spec + "' must look like name=start:stop:steps[:log]");
  a.start = parse_num(parts[0], spec);
  a.stop = parse_num(parts[1], spec);
  const double steps = parse_num(parts[2], spec);
  if (steps < 1 || steps != std::floor(steps) || steps > static_cast<double>(kMaxSweepPoints))
    throw InvalidInput("axis '" + spec + "': steps must be an integer in [1, 10000]");
  a.steps = static_cast<int>(steps);
  if (parts.size() == 4) {
    if (parts[3] != "log") throw InvalidInput("axis '" + spec + "': the optional 4th field must be 'log'");
    a.log = true;
    if (!(a.start > 0.0 && a.stop > 0.0))
      throw InvalidInput("axis '" + spec + "': log spacing needs positive ends");
  }
  return a;
}

SweepResult run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                      const std::filesystem::path& out_dir, int threads) {
  if (threads < 1) throw InvalidInput("sweep needs at least one thread");
  std::vector<std::vector<double>> vals;
  std::size_t total = 1;
  for (const SweepAxis& a : axes) {
    vals.push_back(a.values());
    total *= vals.back().size();
    if (total > kMaxSweepPoints) throw InvalidInput("sweep exceeds 10000 points");
  }

  SweepResult res;
  for (const SweepAxis& a : axes) res.axes.push_back(a.name);
  res.points.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    SweepPointResult& pt = res.points[idx];
    pt.index = idx;
    std::size_t rem = idx;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const std::size_t n = vals[k].size();
      pt.coords.insert(pt.coords.begin(), {axes[k].name, vals[k][rem % n]});
      rem /= n;
    }
    char name[32];
    std::snprintf(name, sizeof name, "point_%04zu", idx);
    pt.dir = name;
  }

  const GnEstimate gn = gn_estimate(base.grid(), 4.0, 2.0, 2.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      SweepPointResult& pt = res.points[idx];
      try {
        RunConfig cfg = base;
        for (const auto& [name, value] : pt.coords) apply_axis(cfg, name, value);
        cfg.validate();
        std::vector<DiagnosticsRecord> records;
        const RunReport rep = execute_run(cfg, out_dir / pt.dir, gn, &records);
        if (rep.threshold) pt.condition_case = to_string(rep.threshold->condition_case);
        const RunSummary& run = *rep.run;
        pt.classification = run.classification ? to_string(*run.classification) : "unclassified";
        pt.diverged = run.diverged;
        pt.divergence_time = run.divergence_time;
        pt.clip_valid = run.clip_valid;
        pt.error = rep.error;
        for (const DiagnosticsRecord& r : records) {
          pt.peak_linf_u = std::max(pt.peak_linf_u, r.linf_u);
          pt.peak_mass = std::max(pt.peak_mass, r.mass);
          pt.peak_linf_grad_v = std::max(pt.peak_linf_grad_v, r.linf_grad_v);
        }
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  const int n = static_cast<int>(std::min<std::size_t>(threads, total));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();

  for (const SweepPointResult& pt : res.points) {
    std::string verdict = pt.condition_case.empty() ? "error"
                          : pt.condition_case == "not_satisfied" ? "not_satisfied"
                                                                 : "satisfied";
    const std::string cls = pt.classification.empty() ? "error" : pt.classification;
    ++res.confusion[{verdict, cls}];
  }
  return res;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "index";
  for (const std::string& a : r.axes) out += "," + a;
  out += ",condition_case,classification,diverged,divergence_time,peak_linf_u,peak_mass,"
         "peak_linf_grad_v,clip_valid,dir,error\n";
  for (const SweepPointResult& p : r.points) {
    out += std::to_string(p.index);
    for (const auto& c : p.coords) out += "," + fmt(c.second);
    out += "," + p.condition_case + "," + p.classification + "," + (p.diverged ? "true" : "false") +
           "," + fmt(p.divergence_time) + "," + fmt(p.peak_linf_u) + "," + fmt(p.peak_mass) + "," +
           fmt(p.peak_linf_grad_v) + "," + (p.clip_valid ? "true" : "false") + "," + p.dir + "," +
           csv_field(p.error) + "\n";
  }
  return out;
}

std::string confusion_summary(const SweepResult& r) {
  const std::vector<std::string> rows{"satisfied", "not_satisfied", "error"};
  std::vector<std::string> cols{"bounded_plateau", "growing", "diverged", "unclassified", "error"};
  std::ostringstream os;
  os << "verdict \\ classification";
  for (const std::string& c : cols) os << "  " << c;
  os << "\n";
  for (const std::string& row : rows) {
    os << row;
    for (const std::string& c : cols) {
      const auto it = r.confusion.find({row, c});
      os << "  " << (it == r.confusion.end() ? 0 : it->second);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace chemohapto
