#include "chemohapto/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "chemohapto/error.hpp"

namespace chemohapto {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

bool bare_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

double parse_number(const std::string& tok, int line) {
  std::string t;
  for (char c : tok)
    if (c != '_') t += c;
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError("cannot parse value '" + tok + "'", line);
  if (!std::isfinite(x)) throw ConfigError("value '" + tok + "' is not finite", line);
  return x;
}

// Strips a trailing comment, leaving '#' inside strings alone.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_str && c == '\\') {
      ++i;
      continue;
    }
    if (c == '"') in_str = !in_str;
    if (c == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

ConfigValue parse_value(const std::string& raw, int line) {
  ConfigValue v;
  v.line = line;
  if (raw.empty()) throw ConfigError("missing value", line);
  if (raw.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < raw.size(); ++i) {
      const char c = raw[i];
      if (c == '\\') {
        if (++i >= raw.size()) break;
        switch (raw[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw ConfigError(std::string("unknown escape \\") + raw[i], line);
        }
        continue;
      }
      if (c == '"') break;
      out += c;
    }
    if (i >= raw.size()) throw ConfigError("unterminated string", line);
    if (!trim(raw.substr(i + 1)).empty()) throw ConfigError("trailing characters after string", line);
    v.data = out;
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.data = raw == "true";
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError("arrays must open and close on one line", line);
    std::vector<double> arr;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        if (ss.eof()) break;
        throw ConfigError("empty array element", line);
      }
      arr.push_back(parse_number(item, line));
    }
    if (arr.empty()) throw ConfigError("empty array", line);
    v.data = arr;
    return v;
  }
  v.data = parse_number(raw, line);
  return v;
}

// Typed access with key bookkeeping so unknown keys can be reported.
class Reader {
 public:
  Reader(const ConfigDocument& doc, RunConfig& cfg) : doc_(doc), cfg_(cfg) {}

  const ConfigValue* find(const std::string& sec, const std::string& key) {
    const auto s = doc_.find(sec);
    if (s == doc_.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    used_.insert(sec + "." + key);
    cfg_.lines[sec + "." + key] = k->second.line;
    return &k->second;
  }

  void number(const std::string& sec, const std::string& key, double& out) {
    if (const ConfigValue* v = find(sec, key)) {
      if (const double* d = std::get_if<double>(&v->data))
        out = *d;
      else
        throw ConfigError(sec + "." + key + " must be a number", v->line);
    }
  }

  void integer(const std::string& sec, const std::string& key, int& out) {
    if (const ConfigValue* v = find(sec, key)) {
      const double* d = std::get_if<double>(&v->data);
      if (!d || *d != std::floor(*d) || std::abs(*d) > 1e9)
        throw ConfigError(sec + "." + key + " must be an integer", v->line);
      out = static_cast<int>(*d);
    }
  }

  void flag(const std::string& sec, const std::string& key, bool& out) {
    if (const ConfigValue* v = find(sec, key)) {
      if (const bool* b = std::get_if<bool>(&v->data))
        out = *b;
      else
        throw ConfigError(sec + "." + key + " must be true or false", v->line);
    }
  }

  void text(const std::string& sec, const std::string& key, std::string& out) {
    if (const ConfigValue* v = find(sec, key)) {
      if (const std::string* s = std::get_if<std::string>(&v->data))
        out = *s;
      else
        throw ConfigError(sec + "." + key + " must be a quoted string", v->line);
    }
  }

  void list(const std::string& sec, const std::string& key, std::vector<double>& out) {
    if (const ConfigValue* v = find(sec, key)) {
      if (const double* d = std::get_if<double>(&v->data))
        out = {*d};
      else if (const auto* a = std::get_if<std::vector<double>>(&v->data))
        out = *a;
      else
        throw ConfigError(sec + "." + key + " must be a number or an array of numbers", v->line);
    }
  }

  void check_unknown() const {
    for (const auto& [sec, keys] : doc_)
      for (const auto& [key, val] : keys)
        if (!used_.count(sec + "." + key)) {
          const std::string where = sec.empty() ? key : sec + "." + key;
          throw ConfigError("unknown key '" + where + "'", val.line);
        }
  }

 private:
  const ConfigDocument& doc_;
  RunConfig& cfg_;
  std::set<std::string> used_;
};

void read_preset(Reader& rd, const std::string& f, FieldPreset& p) {
  rd.text("ic", f, p.kind);
  rd.number("ic", f + "_value", p.value);
  rd.number("ic", f + "_amplitude", p.amplitude);
  rd.integer("ic", f + "_mode_x", p.mode_x);
  rd.integer("ic", f + "_mode_y", p.mode_y);
  rd.list("ic", f + "_cx", p.cx);
  rd.list("ic", f + "_cy", p.cy);
  rd.list("ic", f + "_sigma", p.sigma);
  rd.list("ic", f + "_amp", p.amp);
  rd.number("ic", f + "_mass", p.mass);
  rd.integer("ic", f + "_modes", p.modes);
  rd.text("ic", f + "_path", p.path);
}

}  // namespace

ConfigDocument parse_config_document(const std::string& text) {
  ConfigDocument doc;
  std::string section;
  doc[section];
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!bare_key(section)) throw ConfigError("malformed section name '" + section + "'", line);
      doc[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    if (!bare_key(key)) throw ConfigError("malformed key '" + key + "'", line);
    auto& keys = doc[section];
    if (keys.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    keys[key] = parse_value(trim(s.substr(eq + 1)), line);
  }
  for (auto it = doc.begin(); it != doc.end();)
    it = it->second.empty() ? doc.erase(it) : std::next(it);
  return doc;
}

KineticSpec KineticsConfig::build() const {
  if (name == "zero") return KineticSpec::zero();
  if (name == "logistic") return KineticSpec::logistic(mu);
  if (name == "sublog_pow") return KineticSpec::sub_log_pow(a, b, gamma);
  if (name == "sublog_loglog") return KineticSpec::sub_log_log_log(a, b);
  if (name == "iterlog") return KineticSpec::iter_log(k, mu);
  throw InvalidInput("unknown kinetics '" + name +
                     "' (expected zero, logistic, sublog_pow, sublog_loglog or iterlog)");
}

RunConfig config_from_document(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
  for (const auto& [sec, keys] : doc) {
    static const std::set<std::string> known{"model", "grid", "ic", "time", "numerics",
                                             "output", "diagnostics", "check"};
    if (!known.count(sec)) {
      const int line = keys.empty() ? 0 : keys.begin()->second.line;
      throw ConfigError(sec.empty() ? "keys must follow a section header"
                                    : "unknown section [" + sec + "]",
                        line);
    }
  }

  RunConfig c;
  c.base_dir = base_dir;
  Reader rd(doc, c);
  rd.number("model", "chi", c.chi);
  rd.number("model", "xi", c.xi);
  rd.number("model", "tau", c.tau);
  rd.text("model", "kinetics", c.kinetics.name);
  rd.number("model", "mu", c.kinetics.mu);
  rd.number("model", "a", c.kinetics.a);
  rd.number("model", "b", c.kinetics.b);
  rd.number("model", "gamma", c.kinetics.gamma);
  rd.integer("model", "k", c.kinetics.k);

  rd.integer("grid", "nx", c.nx);
  rd.integer("grid", "ny", c.ny);
  rd.number("grid", "lx", c.lx);
  rd.number("grid", "ly", c.ly);

  read_preset(rd, "u", c.u);
  read_preset(rd, "v", c.v);
  read_preset(rd, "w", c.w);
  rd.number("ic", "A", c.A);
  rd.number("ic", "mass_scale", c.mass_scale);
  double seed = 0.0;
  rd.number("ic", "seed", seed);
  if (seed < 0.0 || seed != std::floor(seed) || seed > 9.0e15)
    throw ConfigError("ic.seed must be a nonnegative integer", c.lines["ic.seed"]);
  c.seed = static_cast<std::uint64_t>(seed);

  rd.number("time", "t_end", c.t_end);
  rd.number("time", "dt_max", c.numerics.dt_max);
  rd.number("time", "observe_every", c.observe_every);

  NumericsConfig& n = c.numerics;
  rd.number("numerics", "elliptic_tol", n.elliptic_tol);
  rd.integer("numerics", "max_cg_iter", n.max_cg_iter);
  rd.flag("numerics", "precondition", n.precondition);
  rd.number("numerics", "safety", n.safety);
  rd.number("numerics", "dt_min", n.dt_min);
  rd.number("numerics", "overflow_guard", n.overflow_guard);
  rd.number("numerics", "collapse_fraction", n.collapse_fraction);
  rd.number("numerics", "clip_gate", n.clip_gate);
  rd.integer("numerics", "threads", n.threads);

  rd.text("output", "dir", c.output.dir);
  rd.flag("output", "series", c.output.series);
  rd.flag("output", "report", c.output.report);
  rd.flag("output", "fields", c.output.fields);
  rd.flag("output", "svg", c.output.svg);

  rd.integer("diagnostics", "g_m", c.g_m);
  rd.flag("diagnostics", "identity", c.identity_residual);
  rd.integer("check", "r_max", c.r_max);

  rd.check_unknown();
  c.validate();
  return c;
}

void RunConfig::validate() const {
  auto fail = [&](const std::string& key, const std::string& msg) {
    const auto it = lines.find(key);
    throw ConfigError(key + ": " + msg, it == lines.end() ? 0 : it->second);
  };
  auto range = [](double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  };
  if (!(chi >= 0.0)) fail("model.chi", "must be >= 0, got " + range(chi));
  if (!(xi >= 0.0)) fail("model.xi", "must be >= 0, got " + range(xi));
  if (!(tau >= 0.0)) fail("model.tau", "must be >= 0, got " + range(tau));

  const std::string& kn = kinetics.name;
  if (kn != "zero" && kn != "logistic" && kn != "sublog_pow" && kn != "sublog_loglog" &&
      kn != "iterlog")
    fail("model.kinetics",
         "unknown kinetics '" + kn + "' (expected zero, logistic, sublog_pow, sublog_loglog or iterlog)");
  if ((kn == "logistic" || kn == "iterlog") && !(kinetics.mu > 0.0))
    fail("model.mu", "must lie in (0, inf), got " + range(kinetics.mu));
  if (kn == "sublog_pow" || kn == "sublog_loglog") {
    if (!(kinetics.b > 0.0)) fail("model.b", "must lie in (0, inf), got " + range(kinetics.b));
  }
  if (kn == "sublog_pow" && !(kinetics.gamma > 0.0 && kinetics.gamma < 1.0))
    fail("model.gamma", "must lie in (0, 1), got " + range(kinetics.gamma));
  if (kn == "iterlog" && (kinetics.k < 1 || kinetics.k > 4))
    fail("model.k", "must lie in [1, 4], got " + std::to_string(kinetics.k));

  if (nx < 4) fail("grid.nx", "must be >= 4, got " + std::to_string(nx));
  if (ny < 4) fail("grid.ny", "must be >= 4, got " + std::to_string(ny));
  if (!(lx > 0.0)) fail("grid.lx", "must be > 0, got " + range(lx));
  if (!(ly > 0.0)) fail("grid.ly", "must be > 0, got " + range(ly));

  const std::pair<const char*, const FieldPreset*> fields[] = {{"u", &u}, {"v", &v}, {"w", &w}};
  for (const auto& [name, p] : fields) {
    const std::string f = name;
    const std::string key = "ic." + f;
    if (p->kind != "homogeneous" && p->kind != "cosine" && p->kind != "gaussian" &&
        p->kind != "random" && p->kind != "file")
      fail(key, "unknown preset '" + p->kind +
                    "' (expected homogeneous, cosine, gaussian, random or file)");
    if (p->kind == "gaussian") {
      const std::size_t n =
          std::max({p->cx.size(), p->cy.size(), p->sigma.size(), p->amp.size()});
      for (const auto& [k, vec] : {std::pair{"_cx", &p->cx}, std::pair{"_cy", &p->cy},
                                    std::pair{"_sigma", &p->sigma}, std::pair{"_amp", &p->amp}})
        if (vec->size() != 1 && vec->size() != n)
          fail(key + k, "needs 1 or " + std::to_string(n) + " entries");
      for (double s : p->sigma)
        if (!(s > 0.0)) fail(key + "_sigma", "must be > 0, got " + range(s));
      if (p->mass < 0.0) fail(key + "_mass", "must be >= 0, got " + range(p->mass));
    }
    if (p->kind == "cosine" && (p->mode_x < 0 || p->mode_y < 0))
      fail(key + "_mode_x", "modes must be >= 0");
    if (p->kind == "random" && (p->modes < 1 || p->modes > 64))
      fail(key + "_modes", "must lie in [1, 64], got " + std::to_string(p->modes));
    if (p->kind == "file" && p->path.empty()) fail(key + "_path", "file preset needs a path");
  }
  if (!(mass_scale > 0.0)) fail("ic.mass_scale", "must be > 0, got " + range(mass_scale));

  if (!(t_end > 0.0)) fail("time.t_end", "must be > 0, got " + range(t_end));
  if (!(numerics.dt_max > 0.0)) fail("time.dt_max", "must be > 0, got " + range(numerics.dt_max));
  if (!(observe_every >= 0.0)) fail("time.observe_every", "must be >= 0");

  if (!(numerics.elliptic_tol > 0.0 && numerics.elliptic_tol < 1.0))
    fail("numerics.elliptic_tol", "must lie in (0, 1), got " + range(numerics.elliptic_tol));
  if (numerics.max_cg_iter < 0) fail("numerics.max_cg_iter", "must be >= 0");
  if (!(numerics.safety > 0.0 && numerics.safety <= 1.0))
    fail("numerics.safety", "must lie in (0, 1], got " + range(numerics.safety));
  if (!(numerics.dt_min > 0.0)) fail("numerics.dt_min", "must be > 0");
  if (!(numerics.overflow_guard > 0.0)) fail("numerics.overflow_guard", "must be > 0");
  if (!(numerics.collapse_fraction > 0.0 && numerics.collapse_fraction <= 1.0))
    fail("numerics.collapse_fraction", "must lie in (0, 1]");
  if (!(numerics.clip_gate >= 0.0)) fail("numerics.clip_gate", "must be >= 0");
  if (numerics.threads < 1) fail("numerics.threads", "must be >= 1");

  if (g_m < 1 || g_m > 3) fail("diagnostics.g_m", "must lie in [1, 3], got " + std::to_string(g_m));
  if (r_max < 1 || r_max > 4) fail("check.r_max", "must lie in [1, 4], got " + std::to_string(r_max));
  if (output.dir.empty()) fail("output.dir", "must not be empty");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  return config_from_document(parse_config_document(text), base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

Grid RunConfig::grid() const { return Grid(nx, ny, lx, ly); }

ModelParams RunConfig::model() const {
  ModelParams p;
  p.chi = chi;
  p.xi = xi;
  p.tau = tau;
  p.kinetics = kinetics.build();
  p.grid = grid();
  return p;
}

InitialData RunConfig::initial_data() const {
  const Grid g = grid();
  InitialData ic;
  ic.u0 = build_field(u, g, seed, base_dir);
  ic.u0 *= mass_scale;
  ic.v0 = build_field(v, g, seed + 1, base_dir);
  ic.w0 = build_field(w, g, seed + 2, base_dir);
  ic.A = A;
  return ic;
}

RunOptions RunConfig::run_options() const {
  RunOptions o;
  o.t_end = t_end;
  o.observe_every = observe_every > 0.0 ? observe_every : t_end / 128.0;
  o.identity_residual = identity_residual;
  o.g_m = g_m;
  return o;
}

bool is_sweep_axis(const std::string& name) {
  static const std::set<std::string> axes{"chi", "xi", "tau", "mu", "a", "b", "gamma", "k",
                                          "mass_scale"};
  return axes.count(name) > 0;
}

void apply_axis(RunConfig& cfg, const std::string& name, double value) {
  if (name == "chi") cfg.chi = value;
  else if (name == "xi") cfg.xi = value;
  else if (name == "tau") cfg.tau = value;
  else if (name == "mu") cfg.kinetics.mu = value;
  else if (name == "a") cfg.kinetics.a = value;
  else if (name == "b") cfg.kinetics.b = value;
  else if (name == "gamma") cfg.kinetics.gamma = value;
  else if (name == "k") {
    if (value != std::round(value)) throw InvalidInput("axis k takes integer values, got " + std::to_string(value));
    cfg.kinetics.k = static_cast<int>(std::lround(value));
  } else if (name == "mass_scale") cfg.mass_scale = value;
  else
    throw InvalidInput("unknown sweep axis '" + name +
                       "' (expected chi, xi, tau, mu, a, b, gamma, k or mass_scale)");
}

}  // namespace chemohapto
