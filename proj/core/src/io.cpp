#include "chemohapto/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "chemohapto/error.hpp"

namespace chemohapto {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

constexpr char kMagic[8] = {'C', 'H', 'F', 'I', 'E', 'L', 'D', '1'};
constexpr std::size_t kHeaderBytes = 32;

double DiagnosticsRecord::*const kSeriesMembers[13] = {
    &DiagnosticsRecord::t,           &DiagnosticsRecord::mass,
    &DiagnosticsRecord::l2_u,        &DiagnosticsRecord::linf_u,
    &DiagnosticsRecord::entropy,     &DiagnosticsRecord::g_m,
    &DiagnosticsRecord::grad_v_l4,   &DiagnosticsRecord::linf_grad_v,
    &DiagnosticsRecord::linf_grad_w, &DiagnosticsRecord::identity_residual,
    &DiagnosticsRecord::delta_w_violation_max, &DiagnosticsRecord::clipped_mass,
    &DiagnosticsRecord::dt};

void append_number(std::string& out, double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  out.append(buf, r.ptr);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw InvalidInput("cannot parse number '" + std::string(s) + "'");
  return x;
}

// --- json helpers ------------------------------------------------------

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double get_num(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw InvalidInput(std::string("report field '") + key + "' is not a number");
  }
  return v.get<double>();
}

json record_json(const DiagnosticsRecord& r) {
  json j = json::object();
  for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) j[kSeriesColumns[c]] = num(r.*kSeriesMembers[c]);
  return j;
}

DiagnosticsRecord record_from(const json& j) {
  DiagnosticsRecord r;
  for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) r.*kSeriesMembers[c] = get_num(j, kSeriesColumns[c]);
  return r;
}

json threshold_json(const ThresholdReport& t) {
  json mu = json::array();
  for (const MuEstimate& e : t.mu_r_estimates)
    mu.push_back({{"r", e.r}, {"value", e.infinite ? json(nullptr) : num(e.value)}, {"infinite", e.infinite}});
  return {{"mu_r_estimates", mu},
          {"M1", num(t.M1)},
          {"u0_mass", num(t.u0_mass)},
          {"w0_max", num(t.w0_max)},
          {"condition_case", to_string(t.condition_case)},
          {"C_GN", num(t.C_GN)},
          {"C_GN4_bound", num(t.C_GN4_bound)},
          {"gn_best_shape", t.gn_best_shape},
          {"chi", num(t.chi)},
          {"tau", num(t.tau)},
          {"mu1", t.mu1_infinite ? json(nullptr) : num(t.mu1)},
          {"mu1_infinite", t.mu1_infinite},
          {"threshold_lhs", num(t.threshold_lhs)},
          {"threshold_rhs", num(t.threshold_rhs)},
          {"tau0_damping_holds", t.tau0_damping_holds},
          {"threshold_inequality_holds", t.threshold_inequality_holds}};
}

ThresholdReport threshold_from(const json& j) {
  ThresholdReport t;
  for (const json& e : j.at("mu_r_estimates")) {
    MuEstimate m;
    m.r = e.at("r").get<int>();
    m.infinite = e.at("infinite").get<bool>();
    m.value = m.infinite ? std::numeric_limits<double>::infinity() : get_num(e, "value");
    t.mu_r_estimates.push_back(m);
  }
  t.M1 = get_num(j, "M1");
  t.u0_mass = get_num(j, "u0_mass");
  t.w0_max = get_num(j, "w0_max");
  t.condition_case = condition_case_from_string(j.at("condition_case").get<std::string>());
  t.C_GN = get_num(j, "C_GN");
  t.C_GN4_bound = get_num(j, "C_GN4_bound");
  t.gn_best_shape = j.at("gn_best_shape").get<std::string>();
  t.chi = get_num(j, "chi");
  t.tau = get_num(j, "tau");
  t.mu1_infinite = j.at("mu1_infinite").get<bool>();
  t.mu1 = t.mu1_infinite ? std::numeric_limits<double>::infinity() : get_num(j, "mu1");
  t.threshold_lhs = get_num(j, "threshold_lhs");
  t.threshold_rhs = get_num(j, "threshold_rhs");
  t.tau0_damping_holds = j.at("tau0_damping_holds").get<bool>();
  t.threshold_inequality_holds = j.at("threshold_inequality_holds").get<bool>();
  return t;
}

json run_json(const RunSummary& r) {
  json plateau = json::array();
  for (const PlateauEntry& e : r.plateau) plateau.push_back({{"name", e.name}, {"ratio", num(e.ratio)}});
  const BoundsSummary& b = r.bounds;
  const DerivedConstants& d = r.derived;
  json j = {{"diverged", r.diverged},
            {"divergence_time", num(r.divergence_time)},
            {"divergence_reason", r.divergence_reason},
            {"clip_valid", r.clip_valid},
            {"steps", r.steps},
            {"t_final", num(r.t_final)},
            {"classification", r.classification ? json(to_string(*r.classification)) : json(nullptr)},
            {"bounds",
             {{"u_min", num(b.u_min)},
              {"v_min", num(b.v_min)},
              {"w_min", num(b.w_min)},
              {"w_max", num(b.w_max)},
              {"w_increase_max", num(b.w_increase_max)},
              {"clipped_mass_total", num(b.clipped_mass_total)},
              {"clipped_relative_max", num(b.clipped_relative_max)},
              {"limited_steps", b.limited_steps}}},
            {"derived",
             {{"kappa", num(d.kappa)},
              {"w0_max", num(d.w0_max)},
              {"lambda1", num(d.lambda1)},
              {"A", num(d.A)},
              {"laplace_w0_max", num(d.laplace_w0_max)}}},
            {"plateau_ratios", plateau},
            {"final_record", r.final_record ? record_json(*r.final_record) : json(nullptr)}};
  return j;
}

RunSummary run_from(const json& j) {
  RunSummary r;
  r.diverged = j.at("diverged").get<bool>();
  r.divergence_time = get_num(j, "divergence_time");
  r.divergence_reason = j.at("divergence_reason").get<std::string>();
  r.clip_valid = j.at("clip_valid").get<bool>();
  r.steps = j.at("steps").get<long>();
  r.t_final = get_num(j, "t_final");
  if (!j.at("classification").is_null())
    r.classification = run_class_from_string(j.at("classification").get<std::string>());
  const json& b = j.at("bounds");
  r.bounds.u_min = get_num(b, "u_min");
  r.bounds.v_min = get_num(b, "v_min");
  r.bounds.w_min = get_num(b, "w_min");
  r.bounds.w_max = get_num(b, "w_max");
  r.bounds.w_increase_max = get_num(b, "w_increase_max");
  r.bounds.clipped_mass_total = get_num(b, "clipped_mass_total");
  r.bounds.clipped_relative_max = get_num(b, "clipped_relative_max");
  r.bounds.limited_steps = b.at("limited_steps").get<long>();
  const json& d = j.at("derived");
  r.derived.kappa = get_num(d, "kappa");
  r.derived.w0_max = get_num(d, "w0_max");
  r.derived.lambda1 = get_num(d, "lambda1");
  r.derived.A = get_num(d, "A");
  r.derived.laplace_w0_max = get_num(d, "laplace_w0_max");
  for (const json& e : j.at("plateau_ratios"))
    r.plateau.push_back({e.at("name").get<std::string>(), get_num(e, "ratio")});
  if (!j.at("final_record").is_null()) r.final_record = record_from(j.at("final_record"));
  return r;
}

// Piecewise-linear viridis.
void viridis(double t, int& r, int& g, int& b) {
  static const double stops[9][3] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139},
                                     {44, 113, 142}, {33, 144, 141}, {39, 173, 129},
                                     {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * 8.0;
  const int k = std::min(static_cast<int>(t), 7);
  const double f = t - k;
  auto mix = [&](int c) { return static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c]))); };
  r = mix(0);
  g = mix(1);
  b = mix(2);
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string series_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out;
  for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) {
    if (c) out += ',';
    out += kSeriesColumns[c];
  }
  out += '\n';
  for (const DiagnosticsRecord& r : records) {
    for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) {
      if (c) out += ',';
      append_number(out, r.*kSeriesMembers[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<DiagnosticsRecord> parse_series_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty series file");
  std::string expected;
  for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) expected += (c ? "," : "") + std::string(kSeriesColumns[c]);
  if (line != expected) throw InvalidInput("unexpected series header '" + line + "'");
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DiagnosticsRecord r;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) {
      const std::size_t end = c + 1 < kSeriesColumns.size() ? line.find(',', pos) : line.size();
      if (end == std::string::npos) throw InvalidInput("short series row");
      r.*kSeriesMembers[c] = parse_double(std::string_view(line).substr(pos, end - pos));
      pos = end + 1;
    }
    out.push_back(r);
  }
  return out;
}

std::string field_dump(const Field2D& f) {
  const Grid& g = f.grid();
  std::string out(kHeaderBytes + 8 * f.size(), '\0');
  char* p = out.data();
  std::memcpy(p, kMagic, 8);
  const std::uint32_t nx = static_cast<std::uint32_t>(g.nx()), ny = static_cast<std::uint32_t>(g.ny());
  const double lx = g.lx(), ly = g.ly();
  std::memcpy(p + 8, &nx, 4);
  std::memcpy(p + 12, &ny, 4);
  std::memcpy(p + 16, &lx, 8);
  std::memcpy(p + 24, &ly, 8);
  std::memcpy(p + kHeaderBytes, f.values().data(), 8 * f.size());
  return out;
}

Field2D parse_field_dump(const std::string& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw InvalidInput("not a field dump (bad magic)");
  std::uint32_t nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  std::memcpy(&nx, bytes.data() + 8, 4);
  std::memcpy(&ny, bytes.data() + 12, 4);
  std::memcpy(&lx, bytes.data() + 16, 8);
  std::memcpy(&ly, bytes.data() + 24, 8);
  const Grid g(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  if (bytes.size() != kHeaderBytes + 8 * n)
    throw InvalidInput("field dump size does not match its header");
  std::vector<double> vals(n);
  std::memcpy(vals.data(), bytes.data() + kHeaderBytes, 8 * n);
  return Field2D(g, std::move(vals));
}

void write_field(const std::filesystem::path& path, const Field2D& f) { write_text(path, field_dump(f)); }

Field2D read_field(const std::filesystem::path& path) { return parse_field_dump(read_text(path)); }

std::string heatmap_svg(const Field2D& f, const std::string& title) {
  const Grid& g = f.grid();
  const double cell = std::max(1.0, std::min(512.0 / g.nx(), 512.0 / g.ny()));
  const double w = cell * g.nx(), h = cell * g.ny();
  const double margin = 10.0, top = 30.0, bar = 20.0;
  double lo = f.min(), hi = f.max();
  if (!std::isfinite(lo) || !std::isfinite(hi)) lo = hi = 0.0;
  const double span = hi > lo ? hi - lo : 1.0;

  std::ostringstream os;
  os.precision(6);
  const double width = w + 3 * margin + bar + 80.0;
  const double height = h + top + 2 * margin;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" shape-rendering=\"crispEdges\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
     << xml_escape(title) << "</text>\n";
  os << "<g transform=\"translate(" << margin << ',' << top << ")\">\n";
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      int r, gg, b;
      viridis((f(i, j) - lo) / span, r, gg, b);
      os << "<rect x=\"" << i * cell << "\" y=\"" << (g.ny() - 1 - j) * cell << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"rgb(" << r << ',' << gg << ',' << b << ")\"/>\n";
    }
  os << "</g>\n";
  const double bx = 2 * margin + w;
  const int steps = 64;
  for (int k = 0; k < steps; ++k) {
    int r, gg, b;
    viridis((k + 0.5) / steps, r, gg, b);
    os << "<rect x=\"" << bx << "\" y=\"" << top + h * (steps - 1 - k) / steps << "\" width=\"" << bar
       << "\" height=\"" << h / steps + 0.5 << "\" fill=\"rgb(" << r << ',' << gg << ',' << b << ")\"/>\n";
  }
  os << "<text x=\"" << bx + bar + 4 << "\" y=\"" << top + 10 << "\" font-family=\"sans-serif\" font-size=\"11\">"
     << hi << "</text>\n";
  os << "<text x=\"" << bx + bar + 4 << "\" y=\"" << top + h << "\" font-family=\"sans-serif\" font-size=\"11\">"
     << lo << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string report_json(const RunReport& rep) {
  json j = {{"command", rep.command},
            {"model",
             {{"chi", num(rep.chi)},
              {"xi", num(rep.xi)},
              {"tau", num(rep.tau)},
              {"kinetics", rep.kinetics},
              {"nx", rep.nx},
              {"ny", rep.ny},
              {"lx", num(rep.lx)},
              {"ly", num(rep.ly)},
              {"seed", rep.seed}}},
            {"threshold", rep.threshold ? threshold_json(*rep.threshold) : json(nullptr)},
            {"run", rep.run ? run_json(*rep.run) : json(nullptr)},
            {"error", rep.error}};
  return j.dump(2) + "\n";
}

RunReport parse_report_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed report: ") + e.what());
  }
  try {
    RunReport rep;
    rep.command = j.at("command").get<std::string>();
    const json& m = j.at("model");
    rep.chi = get_num(m, "chi");
    rep.xi = get_num(m, "xi");
    rep.tau = get_num(m, "tau");
    rep.kinetics = m.at("kinetics").get<std::string>();
    rep.nx = m.at("nx").get<int>();
    rep.ny = m.at("ny").get<int>();
    rep.lx = get_num(m, "lx");
    rep.ly = get_num(m, "ly");
    rep.seed = m.at("seed").get<std::uint64_t>();
    if (!j.at("threshold").is_null()) rep.threshold = threshold_from(j.at("threshold"));
    if (!j.at("run").is_null()) rep.run = run_from(j.at("run"));
    rep.error = j.at("error").get<std::string>();
    return rep;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed report: ") + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InvalidInput("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace chemohapto
