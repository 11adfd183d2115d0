#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemohapto/condition.hpp"
#include "chemohapto/diagnostics.hpp"
#include "chemohapto/grid.hpp"
#include "chemohapto/solver.hpp"

namespace chemohapto {

inline constexpr std::array<const char*, 13> kSeriesColumns{
    "t",           "mass",        "l2_u",        "linf_u",
    "entropy",     "g_m",         "grad_v_l4",   "linf_grad_v",
    "linf_grad_w", "identity_residual", "delta_w_violation_max", "clipped_mass",
    "dt"};

/// Header row plus one row per record, 17 significant digits.
std::string series_csv(const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> parse_series_csv(const std::string& text);

/// Flat binary dump: "CHFIELD1", nx and ny as u32, Lx and Ly as f64 (32 bytes,
/// little-endian), then nx*ny f64 values in row-major order (index j*nx + i).
std::string field_dump(const Field2D& f);
Field2D parse_field_dump(const std::string& bytes);
void write_field(const std::filesystem::path& path, const Field2D& f);
Field2D read_field(const std::filesystem::path& path);

/// Self-contained SVG, one rectangle per cell, y axis pointing up.
std::string heatmap_svg(const Field2D& f, const std::string& title);

struct RunSummary {
  bool diverged = false;
  double divergence_time = 0.0;
  std::string divergence_reason;
  bool clip_valid = true;
  long steps = 0;
  double t_final = 0.0;
  std::optional<RunClass> classification;
  BoundsSummary bounds;
  DerivedConstants derived;
  std::vector<PlateauEntry> plateau;
  std::optional<DiagnosticsRecord> final_record;
};

struct RunReport {
  std::string command;
  double chi = 0.0;
  double xi = 0.0;
  double tau = 0.0;
  std::string kinetics;
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  std::uint64_t seed = 0;
  std::optional<ThresholdReport> threshold;
  std::optional<RunSummary> run;
  std::string error;  ///< set when the run failed before finishing
};

/// Non-finite numbers are written as the strings "inf", "-inf" and "nan";
/// an infinite mu_r is written as value null plus "infinite": true.
std::string report_json(const RunReport& report);
RunReport parse_report_json(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace chemohapto
