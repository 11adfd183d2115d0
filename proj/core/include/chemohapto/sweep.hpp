#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chemohapto/config.hpp"

namespace chemohapto {

/// name=start:stop:steps[:log]; steps >= 1, log spacing needs positive ends.
struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;
  bool log = false;
  std::vector<double> values() const;
};

SweepAxis parse_sweep_axis(const std::string& spec);

inline constexpr std::size_t kMaxSweepPoints = 10000;

struct SweepPointResult {
  std::size_t index = 0;
  std::vector<std::pair<std::string, double>> coords;
  std::string condition_case;   ///< empty on failure
  std::string classification;   ///< bounded_plateau | growing | diverged | unclassified
  bool diverged = false;
  double divergence_time = 0.0;
  double peak_linf_u = 0.0;
  double peak_mass = 0.0;
  double peak_linf_grad_v = 0.0;
  bool clip_valid = true;
  std::string error;
  std::string dir;
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepPointResult> points;
  /// (verdict, classification) -> count; verdict is "satisfied",
  /// "not_satisfied" or "error".
  std::map<std::pair<std::string, std::string>, int> confusion;
};

/// Cartesian product of the axes, points run in parallel on `threads`
/// workers. Each point writes into out_dir/point_NNNN; a failing point is
/// recorded and the sweep continues.
SweepResult run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                      const std::filesystem::path& out_dir, int threads);

std::string sweep_csv(const SweepResult& r);
std::string confusion_summary(const SweepResult& r);

}  // namespace chemohapto
