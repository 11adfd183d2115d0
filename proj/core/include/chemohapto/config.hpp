#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "chemohapto/kinetics.hpp"
#include "chemohapto/model.hpp"
#include "chemohapto/solver.hpp"

namespace chemohapto {

/// One value of the structured-text config: number, bool, string or a
/// one-line array of numbers.
struct ConfigValue {
  std::variant<double, bool, std::string, std::vector<double>> data;
  int line = 0;
};

/// section -> key -> value. Keys before the first section header live in "".
using ConfigDocument = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Parses the TOML subset: [section] headers, key = value, # comments,
/// double-quoted strings, true/false, numbers and [n, n, ...] arrays.
/// Throws ConfigError with the offending line.
ConfigDocument parse_config_document(const std::string& text);

/// Initial profile of one field.
///   homogeneous  value
///   cosine       value + amplitude cos(mode_x pi x / Lx) cos(mode_y pi y / Ly)
///   gaussian     value + sum_i amp_i exp(-|x - c_i|^2 / (2 sigma_i^2)); when
///                mass > 0 the bumps are rescaled so the field integrates to mass
///   random       value + amplitude * (seeded smooth cosine series, max |.| = 1)
///   file         field dump read from path
struct FieldPreset {
  std::string kind = "homogeneous";
  double value = 0.0;
  double amplitude = 0.0;
  int mode_x = 1;
  int mode_y = 1;
  std::vector<double> cx{0.5};
  std::vector<double> cy{0.5};
  std::vector<double> sigma{0.1};
  std::vector<double> amp{1.0};
  double mass = 0.0;
  int modes = 4;
  std::string path;
};

inline FieldPreset homogeneous_preset(double value) {
  FieldPreset p;
  p.value = value;
  return p;
}

Field2D build_field(const FieldPreset& preset, const Grid& grid, std::uint64_t seed,
                    const std::filesystem::path& base_dir = {});

struct KineticsConfig {
  std::string name = "zero";
  double mu = 1.0;
  double a = 1.0;
  double b = 1.0;
  double gamma = 0.5;
  int k = 1;
  KineticSpec build() const;
};

struct OutputConfig {
  std::string dir = "out";
  bool series = true;
  bool report = true;
  bool fields = true;
  bool svg = true;
};

struct RunConfig {
  double chi = 1.0;
  double xi = 1.0;
  double tau = 0.0;
  KineticsConfig kinetics;

  int nx = 64;
  int ny = 64;
  double lx = 1.0;
  double ly = 1.0;

  FieldPreset u = homogeneous_preset(1.0);
  FieldPreset v = homogeneous_preset(0.0);
  FieldPreset w = homogeneous_preset(0.0);
  double A = -1.0;  ///< < 0: derived from w0
  double mass_scale = 1.0;
  std::uint64_t seed = 0;

  double t_end = 1.0;
  double observe_every = 0.0;  ///< 0: t_end / 128
  NumericsConfig numerics;

  int g_m = 1;
  bool identity_residual = true;
  int r_max = 3;

  OutputConfig output;
  std::filesystem::path base_dir;  ///< relative file presets resolve here
  std::map<std::string, int> lines;  ///< "section.key" -> source line

  Grid grid() const;
  ModelParams model() const;
  InitialData initial_data() const;
  RunOptions run_options() const;

  /// Range checks on every field; ConfigError names the key and its line.
  void validate() const;
};

RunConfig config_from_document(const ConfigDocument& doc,
                               const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Sweepable parameters: chi, xi, tau, mu, a, b, gamma, k, mass_scale.
void apply_axis(RunConfig& cfg, const std::string& name, double value);
bool is_sweep_axis(const std::string& name);

}  // namespace chemohapto
