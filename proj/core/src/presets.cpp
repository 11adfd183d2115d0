#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chemohapto/config.hpp"
#include "chemohapto/error.hpp"
#include "chemohapto/io.hpp"

namespace chemohapto {

namespace {

constexpr double kPi = std::numbers::pi;

double pick(const std::vector<double>& v, std::size_t i) { return v.size() == 1 ? v[0] : v[i]; }

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Field2D gaussian(const FieldPreset& p, const Grid& g) {
  const std::size_t n = std::max({p.cx.size(), p.cy.size(), p.sigma.size(), p.amp.size()});
  Field2D bumps(g);
  for (std::size_t b = 0; b < n; ++b) {
    const double cx = pick(p.cx, b), cy = pick(p.cy, b), s = pick(p.sigma, b), a = pick(p.amp, b);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double dx = g.x(i) - cx, dy = g.y(j) - cy;
        bumps(i, j) += a * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
      }
  }
  if (p.mass > 0.0) {
    const double base = p.value * g.area();
    const double bump_mass = integrate(bumps);
    if (!(bump_mass > 0.0)) throw InvalidInput("gaussian preset: bumps carry no mass to rescale");
    if (p.mass < base) throw InvalidInput("gaussian preset: mass is below value * area");
    bumps *= (p.mass - base) / bump_mass;
  }
  Field2D f(g, p.value);
  f += bumps;
  return f;
}

Field2D random_field(const FieldPreset& p, const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field2D pert(g);
  for (int a = 0; a <= p.modes; ++a)
    for (int b = 0; b <= p.modes; ++b) {
      if (a == 0 && b == 0) continue;
      const double c = (2.0 * unit(rng) - 1.0) / (1.0 + a * a + b * b);
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
          pert(i, j) += c * std::cos(a * kPi * g.x(i) / g.lx()) * std::cos(b * kPi * g.y(j) / g.ly());
    }
  const double m = std::max(std::abs(pert.min()), std::abs(pert.max()));
  if (m > 0.0) pert *= p.amplitude / m;
  Field2D f(g, p.value);
  f += pert;
  return f;
}

}  // namespace

Field2D build_field(const FieldPreset& p, const Grid& g, std::uint64_t seed,
                    const std::filesystem::path& base_dir) {
  if (p.kind == "homogeneous") return Field2D(g, p.value);
  if (p.kind == "cosine")
    return Field2D::from_function(g, [&](double x, double y) {
      return p.value + p.amplitude * std::cos(p.mode_x * kPi * x / g.lx()) *
                           std::cos(p.mode_y * kPi * y / g.ly());
    });
  if (p.kind == "gaussian") return gaussian(p, g);
  if (p.kind == "random") return random_field(p, g, seed);
  if (p.kind == "file") {
    std::filesystem::path path(p.path);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    Field2D f = read_field(path);
    if (!(f.grid() == g))
      throw InvalidInput("field file '" + path.string() + "' does not match the configured grid");
    return f;
  }
  throw InvalidInput("unknown initial-data preset '" + p.kind + "'");
}

}  // namespace chemohapto
