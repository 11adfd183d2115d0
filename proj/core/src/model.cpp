#include "chemohapto/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chemohapto/error.hpp"

namespace chemohapto {

namespace {
std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void require_nonneg(const char* name, double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw InvalidInput(std::string(name) + " must be finite and >= 0, got " + fmt(x));
}
}  // namespace

void ModelParams::validate() const {
  require_nonneg("chi", chi);
  require_nonneg("xi", xi);
  require_nonneg("tau", tau);
}

void NumericsConfig::validate() const {
  if (!(elliptic_tol > 0.0 && elliptic_tol < 1.0)) throw InvalidInput("elliptic_tol must lie in (0,1)");
  if (!(safety > 0.0 && safety <= 1.0)) throw InvalidInput("safety must lie in (0,1]");
  if (!(dt_max > 0.0)) throw InvalidInput("dt_max must be > 0");
  if (!(dt_min >= 0.0 && dt_min < dt_max)) throw InvalidInput("dt_min must lie in [0, dt_max)");
  if (!(overflow_guard > 0.0)) throw InvalidInput("overflow_guard must be > 0");
  if (!(collapse_fraction > 0.0 && collapse_fraction <= 1.0))
    throw InvalidInput("collapse_fraction must lie in (0,1]");
  if (!(pos_tol >= 0.0)) throw InvalidInput("pos_tol must be >= 0");
  if (!(clip_gate >= 0.0)) throw InvalidInput("clip_gate must be >= 0");
  if (threads < 1) throw InvalidInput("threads must be >= 1");
}

double minimal_gradient_constant(const Field2D& w) {
  const Grid& g = w.grid();
  double a = 0.0;
  auto face = [&](double w0, double w1, double h) {
    const double d = (w1 - w0) / h;
    if (d == 0.0) return;
    const double wf = 0.5 * (w0 + w1);
    a = std::max(a, wf > 0.0 ? d * d / wf : std::numeric_limits<double>::infinity());
  };
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i) face(w(i, j), w(i + 1, j), g.hx());
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) face(w(i, j), w(i, j + 1), g.hy());
  return a;
}

double neumann_defect(const Field2D& w) {
  const Grid& g = w.grid();
  const int nx = g.nx(), ny = g.ny();
  double d = 0.0;
  for (int j = 0; j < ny; ++j) {
    d = std::max(d, std::abs(w(1, j) - w(0, j)) / g.hx());
    d = std::max(d, std::abs(w(nx - 1, j) - w(nx - 2, j)) / g.hx());
  }
  for (int i = 0; i < nx; ++i) {
    d = std::max(d, std::abs(w(i, 1) - w(i, 0)) / g.hy());
    d = std::max(d, std::abs(w(i, ny - 1) - w(i, ny - 2)) / g.hy());
  }
  return d;
}

void InitialData::validate(const ModelParams& params) {
  const Grid& g = params.grid;
  if (!(u0.grid() == g) || !(v0.grid() == g) || !(w0.grid() == g))
    throw InvalidInput("initial fields do not match the model grid");
  if (!u0.all_finite() || !v0.all_finite() || !w0.all_finite())
    throw InvalidInput("initial data contain non-finite values");
  if (u0.min() < 0.0) throw InvalidInput("u0 must be >= 0 (min " + fmt(u0.min()) + ")");
  if (!(u0.max() > 0.0)) throw InvalidInput("u0 must not vanish identically");
  if (params.tau > 0.0 && v0.min() < 0.0)
    throw InvalidInput("v0 must be >= 0 when tau > 0 (min " + fmt(v0.min()) + ")");
  if (w0.min() < 0.0) throw InvalidInput("w0 must be >= 0 (min " + fmt(w0.min()) + ")");

  const double a_min = minimal_gradient_constant(w0);
  if (A < 0.0) {
    if (!std::isfinite(a_min))
      throw InvalidInput("w0 has a nonzero gradient next to a zero value; no A satisfies |grad w0|^2 <= A w0");
    A = a_min;
  } else if (a_min > A * (1.0 + 1e-12) + 1e-12) {
    throw InvalidInput("|grad w0|^2 <= A w0 fails: needs A >= " + fmt(a_min) + ", got " + fmt(A));
  }

  // The ghost reflection imposes a zero normal derivative; a w0 whose
  // one-sided wall difference is not O(h) would carry a boundary layer.
  double lap_max = 0.0;
  const Field2D lap = laplacian_neumann(w0);
  for (int j = 1; j + 1 < g.ny(); ++j)
    for (int i = 1; i + 1 < g.nx(); ++i) lap_max = std::max(lap_max, std::abs(lap(i, j)));
  const double defect = neumann_defect(w0);
  const double allowed = std::max(4.0 * std::max(g.hx(), g.hy()) * lap_max, 1e-12);
  if (defect > allowed)
    throw InvalidInput("w0 is not Neumann compatible: wall difference " + fmt(defect) +
                       " exceeds " + fmt(allowed));
}

DerivedConstants derive_constants(const ModelParams& params, const InitialData& ic) {
  DerivedConstants d;
  d.w0_max = lebesgue(ic.w0, kInfNorm);
  d.laplace_w0_max = lebesgue(laplacian_neumann(ic.w0), kInfNorm);
  d.A = ic.A >= 0.0 ? ic.A : minimal_gradient_constant(ic.w0);
  d.kappa = d.laplace_w0_max + 4.0 * d.A + d.w0_max / std::numbers::e;
  const double lx = params.grid.lx(), ly = params.grid.ly();
  d.lambda1 = std::numbers::pi * std::numbers::pi * std::min(1.0 / (lx * lx), 1.0 / (ly * ly));
  return d;
}

std::string to_string(Status s) { return s == Status::ok ? "ok" : "diverged"; }

}  // namespace chemohapto
