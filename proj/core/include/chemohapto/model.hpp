#pragma once

#include <string>

#include "chemohapto/grid.hpp"
#include "chemohapto/kinetics.hpp"

namespace chemohapto {

/// Coefficients of
///   u_t = Delta u - chi div(u grad v) - xi div(u grad w) + f(u, w)
///   tau v_t = Delta v - v + u
///   w_t = -v w
/// with no-flux boundaries. tau = 0 makes the v-equation elliptic.
struct ModelParams {
  double chi = 1.0;
  double xi = 1.0;
  double tau = 0.0;
  KineticSpec kinetics;
  Grid grid = Grid(64, 64);

  /// chi, xi, tau >= 0 and finite. Zero sensitivities are accepted (they
  /// switch the corresponding taxis term off).
  void validate() const;
};

struct NumericsConfig {
  double elliptic_tol = 1e-10;
  int max_cg_iter = 0;  ///< 0: 10 (nx + ny)
  bool precondition = true;
  double safety = 0.4;
  double dt_max = 1e-3;
  double dt_min = 1e-14;
  double overflow_guard = 1e12;
  /// A 2x2 block of cells holding at least this fraction of the peak total
  /// mass counts as grid-scale collapse.
  double collapse_fraction = 0.5;
  double pos_tol = 1e-12;
  /// Per-step clipped mass, relative to total mass, above which the run is
  /// flagged invalid.
  double clip_gate = 1e-8;
  int threads = 1;

  void validate() const;
};

struct InitialData {
  Field2D u0;
  Field2D v0;
  Field2D w0;
  /// Constant in |grad w0|^2 <= A w0. Negative: use the smallest A that works.
  double A = -1.0;

  /// Checks the sign conditions, u0 not identically 0, the gradient bound
  /// and Neumann compatibility of w0. Resolves a negative A. Throws
  /// InvalidInput naming the violated condition.
  void validate(const ModelParams& params);
};

/// Smallest A with (dw/h)^2 <= A w_face on every interior face, w_face the
/// arithmetic mean of the two cells.
double minimal_gradient_constant(const Field2D& w0);

/// max over boundary-adjacent face pairs of the one-sided normal difference
/// |w[1] - w[0]| / h, the discrete normal derivative near the wall.
double neumann_defect(const Field2D& w0);

enum class Status { ok, diverged };

struct State {
  Field2D u;
  Field2D v;
  Field2D w;
  double t = 0.0;
  Status status = Status::ok;
  long step_count = 0;
  std::string diverged_reason;
  /// Largest total mass seen so far; the collapse test is relative to it.
  double peak_mass = 0.0;
};

struct DerivedConstants {
  double kappa = 0.0;
  double w0_max = 0.0;
  double lambda1 = 0.0;
  double A = 0.0;
  double laplace_w0_max = 0.0;
};

DerivedConstants derive_constants(const ModelParams& params, const InitialData& ic);

std::string to_string(Status s);

}  // namespace chemohapto
