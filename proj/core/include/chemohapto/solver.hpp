#pragma once

#include <functional>
#include <vector>

#include "chemohapto/diagnostics.hpp"
#include "chemohapto/elliptic.hpp"
#include "chemohapto/model.hpp"

namespace chemohapto {

struct StepInfo {
  double dt = 0.0;
  double clipped_mass = 0.0;
  int limited_cells = 0;
  int cg_iterations = 0;
  double w_increase_max = 0.0;  ///< max over cells of w_new - w (<= 0 expected)
};

/// Extremes over every accepted state of a run.
struct BoundsSummary {
  double u_min = 0.0;
  double v_min = 0.0;
  double w_min = 0.0;
  double w_max = 0.0;
  double w_increase_max = 0.0;
  double clipped_mass_total = 0.0;
  double clipped_relative_max = 0.0;
  long limited_steps = 0;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  State final_state;
  DerivedConstants derived;
  BoundsSummary bounds;
  bool diverged = false;
  double divergence_time = 0.0;
  std::string divergence_reason;
  /// false once a step clipped more than clip_gate of the mass.
  bool clip_valid = true;
  long steps = 0;
};

struct RunOptions {
  double t_end = 1.0;
  /// Record spacing in time; <= 0 records every step.
  double observe_every = 0.0;
  /// Compute the u ln u identity residual at recorded steps.
  bool identity_residual = true;
  int g_m = 1;
  /// Called with every recorded state.
  std::function<void(const State&, const DiagnosticsRecord&)> observer;
};

class Solver {
 public:
  Solver(ModelParams params, NumericsConfig numerics);

  const ModelParams& params() const noexcept { return params_; }
  const NumericsConfig& numerics() const noexcept { return numerics_; }

  /// State at t = 0; v comes from the elliptic solve when tau = 0.
  State initial_state(const InitialData& ic);

  double dt_cfl(const State& state) const;

  /// One split step: v, then w, then u (taxis, diffusion, reaction). Marks the
  /// state diverged on non-finite values, overflow or grid-scale collapse.
  StepInfo step(State& state, double dt);

  /// ic must already be validated.
  RunResult run(const InitialData& ic, const RunOptions& opts);

 private:
  void check_divergence(State& s) const;

  ModelParams params_;
  NumericsConfig numerics_;
  HelmholtzSolver helmholtz_;
};

}  // namespace chemohapto
