#include "chemohapto/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemohapto/error.hpp"

namespace chemohapto {

Solver::Solver(ModelParams params, NumericsConfig numerics)
    : params_(std::move(params)), numerics_(numerics), helmholtz_(params_.grid) {
  params_.validate();
  numerics_.validate();
}

State Solver::initial_state(const InitialData& ic) {
  State s;
  s.u = ic.u0;
  s.v = ic.v0;
  s.w = ic.w0;
  if (params_.tau == 0.0) {
    s.v = Field2D(params_.grid);
    helmholtz_.solve(1.0, 1.0, ic.u0, s.v, numerics_.elliptic_tol, numerics_.max_cg_iter,
                     numerics_.precondition);
  }
  s.peak_mass = integrate(s.u);
  return s;
}

double Solver::dt_cfl(const State& s) const {
  const Grid& g = params_.grid;
  const double chi = params_.chi, xi = params_.xi;
  double vmax = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i)
      vmax = std::max(vmax, (chi * std::abs(s.v(i + 1, j) - s.v(i, j)) +
                             xi * std::abs(s.w(i + 1, j) - s.w(i, j))) / g.hx());
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      vmax = std::max(vmax, (chi * std::abs(s.v(i, j + 1) - s.v(i, j)) +
                             xi * std::abs(s.w(i, j + 1) - s.w(i, j))) / g.hy());
  if (!(vmax > 0.0)) return numerics_.dt_max;
  return std::min(numerics_.safety * std::min(g.hx(), g.hy()) / vmax, numerics_.dt_max);
}

StepInfo Solver::step(State& s, double dt) {
  if (s.status != Status::ok) throw InvalidInput("cannot step a diverged state");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive");
  StepInfo info;
  info.dt = dt;
  const Grid& g = params_.grid;
  const double tol = numerics_.elliptic_tol;

  // (a) v
  Field2D v_new = s.v;
  if (params_.tau > 0.0) {
    const double c = params_.tau / dt;
    Field2D rhs = s.u;
    rhs.axpy(c, s.v);
    info.cg_iterations += helmholtz_.solve(c + 1.0, 1.0, rhs, v_new, tol, numerics_.max_cg_iter,
                                           numerics_.precondition).iterations;
  } else {
    info.cg_iterations += helmholtz_.solve(1.0, 1.0, s.u, v_new, tol, numerics_.max_cg_iter,
                                           numerics_.precondition).iterations;
  }

  // (b) w, exact for frozen v
  Field2D w_new(g);
  info.w_increase_max = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < w_new.size(); ++c) {
    w_new[c] = s.w[c] * std::exp(-std::max(v_new[c], 0.0) * dt);
    info.w_increase_max = std::max(info.w_increase_max, w_new[c] - s.w[c]);
  }

  // (c) u: taxis, diffusion, reaction
  Field2D u_new = s.u;
  if (params_.chi != 0.0 || params_.xi != 0.0) {
    Field2D phi = params_.chi * v_new;
    phi.axpy(params_.xi, w_new);
    TransportResult tr = upwind_transport_step(s.u, phi, dt);
    info.limited_cells = tr.limited_cells;
    u_new = std::move(tr.u);
  }
  {
    Field2D x = u_new;
    info.cg_iterations += helmholtz_.solve(1.0, dt, u_new, x, tol, numerics_.max_cg_iter,
                                           numerics_.precondition).iterations;
    u_new = std::move(x);
  }
  double clipped = 0.0;
  const bool react = !params_.kinetics.is_zero();
  for (std::size_t c = 0; c < u_new.size(); ++c) {
    double& u = u_new[c];
    if (u > 0.0) {
      if (react) u *= std::exp(dt * growth_rate(params_.kinetics, u, w_new[c]));
    } else if (u < 0.0) {
      clipped -= u;
      u = 0.0;
    }
  }
  info.clipped_mass = clipped * g.cell_area();

  s.u = std::move(u_new);
  s.v = std::move(v_new);
  s.w = std::move(w_new);
  s.t += dt;
  ++s.step_count;
  check_divergence(s);
  return info;
}

void Solver::check_divergence(State& s) const {
  if (!s.u.all_finite() || !s.v.all_finite() || !s.w.all_finite()) {
    s.status = Status::diverged;
    s.diverged_reason = "non-finite values";
    return;
  }
  const double umax = s.u.max();
  if (umax > numerics_.overflow_guard) {
    s.status = Status::diverged;
    s.diverged_reason = "max u exceeds overflow guard";
    return;
  }
  // A collapsing aggregate centred on a cell corner spreads over four cells,
  // so the test uses the heaviest 2x2 block. Measuring against the peak mass
  // keeps a dying population's last cells from counting as collapse.
  const Grid& g = params_.grid;
  s.peak_mass = std::max(s.peak_mass, integrate(s.u));
  const double mass = s.peak_mass;
  double block = 0.0;
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i)
      block = std::max(block, s.u(i, j) + s.u(i + 1, j) + s.u(i, j + 1) + s.u(i + 1, j + 1));
  if (mass > 0.0 && block * g.cell_area() >= numerics_.collapse_fraction * mass) {
    s.status = Status::diverged;
    s.diverged_reason = "grid-scale collapse: a 2x2 block holds most of the mass";
  }
}

namespace {
void update_bounds(BoundsSummary& b, const State& s) {
  b.u_min = std::min(b.u_min, s.u.min());
  b.v_min = std::min(b.v_min, s.v.min());
  b.w_min = std::min(b.w_min, s.w.min());
  b.w_max = std::max(b.w_max, s.w.max());
}
}  // namespace

RunResult Solver::run(const InitialData& ic, const RunOptions& opts) {
  if (!(opts.t_end >= 0.0)) throw InvalidInput("t_end must be >= 0");
  RunResult res;
  State s = initial_state(ic);
  res.derived = derive_constants(params_, ic);
  res.bounds.u_min = s.u.min();
  res.bounds.v_min = s.v.min();
  res.bounds.w_min = s.w.min();
  res.bounds.w_max = s.w.max();
  res.bounds.w_increase_max = -std::numeric_limits<double>::infinity();
  check_divergence(s);

  auto emit = [&](const State& st, DiagnosticsRecord rec) {
    res.records.push_back(rec);
    if (opts.observer) opts.observer(st, rec);
  };
  emit(s, make_record(s, params_, res.derived, opts.g_m));
  if (s.status == Status::diverged) {
    res.diverged = true;
    res.divergence_reason = s.diverged_reason;
    res.final_state = std::move(s);
    return res;
  }

  long index = 1;
  double clipped_since_record = 0.0;
  State previous = s;
  while (s.t < opts.t_end) {
    const double target =
        opts.observe_every > 0.0 ? std::min(index * opts.observe_every, opts.t_end) : opts.t_end;
    double dt = dt_cfl(s);
    bool land = false;
    if (s.t + dt >= target - 1e-12 * std::max(1.0, target)) {
      dt = target - s.t;
      land = true;
    }
    if (dt < numerics_.dt_min || !(dt > 0.0)) {
      res.diverged = true;
      res.divergence_reason = "time step fell below dt_min";
      res.divergence_time = s.t;
      s.status = Status::diverged;
      s.diverged_reason = res.divergence_reason;
      break;
    }
    const bool record_now = opts.observe_every <= 0.0 || land;
    previous = s;
    const double mass_before = integrate(s.u);
    const StepInfo info = step(s, dt);
    ++res.steps;
    if (land) {
      s.t = target;
      if (opts.observe_every > 0.0 && target >= index * opts.observe_every) ++index;
    }
    if (s.status == Status::diverged) {
      res.diverged = true;
      res.divergence_time = s.t;
      res.divergence_reason = s.diverged_reason;
      if (previous.t > res.records.back().t)
        emit(previous, make_record(previous, params_, res.derived, opts.g_m));
      previous.status = Status::diverged;
      previous.diverged_reason = s.diverged_reason;
      res.final_state = std::move(previous);
      return res;
    }
    update_bounds(res.bounds, s);
    res.bounds.w_increase_max = std::max(res.bounds.w_increase_max, info.w_increase_max);
    res.bounds.clipped_mass_total += info.clipped_mass;
    if (info.limited_cells > 0) ++res.bounds.limited_steps;
    if (mass_before > 0.0) {
      const double rel = info.clipped_mass / mass_before;
      res.bounds.clipped_relative_max = std::max(res.bounds.clipped_relative_max, rel);
      if (rel > numerics_.clip_gate) res.clip_valid = false;
    }
    clipped_since_record += info.clipped_mass;
    if (record_now) {
      DiagnosticsRecord rec = make_record(s, params_, res.derived, opts.g_m);
      rec.dt = dt;
      rec.clipped_mass = clipped_since_record;
      clipped_since_record = 0.0;
      if (opts.identity_residual) rec.identity_residual = energy_identity_residual(previous, s, params_, dt);
      emit(s, rec);
    }
  }
  res.final_state = std::move(s);
  return res;
}

}  // namespace chemohapto
