#include "chemohapto/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemohapto/error.hpp"

namespace chemohapto {

double entropy(const Field2D& u) {
  double s = 0.0;
  for (double x : u.values())
    if (x > 0.0) s += x * std::log(std::max(x, kLogFloor));
  return s * u.grid().cell_area();
}

double g_functional(const Field2D& u, int m) {
  if (m < 1) throw DomainError("g functional needs m >= 1");
  const double k = e_tower(m);
  double s = 0.0;
  for (double x : u.values()) {
    const double z = std::max(x, 0.0);
    s += (z + k) * iter_log_shifted(m, z, m);
  }
  return s * u.grid().cell_area();
}

IdentityKernel log_kernel() {
  IdentityKernel kr;
  kr.name = "ln";
  kr.k = 0.0;
  kr.h = [](double u) { return std::log(std::max(u, kLogFloor)); };
  kr.dh = [](double u) { return 1.0 / std::max(u, kLogFloor); };
  kr.d2h = [](double u) {
    const double z = std::max(u, kLogFloor);
    return -1.0 / (z * z);
  };
  return kr;
}

IdentityKernel iterlog_kernel(int m) {
  if (m < 1) throw DomainError("iterated-log kernel needs m >= 1");
  IdentityKernel kr;
  kr.name = "ln^[" + std::to_string(m) + "]";
  kr.k = e_tower(m);
  kr.h = [m](double u) { return iter_log_shifted(m, std::max(u, 0.0), m); };
  kr.dh = [m](double u) {
    double prod = 1.0;
    for (int i = 0; i < m; ++i) prod *= iter_log_shifted(i, std::max(u, 0.0), m);
    return 1.0 / prod;
  };
  kr.d2h = [m](double u) {
    double prod = 1.0, sum = 0.0;
    for (int i = 0; i < m; ++i) {
      prod *= iter_log_shifted(i, std::max(u, 0.0), m);
      sum += 1.0 / prod;
    }
    return -sum / prod;
  };
  kr.h_at_k = 1.0;
  return kr;
}

double IdentityTerms::residual() const { return std::abs(lhs() - rhs()); }

IdentityTerms identity_terms(const IdentityKernel& kr, const State& before, const State& after,
                             const ModelParams& params, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("identity needs dt > 0");
  const Grid& g = before.u.grid();
  const double area = g.cell_area();
  const double k = kr.k;
  auto functional = [&](const Field2D& u) {
    double s = 0.0;
    for (double x : u.values()) {
      const double z = std::max(x, 0.0);
      if (z + k > 0.0) s += (z + k) * kr.h(z);
    }
    return s * area;
  };

  IdentityTerms t;
  t.dfunctional_dt = (functional(after.u) - functional(before.u)) / dt;

  const Field2D um = 0.5 * (before.u + after.u);
  const Field2D vm = 0.5 * (before.v + after.v);
  const Field2D wm = 0.5 * (before.w + after.w);

  auto weight = [&](double u) { return 2.0 * kr.dh(u) + (u + k) * kr.d2h(u); };
  double diss = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const double d = (um(i + 1, j) - um(i, j)) / g.hx();
      diss += weight(0.5 * (um(i, j) + um(i + 1, j))) * d * d;
    }
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double d = (um(i, j + 1) - um(i, j)) / g.hy();
      diss += weight(0.5 * (um(i, j) + um(i, j + 1))) * d * d;
    }
  t.dissipation = diss * area;

  Field2D psi(g);
  for (std::size_t c = 0; c < psi.size(); ++c) {
    const double u = std::max(um[c], 0.0);
    psi[c] = u * (u + k) * kr.dh(u);
    if (k > 0.0) psi[c] -= k * (kr.h(u) - kr.h_at_k);
  }
  t.chemotaxis = params.chi * grad_dot_integral(psi, vm);
  t.haptotaxis = params.xi * grad_dot_integral(psi, wm);

  double reac = 0.0;
  if (!params.kinetics.is_zero()) {
    for (std::size_t c = 0; c < um.size(); ++c) {
      const double u = std::max(um[c], 0.0);
      const double f = eval_f(params.kinetics, u, wm[c]);
      if (f != 0.0) reac += (kr.h(u) + (u + k) * kr.dh(u)) * f;
    }
  }
  t.reaction = reac * area;
  return t;
}

double energy_identity_residual(const State& before, const State& after,
                                const ModelParams& params, double dt) {
  return identity_terms(log_kernel(), before, after, params, dt).residual();
}

double delta_w_bound_check(const State& state, const DerivedConstants& derived,
                           const ModelParams& params) {
  const Field2D lap = laplacian_neumann(state.w);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < lap.size(); ++c)
    worst = std::max(worst, -lap[c] - params.tau * derived.w0_max * state.v[c] - derived.kappa);
  return worst;
}

DiagnosticsRecord make_record(const State& s, const ModelParams& params,
                              const DerivedConstants& derived, int g_m) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.mass = integrate(s.u);
  r.l2_u = norm(s.u, 2.0);
  r.linf_u = norm(s.u, kInfNorm);
  r.entropy = entropy(s.u);
  r.g_m = g_functional(s.u, g_m);
  r.grad_v_l4 = grad_norm(s.v, 4.0);
  r.linf_grad_v = grad_norm(s.v, kInfNorm);
  r.linf_grad_w = grad_norm(s.w, kInfNorm);
  r.delta_w_violation_max = delta_w_bound_check(s, derived, params);
  return r;
}

}  // namespace chemohapto
