#pragma once

#include <functional>
#include <string>

#include "chemohapto/grid.hpp"
#include "chemohapto/model.hpp"

namespace chemohapto {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double l2_u = 0.0;
  double linf_u = 0.0;
  double entropy = 0.0;
  double g_m = 0.0;
  double grad_v_l4 = 0.0;
  double linf_grad_v = 0.0;
  double linf_grad_w = 0.0;
  double identity_residual = 0.0;
  double delta_w_violation_max = 0.0;
  double clipped_mass = 0.0;
  double dt = 0.0;
};

/// Floor applied to u inside logarithms.
inline constexpr double kLogFloor = 1e-30;

/// int u ln u with 0 ln 0 = 0.
double entropy(const Field2D& u);

/// int (u + e^[m]) ln^[m](u + e^[m]), 1 <= m <= 3.
double g_functional(const Field2D& u, int m);

/// Test function h with shift k for the dissipation identity
///   d/dt int (u+k) h(u+k) + int (2h' + (u+k) h'')(u+k) |grad u|^2
///     = chi int grad Psi . grad v + xi int grad Psi . grad w + int (h + (u+k) h') f
/// with Psi(u) = u (u+k) h'(u+k) - k [h(u+k) - h(k)].
/// The callables take u (not u + k).
struct IdentityKernel {
  std::string name;
  double k = 0.0;
  std::function<double(double)> h;    ///< h(u + k)
  std::function<double(double)> dh;   ///< h'(u + k)
  std::function<double(double)> d2h;  ///< h''(u + k)
  double h_at_k = 0.0;                ///< h(k); unused when k = 0
};

/// h = ln, k = 0 (the u ln u entropy).
IdentityKernel log_kernel();
/// h = ln^[m], k = e^[m].
IdentityKernel iterlog_kernel(int m);

struct IdentityTerms {
  double dfunctional_dt = 0.0;
  double dissipation = 0.0;
  double chemotaxis = 0.0;
  double haptotaxis = 0.0;
  double reaction = 0.0;
  double lhs() const { return dfunctional_dt + dissipation; }
  double rhs() const { return chemotaxis + haptotaxis + reaction; }
  double residual() const;
};

/// Both sides of the identity across one step: forward difference of the
/// functional over dt on the left, every other term at midpoint fields.
IdentityTerms identity_terms(const IdentityKernel& kernel, const State& before,
                             const State& after, const ModelParams& params, double dt);

/// |LHS - RHS| for the u ln u instance.
double energy_identity_residual(const State& before, const State& after,
                                const ModelParams& params, double dt);

/// max over cells of (-Delta_h w - tau w0_max v - kappa).
double delta_w_bound_check(const State& state, const DerivedConstants& derived,
                           const ModelParams& params);

DiagnosticsRecord make_record(const State& state, const ModelParams& params,
                              const DerivedConstants& derived, int g_m);

/// Lower bound on the Gagliardo-Nirenberg constant in
///   ||phi||_p <= C (||grad phi||_2^delta ||phi||_q^(1-delta) + ||phi||_r),
/// delta = 1 - q/p (two dimensions), from the largest ratio over a family of
/// test fields on the given grid.
struct GnEstimate {
  double value = 0.0;
  double delta = 0.0;
  double constant_floor = 0.0;
  std::string best_shape;
  int evaluations = 0;
};
GnEstimate gn_estimate(const Grid& grid, double p, double q, double r);
double gn_constant_estimate(const Grid& grid, double p, double q, double r);

/// Ratio ||phi||_p / (||grad phi||_2^delta ||phi||_q^(1-delta) + ||phi||_r).
double gn_ratio(const Field2D& phi, double p, double q, double r);

/// Cutoff 0 on [0, lambda], 2(|s| - lambda) on (lambda, 2 lambda), |s| beyond.
double alpha_cutoff(double s, double lambda);

/// Constants of the logarithmic interpolation inequality
///   ||phi||_q^q <= eps ||grad phi||_2^(q-r) ||g(phi)||_r^r + C ||phi||_r^q + C_eps
/// with g(s) = (s + e^[m]) ln^[m](s + e^[m]). lambda can be astronomically
/// large, so it and C_eps are carried as logarithms (and log-logarithms once
/// the logarithm itself overflows).
struct LogGnConstants {
  double gn_hat = 0.0;        ///< GN estimate for (p, q, r) = (q, r, r)
  double C1 = 0.0;            ///< 2^(q-1) gn_hat^q
  double log_lambda = 0.0;    ///< may be +inf
  double loglog_lambda = 0.0;
  double C = 0.0;             ///< 2^q C1
  double log_C_eps = 0.0;     ///< may be +inf
  double loglog_C_eps = 0.0;
};

/// Builds lambda from 2^(2q-r) C1 lambda^r / g(lambda)^r < eps. Throws
/// OverflowError when even ln ln lambda is not representable.
LogGnConstants log_gn_constants(const Grid& grid, int m, double q, double r, double eps);

struct LogGnResult {
  bool holds = false;
  double lhs = 0.0;      ///< ||phi||_q^q
  double log_rhs = 0.0;  ///< ln of the right side; +inf when C_eps overflows in log space
  double eps_term = 0.0;
  double c_term = 0.0;
  LogGnConstants constants;
};

LogGnResult log_gn_check(const Field2D& phi, int m, double q, double r, double eps);
LogGnResult log_gn_check(const Field2D& phi, int m, double q, double r, double eps,
                         const LogGnConstants& constants);

}  // namespace chemohapto
