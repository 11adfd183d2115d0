#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chemohapto/grid.hpp"

namespace chemohapto {

/// Errors at successive refinement levels and the observed orders between
/// neighbours, measured against h or dt (see `variable`).
struct ConvergenceStudy {
  std::string title;
  std::string variable;  ///< "h" or "dt"
  std::vector<int> n;
  std::vector<double> h;
  std::vector<double> dt;
  std::vector<double> error;
  std::vector<double> order;

  bool decreasing() const;
  double min_order() const;
};

/// Max error of the Neumann Laplacian on cos(pi x) cos(pi y).
ConvergenceStudy laplacian_convergence(const std::vector<int>& levels = {32, 64, 128});

/// Max error of div(u grad phi) on smooth positive u and smooth phi.
ConvergenceStudy taxis_convergence(const std::vector<int>& levels = {32, 64, 128});

/// Residual of the discrete entropy identity (kernel ln when m = 0, the
/// iterated-log kernel ln^[m] otherwise) on a smooth full-model run with
/// chi = 1, xi = 0.5, tau = 1 and logistic kinetics, dt = h^2 / 4, evaluated
/// on the step ending at t = 0.01. Orders are measured in dt.
ConvergenceStudy identity_convergence(const std::vector<int>& levels = {16, 32, 64}, int m = 0);

/// Largest value of -Delta_h w - tau w0_max v - kappa over a short smooth run
/// (tau = 1) at each level; orders in h.
ConvergenceStudy delta_w_refinement(const std::vector<int>& levels = {32, 64, 128});

/// Relative discrete conservation defects |int L(f)| / int |L(f)| for the
/// Laplacian, the taxis divergence and one transport step on seeded random
/// fields; returns the largest.
double conservation_defect(const Grid& grid, std::uint64_t seed);

/// Smallest finite-difference value of (ln^[m](z + e^[m]))' and of
/// 2h' + (z + e^[m]) h'' over `points` log-spaced z in [1e-6, 1e12].
struct IterlogPositivity {
  double min_first = 0.0;
  double min_weight = 0.0;
};
IterlogPositivity iterlog_positivity(int m, int points = 1000);

/// Number of violations of f(s, w) <= a' - b' s over `samples` seeded random
/// (s, w) for a fixed set of specs covering every family.
int f_source_cap_violations(int samples, std::uint64_t seed);

/// Failures of the log-GN check over `count` seeded random positive fields
/// spanning many orders of magnitude.
int log_gn_failures(const Grid& grid, int m, double q, double r, double eps, int count,
                    std::uint64_t seed);

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  std::string requirement;
  bool passed = false;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;
  std::vector<ConvergenceStudy> studies;
  bool passed() const;
};

/// "operators", "identity", "iterlog" or "loggn". InvalidInput otherwise.
VerifyReport run_verify_suite(const std::string& suite);
const std::vector<std::string>& verify_suite_names();

std::string format_study(const ConvergenceStudy& s);
std::string format_verify_report(const VerifyReport& r);

}  // namespace chemohapto
