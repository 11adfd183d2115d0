#pragma once

#include <memory>

#include "chemohapto/grid.hpp"

namespace chemohapto {

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  ///< final ||b - A x||_2 / ||b||_2
};

/// Conjugate-gradient solver for (alpha I - beta Delta_h) x = b with the
/// Neumann Laplacian of grid.hpp, alpha > 0, beta >= 0.
///
/// By default CG is preconditioned with the exact inverse computed by a 2D
/// DCT-II (the operator is diagonal in the cosine basis), so a solve takes one
/// or two iterations. Each instance owns its FFTW plans and buffers; use one
/// instance per thread.
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(const Grid& grid);
  ~HelmholtzSolver();
  HelmholtzSolver(const HelmholtzSolver&) = delete;
  HelmholtzSolver& operator=(const HelmholtzSolver&) = delete;
  HelmholtzSolver(HelmholtzSolver&&) noexcept;
  HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;

  const Grid& grid() const noexcept;

  /// x holds the initial guess on entry. max_iter <= 0 selects 10 (nx + ny).
  /// Throws ConvergenceError when the tolerance is not reached.
  SolveStats solve(double alpha, double beta, const Field2D& b, Field2D& x, double tol,
                   int max_iter = 0, bool precondition = true);

  /// Direct DCT solve without CG.
  Field2D solve_direct(double alpha, double beta, const Field2D& b);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// y = alpha x - beta Delta_h x
Field2D apply_helmholtz(double alpha, double beta, const Field2D& x);

/// v with (I - Delta_h) v = u.
Field2D solve_elliptic_v(const Field2D& u, double tol = 1e-12);

}  // namespace chemohapto
