#include "chemohapto/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "chemohapto/error.hpp"

namespace chemohapto {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double dot(const Field2D& a, const Field2D& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
}  // namespace

struct HelmholtzSolver::Impl {
  Grid grid;
  double* buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> lambda_x;
  std::vector<double> lambda_y;

  explicit Impl(const Grid& g) : grid(g) {
    const int nx = g.nx(), ny = g.ny();
    buf = static_cast<double*>(fftw_malloc(sizeof(double) * g.size()));
    if (!buf) throw std::bad_alloc();
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      forward = fftw_plan_r2r_2d(ny, nx, buf, buf, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
      backward = fftw_plan_r2r_2d(ny, nx, buf, buf, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
    }
    if (!forward || !backward) throw Error("FFTW plan creation failed");
    lambda_x.resize(nx);
    lambda_y.resize(ny);
    for (int p = 0; p < nx; ++p) {
      const double s = std::sin(std::numbers::pi * p / (2.0 * nx));
      lambda_x[p] = 4.0 / (g.hx() * g.hx()) * s * s;
    }
    for (int q = 0; q < ny; ++q) {
      const double s = std::sin(std::numbers::pi * q / (2.0 * ny));
      lambda_y[q] = 4.0 / (g.hy() * g.hy()) * s * s;
    }
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buf) fftw_free(buf);
  }

  void apply_inverse(double alpha, double beta, const Field2D& b, Field2D& out) {
    const int nx = grid.nx(), ny = grid.ny();
    for (std::size_t k = 0; k < grid.size(); ++k) buf[k] = b[k];
    fftw_execute(forward);
    const double norm = 4.0 * nx * ny;
    for (int q = 0; q < ny; ++q)
      for (int p = 0; p < nx; ++p)
        buf[static_cast<std::size_t>(q) * nx + p] /= norm * (alpha + beta * (lambda_x[p] + lambda_y[q]));
    fftw_execute(backward);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = buf[k];
  }
};

HelmholtzSolver::HelmholtzSolver(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}
HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept = default;

const Grid& HelmholtzSolver::grid() const noexcept { return impl_->grid; }

Field2D apply_helmholtz(double alpha, double beta, const Field2D& x) {
  Field2D y = laplacian_neumann(x);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = alpha * x[k] - beta * y[k];
  return y;
}

Field2D HelmholtzSolver::solve_direct(double alpha, double beta, const Field2D& b) {
  if (!(b.grid() == impl_->grid)) throw InvalidInput("solver and field grids differ");
  Field2D x(b.grid());
  impl_->apply_inverse(alpha, beta, b, x);
  return x;
}

SolveStats HelmholtzSolver::solve(double alpha, double beta, const Field2D& b, Field2D& x,
                                  double tol, int max_iter, bool precondition) {
  const Grid& g = impl_->grid;
  if (!(b.grid() == g) || !(x.grid() == g)) throw InvalidInput("solver and field grids differ");
  if (!(alpha > 0.0) || !(beta >= 0.0)) throw InvalidInput("Helmholtz solve needs alpha > 0, beta >= 0");
  if (max_iter <= 0) max_iter = 10 * (g.nx() + g.ny());

  SolveStats stats;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x = Field2D(g);
    return stats;
  }
  if (!x.all_finite()) x = Field2D(g);

  Field2D r = b - apply_helmholtz(alpha, beta, x);
  double rnorm = std::sqrt(dot(r, r));
  Field2D z(g);
  Field2D p(g);
  double rz = 0.0;
  int it = 0;
  // A warm start can already meet the tolerance while still lagging the exact
  // solution; one preconditioned step is exact for constant coefficients.
  while ((rnorm > tol * bnorm || (precondition && it == 0 && rnorm > 0.0)) && it < max_iter) {
    if (precondition) {
      impl_->apply_inverse(alpha, beta, r, z);
    } else {
      z = r;
    }
    const double rz_new = dot(r, z);
    if (it == 0) {
      p = z;
    } else {
      const double beta_cg = rz_new / rz;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta_cg * p[k];
    }
    rz = rz_new;
    const Field2D ap = apply_helmholtz(alpha, beta, p);
    const double step = rz / dot(p, ap);
    x.axpy(step, p);
    r.axpy(-step, ap);
    rnorm = std::sqrt(dot(r, r));
    ++it;
  }

  // Constants are eigenvectors with eigenvalue alpha: remove the residual's
  // mean exactly so that integrate(A x) matches integrate(b) to rounding.
  r = b - apply_helmholtz(alpha, beta, x);
  double mean = 0.0;
  for (double v : r.values()) mean += v;
  mean /= static_cast<double>(r.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += mean / alpha;

  stats.iterations = it;
  stats.residual = rnorm / bnorm;
  if (!(rnorm <= tol * bnorm))
    throw ConvergenceError("conjugate gradient did not converge", it, stats.residual);
  return stats;
}

Field2D solve_elliptic_v(const Field2D& u, double tol) {
  HelmholtzSolver solver(u.grid());
  Field2D v(u.grid());
  solver.solve(1.0, 1.0, u, v, tol);
  return v;
}

}  // namespace chemohapto
