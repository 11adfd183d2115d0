#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace chemohapto {

/// Uniform cell-centered grid on [0, lx] x [0, ly].
///
/// Cell (i, j) has its center at ((i + 1/2) hx, (j + 1/2) hy) and is stored
/// at index j * nx + i (x varies fastest). Homogeneous Neumann conditions are
/// imposed through mirror ghost cells, so every boundary face carries a zero
/// normal difference.
class Grid {
 public:
  /// 4x4 cells on the unit square.
  Grid() : Grid(4, 4) {}
  Grid(int nx, int ny, double lx = 1.0, double ly = 1.0);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double cell_area() const noexcept { return hx_ * hy_; }
  double area() const noexcept { return lx_ * ly_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  double x(int i) const noexcept { return (i + 0.5) * hx_; }
  double y(int j) const noexcept { return (j + 0.5) * hy_; }

  /// Swaps the roles of x and y.
  Grid transposed() const { return Grid(ny_, nx_, ly_, lx_); }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.lx_ == b.lx_ && a.ly_ == b.ly_;
  }

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
  double hx_;
  double hy_;
};

/// Scalar field sampled at the cell centers of a Grid.
class Field2D {
 public:
  Field2D() : Field2D(Grid()) {}
  explicit Field2D(const Grid& grid, double value = 0.0);
  Field2D(const Grid& grid, std::vector<double> values);

  template <class F>
  static Field2D from_function(const Grid& grid, F&& f) {
    Field2D out(grid);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) out(i, j) = f(grid.x(i), grid.y(j));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;
  double max() const;
  bool all_finite() const;

  Field2D& operator+=(const Field2D& other);
  Field2D& operator-=(const Field2D& other);
  Field2D& operator*=(double s);
  /// this += a * x
  Field2D& axpy(double a, const Field2D& x);

  friend Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
  friend Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
  friend Field2D operator*(double s, Field2D a) { return a *= s; }

  friend bool operator==(const Field2D& a, const Field2D& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// 5-point Neumann Laplacian written as a difference of face fluxes.
Field2D laplacian_neumann(const Field2D& f);

/// div(u grad phi) in conservative face-flux form. Face values of u are
/// upwinded along grad phi with a minmod-limited linear reconstruction from
/// the donor side. Boundary faces carry no flux.
Field2D taxis_divergence(const Field2D& u, const Field2D& phi);

/// div(u grad v); the caller applies chi.
inline Field2D chemotactic_divergence(const Field2D& u, const Field2D& v) {
  return taxis_divergence(u, v);
}

/// One explicit step u - dt * div(u grad phi). Outgoing face fluxes of a cell
/// are scaled down when they would drain more than the cell holds, so the
/// result is nonnegative for any dt when u is. Conservative.
struct TransportResult {
  Field2D u;
  int limited_cells = 0;
};
TransportResult upwind_transport_step(const Field2D& u, const Field2D& phi, double dt);

/// Midpoint quadrature.
double integrate(const Field2D& f);

/// L^p norm through integrate(); p = kInfNorm gives max |f|.
double norm(const Field2D& f, double p);

/// (int |f|^p)^(1/p) for any p > 0 (a quasi-norm when p < 1).
double lebesgue(const Field2D& f, double p);

/// Cellwise gradient magnitude: root-mean of the squared face differences
/// on each axis, boundary faces counting as zero.
Field2D grad_magnitude(const Field2D& f);

/// L^q norm of grad_magnitude(f).
double grad_norm(const Field2D& f, double q);

/// Face-sum discretization of int grad a . grad b.
double grad_dot_integral(const Field2D& a, const Field2D& b);

/// Largest face-difference magnitude |df/dh| over all interior faces.
double max_face_gradient(const Field2D& f);

Field2D reflect_x(const Field2D& f);
Field2D reflect_y(const Field2D& f);
Field2D transpose(const Field2D& f);

}  // namespace chemohapto
