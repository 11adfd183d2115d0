#include "chemohapto/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemohapto/error.hpp"

namespace chemohapto {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 4 || ny < 4)
    throw InvalidInput("grid needs nx >= 4 and ny >= 4, got " + std::to_string(nx) + "x" +
                       std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw InvalidInput("grid lengths must be positive and finite");
  hx_ = lx / nx;
  hy_ = ly / ny;
}

Field2D::Field2D(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

Field2D::Field2D(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidInput("field size " + std::to_string(values_.size()) +
                       " does not match grid size " + std::to_string(grid_.size()));
}

double Field2D::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field2D::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool Field2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

namespace {
void require_same_grid(const Field2D& a, const Field2D& b) {
  if (!(a.grid() == b.grid())) throw InvalidInput("fields live on different grids");
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Face values of u upwinded along the sign of the face velocity. `um`, `u0`,
// `u1`, `up` are the cells left-of-left, left, right, right-of-right.
double upwind_face(double um, double u0, double u1, double up, double vel) {
  if (vel > 0.0) return u0 + 0.5 * minmod(u0 - um, u1 - u0);
  if (vel < 0.0) return u1 - 0.5 * minmod(u1 - u0, up - u1);
  return 0.0;
}

// Taxis face fluxes u_face * dphi/dh. fx has (nx-1)*ny entries indexed
// j*(nx-1)+i for the face between i and i+1; fy has nx*(ny-1) entries
// indexed j*nx+i for the face between j and j+1.
struct FaceFluxes {
  std::vector<double> fx;
  std::vector<double> fy;
};

FaceFluxes taxis_fluxes(const Field2D& u, const Field2D& phi) {
  const Grid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  FaceFluxes out;
  out.fx.resize(static_cast<std::size_t>(nx - 1) * ny);
  out.fy.resize(static_cast<std::size_t>(nx) * (ny - 1));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double vel = (phi(i + 1, j) - phi(i, j)) / g.hx();
      const double um = u(i > 0 ? i - 1 : i, j);
      const double up = u(i + 2 < nx ? i + 2 : i + 1, j);
      out.fx[static_cast<std::size_t>(j) * (nx - 1) + i] =
          upwind_face(um, u(i, j), u(i + 1, j), up, vel) * vel;
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double vel = (phi(i, j + 1) - phi(i, j)) / g.hy();
      const double um = u(i, j > 0 ? j - 1 : j);
      const double up = u(i, j + 2 < ny ? j + 2 : j + 1);
      out.fy[static_cast<std::size_t>(j) * nx + i] =
          upwind_face(um, u(i, j), u(i, j + 1), up, vel) * vel;
    }
  }
  return out;
}

Field2D divergence(const Grid& g, const FaceFluxes& f) {
  const int nx = g.nx(), ny = g.ny();
  Field2D out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t rx = static_cast<std::size_t>(j) * (nx - 1);
      const double fe = i + 1 < nx ? f.fx[rx + i] : 0.0;
      const double fw = i > 0 ? f.fx[rx + i - 1] : 0.0;
      const double fn = j + 1 < ny ? f.fy[static_cast<std::size_t>(j) * nx + i] : 0.0;
      const double fs = j > 0 ? f.fy[static_cast<std::size_t>(j - 1) * nx + i] : 0.0;
      out(i, j) = (fe - fw) / g.hx() + (fn - fs) / g.hy();
    }
  }
  return out;
}
}  // namespace

Field2D& Field2D::operator+=(const Field2D& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field2D& Field2D::operator-=(const Field2D& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field2D& Field2D::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

Field2D& Field2D::axpy(double a, const Field2D& x) {
  require_same_grid(*this, x);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

Field2D laplacian_neumann(const Field2D& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  Field2D out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = f(i, j);
      const double fe = i + 1 < nx ? (f(i + 1, j) - c) / g.hx() : 0.0;
      const double fw = i > 0 ? (c - f(i - 1, j)) / g.hx() : 0.0;
      const double fn = j + 1 < ny ? (f(i, j + 1) - c) / g.hy() : 0.0;
      const double fs = j > 0 ? (c - f(i, j - 1)) / g.hy() : 0.0;
      out(i, j) = (fe - fw) / g.hx() + (fn - fs) / g.hy();
    }
  }
  return out;
}

Field2D taxis_divergence(const Field2D& u, const Field2D& phi) {
  require_same_grid(u, phi);
  return divergence(u.grid(), taxis_fluxes(u, phi));
}

TransportResult upwind_transport_step(const Field2D& u, const Field2D& phi, double dt) {
  require_same_grid(u, phi);
  const Grid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  FaceFluxes f = taxis_fluxes(u, phi);

  // Outflow of each cell over dt, in units of u.
  std::vector<double> outflow(g.size(), 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double flux = f.fx[static_cast<std::size_t>(j) * (nx - 1) + i];
      const int donor = flux > 0.0 ? i : i + 1;
      outflow[g.index(donor, j)] += dt * std::abs(flux) / g.hx();
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double flux = f.fy[static_cast<std::size_t>(j) * nx + i];
      const int donor = flux > 0.0 ? j : j + 1;
      outflow[g.index(i, donor)] += dt * std::abs(flux) / g.hy();
    }
  }

  TransportResult res{Field2D(g), 0};
  std::vector<double> scale(g.size(), 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double avail = std::max(u[k], 0.0);
    if (outflow[k] > avail) {
      scale[k] = outflow[k] > 0.0 ? avail / outflow[k] : 1.0;
      ++res.limited_cells;
    }
  }
  if (res.limited_cells > 0) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i + 1 < nx; ++i) {
        double& flux = f.fx[static_cast<std::size_t>(j) * (nx - 1) + i];
        flux *= scale[g.index(flux > 0.0 ? i : i + 1, j)];
      }
    }
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        double& flux = f.fy[static_cast<std::size_t>(j) * nx + i];
        flux *= scale[g.index(i, flux > 0.0 ? j : j + 1)];
      }
    }
  }

  const Field2D div = divergence(g, f);
  for (std::size_t k = 0; k < g.size(); ++k) {
    double v = u[k] - dt * div[k];
    // A fully drained cell can come out as -1e-17 from cancellation.
    if (v < 0.0 && v > -1e-14 * (std::abs(u[k]) + 1e-300)) v = 0.0;
    res.u[k] = v;
  }
  return res;
}

double integrate(const Field2D& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s * f.grid().cell_area();
}

double lebesgue(const Field2D& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
  }
  if (!(p > 0.0)) throw DomainError("Lebesgue exponent must be positive");
  double s = 0.0;
  if (p == 1.0) {
    for (double x : f.values()) s += std::abs(x);
  } else if (p == 2.0) {
    for (double x : f.values()) s += x * x;
  } else {
    for (double x : f.values()) s += std::pow(std::abs(x), p);
  }
  s *= f.grid().cell_area();
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

double norm(const Field2D& f, double p) {
  if (!(p >= 1.0)) throw DomainError("norm exponent must be >= 1");
  return lebesgue(f, p);
}

Field2D grad_magnitude(const Field2D& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  Field2D out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = f(i, j);
      const double fe = i + 1 < nx ? (f(i + 1, j) - c) / g.hx() : 0.0;
      const double fw = i > 0 ? (c - f(i - 1, j)) / g.hx() : 0.0;
      const double fn = j + 1 < ny ? (f(i, j + 1) - c) / g.hy() : 0.0;
      const double fs = j > 0 ? (c - f(i, j - 1)) / g.hy() : 0.0;
      out(i, j) = std::sqrt(0.5 * (fe * fe + fw * fw) + 0.5 * (fn * fn + fs * fs));
    }
  }
  return out;
}

double grad_norm(const Field2D& f, double q) {
  if (!(q >= 1.0)) throw DomainError("gradient norm exponent must be >= 1");
  return lebesgue(grad_magnitude(f), q);
}

double grad_dot_integral(const Field2D& a, const Field2D& b) {
  require_same_grid(a, b);
  const Grid& g = a.grid();
  const int nx = g.nx(), ny = g.ny();
  double sx = 0.0, sy = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i)
      sx += (a(i + 1, j) - a(i, j)) * (b(i + 1, j) - b(i, j));
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i)
      sy += (a(i, j + 1) - a(i, j)) * (b(i, j + 1) - b(i, j));
  return sx * g.hy() / g.hx() + sy * g.hx() / g.hy();
}

double max_face_gradient(const Field2D& f) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i)
      m = std::max(m, std::abs(f(i + 1, j) - f(i, j)) / g.hx());
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      m = std::max(m, std::abs(f(i, j + 1) - f(i, j)) / g.hy());
  return m;
}

Field2D reflect_x(const Field2D& f) {
  const Grid& g = f.grid();
  Field2D out(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out(i, j) = f(g.nx() - 1 - i, j);
  return out;
}

Field2D reflect_y(const Field2D& f) {
  const Grid& g = f.grid();
  Field2D out(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out(i, j) = f(i, g.ny() - 1 - j);
  return out;
}

Field2D transpose(const Field2D& f) {
  const Grid& g = f.grid();
  Field2D out(g.transposed());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out(j, i) = f(i, j);
  return out;
}

}  // namespace chemohapto
