#include <cmath>
#include <numbers>

#include "strichlab/error.hpp"
#include "strichlab/spectral.hpp"

namespace strichlab::spectral {

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(m);
  return s;
}

double Grid::fundamental() const { return 2.0 * std::numbers::pi / L; }
double Grid::nyquist() const { return std::numbers::pi / spacing(); }
double Grid::cell_volume() const { return std::pow(spacing(), n); }

double Grid::wavenumber(int k) const {
  const int signed_k = k < m / 2 ? k : k - m;
  return fundamental() * signed_k;
}

Grid make_grid(int n, int m, double L) {
  if (n < 1 || n > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
  if (m < 8 || (m & (m - 1)) != 0) throw InvalidArgument("samples per axis must be a power of two >= 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("box length must be positive");
  return Grid{n, m, L};
}

Field zeros(const Grid& grid) { return Field{grid, std::vector<cplx>(grid.size())}; }

Point position(const Grid& grid, std::size_t index) {
  Point p{0.0, 0.0, 0.0};
  const auto m = static_cast<std::size_t>(grid.m);
  for (int d = grid.n - 1; d >= 0; --d) {
    p[d] = grid.coordinate(static_cast<int>(index % m));
    index /= m;
  }
  return p;
}

Point frequency(const Grid& grid, std::size_t index) {
  Point p{0.0, 0.0, 0.0};
  const auto m = static_cast<std::size_t>(grid.m);
  for (int d = grid.n - 1; d >= 0; --d) {
    p[d] = grid.wavenumber(static_cast<int>(index % m));
    index /= m;
  }
  return p;
}

Field sample(const Grid& grid, const std::function<cplx(const Point&)>& f) {
  Field u = zeros(grid);
  for (std::size_t i = 0; i < u.samples.size(); ++i) u.samples[i] = f(position(grid, i));
  return u;
}

namespace {

void require_same_grid(const Field& f, const Field& g) {
  if (!(f.grid == g.grid) || f.samples.size() != g.samples.size())
    throw InvalidArgument("fields live on different grids");
}

}  // namespace

cplx inner_product(const Field& f, const Field& g) {
  require_same_grid(f, g);
  // Neumaier-compensated in both components.
  double sr = 0, cr = 0, si = 0, ci = 0;
  auto add = [](double& s, double& c, double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  };
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    const cplx z = f.samples[i] * std::conj(g.samples[i]);
    add(sr, cr, z.real());
    add(si, ci, z.imag());
  }
  return cplx(sr + cr, si + ci) * f.grid.cell_volume();
}

double l2_norm(const Field& u) { return std::sqrt(std::max(0.0, inner_product(u, u).real())); }

double sup_norm(const Field& u) {
  double s = 0.0;
  for (const auto& z : u.samples) s = std::max(s, std::abs(z));
  return s;
}

Field operator+(const Field& f, const Field& g) {
  require_same_grid(f, g);
  Field r = f;
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] += g.samples[i];
  return r;
}

Field operator-(const Field& f, const Field& g) {
  require_same_grid(f, g);
  Field r = f;
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] -= g.samples[i];
  return r;
}

Field operator*(cplx c, const Field& f) {
  Field r = f;
  for (auto& z : r.samples) z *= c;
  return r;
}

Field pointwise(const Field& f, const Field& g) {
  require_same_grid(f, g);
  Field r = f;
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] *= g.samples[i];
  return r;
}

double boundary_mass(const Field& u, double width_fraction) {
  const double edge = (0.5 - width_fraction) * u.grid.L;
  double outer = 0.0, total = 0.0;
  for (std::size_t i = 0; i < u.samples.size(); ++i) {
    const double w = std::norm(u.samples[i]);
    total += w;
    const Point x = position(u.grid, i);
    for (int d = 0; d < u.grid.n; ++d) {
      if (std::abs(x[d]) >= edge) {
        outer += w;
        break;
      }
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace strichlab::spectral
