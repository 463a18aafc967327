#include <algorithm>
#include <cmath>
#include <numbers>

#include "strichlab/error.hpp"
#include "strichlab/mixednorm.hpp"

namespace strichlab::mixednorm {

namespace {

using spectral::cplx;
using spectral::Point;

struct Rule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

Rule gauss_legendre(int count) {
  Rule r;
  r.nodes.resize(count);
  r.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

constexpr int kStencil = 6;
constexpr int kStencilLeft = 2;  // offsets -2 .. 3

void lagrange_weights(double t, double* w) {
  for (int k = 0; k < kStencil; ++k) {
    const double xk = k - kStencilLeft;
    double v = 1.0;
    for (int j = 0; j < kStencil; ++j) {
      if (j == k) continue;
      const double xj = j - kStencilLeft;
      v *= (t - xj) / (xk - xj);
    }
    w[k] = v;
  }
}

}  // namespace

cplx interpolate(const Field& u, const Point& x) {
  const Grid& g = u.grid;
  const double h = g.spacing();
  int base[3] = {0, 0, 0};
  double w[3][kStencil];
  for (int d = 0; d < g.n; ++d) {
    const double s = (x[d] + 0.5 * g.L) / h;
    const double fl = std::floor(s);
    base[d] = static_cast<int>(fl) - kStencilLeft;
    lagrange_weights(s - fl, w[d]);
  }
  const int m = g.m;
  auto wrap = [m](int i) { return ((i % m) + m) % m; };
  cplx sum = 0.0;
  if (g.n == 1) {
    for (int a = 0; a < kStencil; ++a) sum += w[0][a] * u.samples[wrap(base[0] + a)];
  } else if (g.n == 2) {
    for (int a = 0; a < kStencil; ++a) {
      const std::size_t row = static_cast<std::size_t>(wrap(base[0] + a)) * m;
      cplx inner = 0.0;
      for (int b = 0; b < kStencil; ++b) inner += w[1][b] * u.samples[row + wrap(base[1] + b)];
      sum += w[0][a] * inner;
    }
  } else {
    for (int a = 0; a < kStencil; ++a) {
      const std::size_t ia = static_cast<std::size_t>(wrap(base[0] + a)) * m;
      cplx mid = 0.0;
      for (int b = 0; b < kStencil; ++b) {
        const std::size_t row = (ia + wrap(base[1] + b)) * m;
        cplx inner = 0.0;
        for (int c = 0; c < kStencil; ++c) inner += w[2][c] * u.samples[row + wrap(base[2] + c)];
        mid += w[1][b] * inner;
      }
      sum += w[0][a] * mid;
    }
  }
  return sum;
}

PolarResampling::PolarResampling(const Grid& grid, const PolarOptions& options) : grid_(grid) {
  if (grid.n != 2 && grid.n != 3) throw InvalidArgument("polar resampling needs n = 2 or 3");
  if (options.radial_nodes_per_cell < 1 || !(options.radius_fraction > 0.0 && options.radius_fraction <= 0.5))
    throw InvalidArgument("bad polar resampling options");
  const double h = grid.spacing();
  const int panels = static_cast<int>(std::floor(options.radius_fraction * grid.L / h));
  const Rule rr = gauss_legendre(options.radial_nodes_per_cell);
  for (int k = 0; k < panels; ++k) {
    for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
      const double r = h * (k + 0.5 * (rr.nodes[i] + 1.0));
      radii_.push_back(r);
      radial_weights_.push_back(0.5 * h * rr.weights[i] * std::pow(r, grid.n - 1));
    }
  }

  if (grid.n == 2) {
    const int count = options.angular_nodes > 0 ? options.angular_nodes : 4 * grid.m;
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * std::numbers::pi * j / count;
      directions_.push_back({std::cos(th), std::sin(th), 0.0});
      angular_weights_.push_back(2.0 * std::numbers::pi / count);
    }
  } else {
    const int lat = options.angular_nodes > 0 ? options.angular_nodes : grid.m;
    const int lon = 2 * lat;
    const Rule lr = gauss_legendre(lat);
    for (int i = 0; i < lat; ++i) {
      const double c = lr.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < lon; ++j) {
        const double ph = 2.0 * std::numbers::pi * j / lon;
        directions_.push_back({s * std::cos(ph), s * std::sin(ph), c});
        angular_weights_.push_back(lr.weights[i] * 2.0 * std::numbers::pi / lon);
      }
    }
  }
}

std::vector<cplx> PolarResampling::resample(const Field& u) const {
  if (!(u.grid == grid_)) throw InvalidArgument("resampling built for a different grid");
  std::vector<cplx> out;
  out.reserve(radii_.size() * directions_.size());
  for (double r : radii_)
    for (const auto& w : directions_) out.push_back(interpolate(u, {r * w[0], r * w[1], r * w[2]}));
  return out;
}

std::vector<double> PolarResampling::angular_l2(const Field& u) const {
  if (!(u.grid == grid_)) throw InvalidArgument("resampling built for a different grid");
  std::vector<double> out;
  out.reserve(radii_.size());
  for (double r : radii_) {
    double s = 0.0;
    for (std::size_t j = 0; j < directions_.size(); ++j) {
      const auto& w = directions_[j];
      s += angular_weights_[j] * std::norm(interpolate(u, {r * w[0], r * w[1], r * w[2]}));
    }
    out.push_back(std::sqrt(s));
  }
  return out;
}

double spherical_norm(const Field& u, double inv_p, const PolarResampling& polar) {
  if (!(inv_p >= 0.0 && inv_p <= 1.0)) throw InvalidArgument("1/p must lie in [0, 1]");
  const std::vector<double> g = polar.angular_l2(u);
  const double top = g.empty() ? 0.0 : *std::max_element(g.begin(), g.end());
  if (inv_p == 0.0 || top == 0.0) return top;
  const double p = 1.0 / inv_p;
  double sum = 0.0;
  const auto& w = polar.radial_weights();
  for (std::size_t i = 0; i < g.size(); ++i) sum += w[i] * std::pow(g[i] / top, p);
  return top * std::pow(sum, inv_p);
}

double spherical_mixed_norm(const TimeSlab& slab, const NormSpec& spec,
                            const PolarResampling& polar) {
  validate(spec);
  spectral::validate(slab);
  std::vector<double> v;
  v.reserve(slab.count());
  for (const auto& f : slab.fields) v.push_back(spherical_norm(f, spec.inv_p, polar));
  return time_norm(v, slab.dt, spec.inv_q);
}

}  // namespace strichlab::mixednorm
