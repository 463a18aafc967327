#include <cmath>
#include <numbers>

#include "spectral_internal.hpp"
#include "strichlab/error.hpp"
#include "strichlab/mixednorm.hpp"

namespace strichlab::mixednorm {

namespace {

using spectral::cplx;

constexpr double kRadiusFraction = 0.45;
// Ring samples come from a spectrally refined copy so the stencil error
// stays well below the Cartesian resolution. Capped to bound memory.
constexpr int kRefinedAxisCap = 2048;

}  // namespace

// The weighted field is u plus the correction sum_k ((1+k^2)^{alpha/2} - 1)
// c_k(r) e^{ik theta}, so interpolation errors only enter through the
// correction and alpha = 0 is an exact identity.
Field angular_weight(const Field& u, double alpha) {
  if (u.grid.n != 2) throw InvalidArgument("angular weights are only available for n = 2");
  if (!std::isfinite(alpha)) throw InvalidArgument("angular exponent must be finite");
  if (alpha == 0.0) return u;

  const Grid& g = u.grid;
  int refine_by = 1;
  while (refine_by < 4 && g.m * refine_by * 2 <= kRefinedAxisCap) refine_by *= 2;
  const Field fine = spectral::refine(u, refine_by);
  const double dr = 0.5 * g.spacing();
  const int rings = static_cast<int>(std::floor(kRadiusFraction * g.L / dr));
  const int M = 4 * g.m;
  const Grid ring_grid = spectral::make_grid(1, M, 2.0 * std::numbers::pi);

  // Angular coefficients c_k(r_i), FFT order, one row per ring (r_0 = 0).
  std::vector<std::vector<cplx>> coeff(static_cast<std::size_t>(rings) + 1);
  for (int i = 0; i <= rings; ++i) {
    std::vector<cplx> ring(static_cast<std::size_t>(M));
    const double r = i * dr;
    for (int j = 0; j < M; ++j) {
      const double th = 2.0 * std::numbers::pi * j / M;
      ring[j] = interpolate(fine, {r * std::cos(th), r * std::sin(th), 0.0});
    }
    spectral::transform_modes(ring_grid, ring, true);
    for (auto& z : ring) z /= static_cast<double>(M);
    coeff[i] = std::move(ring);
  }

  std::vector<double> factor(static_cast<std::size_t>(M), 0.0);
  std::vector<int> order(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    const int k = j < M / 2 ? j : j - M;
    order[j] = k;
    if (j != M / 2) factor[j] = std::pow(1.0 + double(k) * k, 0.5 * alpha) - 1.0;
  }

  // c_k at radius r by a 6-point stencil; negative radii use c_k(-r) = (-1)^k c_k(r).
  const double r_limit = (rings - 3) * dr;
  Field out = u;
  std::vector<cplx> ck(static_cast<std::size_t>(M));
  for (std::size_t idx = 0; idx < out.samples.size(); ++idx) {
    const spectral::Point x = spectral::position(g, idx);
    const double r = std::hypot(x[0], x[1]);
    if (r > r_limit) continue;
    const double s = r / dr;
    const int i0 = static_cast<int>(std::floor(s));
    const double t = s - i0;
    double w[6];
    for (int a = 0; a < 6; ++a) {
      double v = 1.0;
      for (int b = 0; b < 6; ++b)
        if (b != a) v *= (t - (b - 2)) / double(a - b);
      w[a] = v;
    }
    std::fill(ck.begin(), ck.end(), cplx(0.0));
    for (int a = 0; a < 6; ++a) {
      const int ring = i0 + a - 2;
      const auto& row = coeff[static_cast<std::size_t>(std::abs(ring))];
      for (int j = 0; j < M; ++j) {
        const double sign = (ring < 0 && (order[j] & 1)) ? -1.0 : 1.0;
        ck[j] += w[a] * sign * row[j];
      }
    }
    const double th = std::atan2(x[1], x[0]);
    cplx corr = 0.0;
    for (int j = 0; j < M; ++j)
      if (factor[j] != 0.0) corr += factor[j] * ck[j] * std::polar(1.0, order[j] * th);
    out.samples[idx] += corr;
  }
  return out;
}

}  // namespace strichlab::mixednorm
