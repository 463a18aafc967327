#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's algorithms for the quantity being checked.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Free Schroedinger evolution of exp(-|x|^2/2) with fhat = \int f e^{-ix.xi}:
/// u(t, x) = (1 - 2it)^{-n/2} exp(-|x|^2 / (2 (1 - 2it))).
inline cplx gaussian_schroedinger(int n, double t, const double* x) {
  const cplx w(1.0, -2.0 * t);
  cplx v = 1.0;
  for (int d = 0; d < n; ++d) v *= std::exp(-x[d] * x[d] / (2.0 * w)) / std::sqrt(w);
  return v;
}

/// sup_x |u(t, x)| for the solution above.
inline double gaussian_amplitude(int n, double t) { return std::pow(1.0 + 4.0 * t * t, -0.25 * n); }

/// ||exp(-|x|^2/2)||_{L^2}^2 = pi^{n/2}.
inline double gaussian_l2_squared(int n) { return std::pow(std::numbers::pi, 0.5 * n); }

/// ||exp(-|x|^2/2)||_{L^p}^p = (2 pi / p)^{n/2}.
inline double gaussian_lp_pow(int n, double p) { return std::pow(2.0 * std::numbers::pi / p, 0.5 * n); }

/// ||D exp(-|x|^2/2)||_{L^2}^2 = (n/2) pi^{n/2}.
inline double gaussian_h1_squared(int n) { return 0.5 * n * std::pow(std::numbers::pi, 0.5 * n); }

/// Mode-wise closed form of \int_0^t e^{i(t-s)w} ds.
inline cplx duhamel_constant(double w, double t) {
  if (w == 0.0) return t;
  return (std::exp(cplx(0.0, w * t)) - 1.0) / cplx(0.0, w);
}

/// mu written exactly as in the theorem, with finite exponents.
inline double mu_direct(double a, int n, double sigma, double p, double pt, double s, double s1,
                        double s2) {
  const double r = (a * sigma - n) / 2.0;
  return (a / 2.0) * (s1 / 2.0 + s2 / 2.0 - sigma) /
         (s - r + ((a * s1 - n) / p + (a * s2 - n) / pt) / 2.0);
}

/// Global non-sharp system in mu form with finite exponents, for one pair.
inline bool nonsharp_direct(double a, int n, double sigma, double q, double p, double qt,
                            double pt, double s, double s1, double s2) {
  const double mu = mu_direct(a, n, sigma, p, pt, s, s1, s2);
  if (!(mu >= 1.0) || !std::isfinite(mu) || mu <= 0.0) return false;
  const double eps = 1e-12;
  return (s1 - 1) / s1 * p / 2 <= mu + eps && mu <= p / 2 + eps &&
         (s2 - 1) / s2 * pt / 2 <= mu + eps && mu <= pt / 2 + eps &&
         (s1 / 2) / (1 / q + s1 / p) < mu && (s2 / 2) / (1 / qt + s2 / pt) < mu;
}

/// Whitney family by the verbal rule: equal scale T 2^-j, separated intervals
/// whose parents touch or coincide, plus touching pairs at the finest scale.
/// Returned as (level, a, b) with interval indices a < b.
inline std::vector<std::tuple<int, long, long>> whitney_bruteforce(int levels) {
  std::vector<std::tuple<int, long, long>> out;
  for (int j = 1; j <= levels; ++j) {
    const long count = 1L << j;
    for (long a = 0; a < count; ++a)
      for (long b = a + 1; b < count; ++b) {
        // distances measured in units of the scale
        const long gap = b - a - 1;
        const long pgap = (b / 2) - (a / 2) - 1;  // -1 means same parent
        const bool touching = gap == 0;
        if (!touching && pgap <= 0) out.emplace_back(j, a, b);
        if (touching && j == levels) out.emplace_back(j, a, b);
      }
  }
  return out;
}

/// Simple deterministic generator independent of the library's RNG.
struct SplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace oracle
