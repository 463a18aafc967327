#include <cmath>

#include "spectral_internal.hpp"
#include "strichlab/decomp.hpp"
#include "strichlab/error.hpp"

namespace strichlab::decomp {

namespace {

bool power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

DyadicInterval interval(double T, int level, std::int64_t k, std::int64_t cells_per) {
  DyadicInterval d;
  d.lambda = std::ldexp(T, -level);
  d.k = k;
  d.first_cell = k * cells_per;
  d.last_cell = (k + 1) * cells_per;
  return d;
}

}  // namespace

std::int64_t whitney_cells(int levels) { return std::int64_t{1} << levels; }

std::vector<WhitneySquare> whitney_decompose(double T, double dt, int levels) {
  if (!(T > 0.0) || !(dt > 0.0)) throw InvalidArgument("window and step must be positive");
  const double ratio = T / dt;
  const auto cells = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(cells)) > 1e-9 * ratio || !power_of_two(cells))
    throw InvalidArgument("T / dt must be a power of two");
  if (levels < 0 || whitney_cells(levels) > cells)
    throw InvalidArgument("levels exceeds log2(T / dt)");

  std::vector<WhitneySquare> out;
  for (int level = 1; level <= levels; ++level) {
    const std::int64_t count = whitney_cells(level);
    const std::int64_t per = cells / count;
    for (std::int64_t a = 0; a < count; ++a) {
      for (std::int64_t b = a + 1; b < count && b <= a + 3; ++b) {
        const bool adjacent = b == a + 1;
        const bool parents_close = (b / 2) - (a / 2) <= 1;
        if (adjacent ? level == levels : parents_close)
          out.push_back({interval(T, level, a, per), interval(T, level, b, per)});
      }
    }
  }
  return out;
}

namespace {

using Modes = std::vector<std::vector<cplx>>;

// Transformed U(-t_k) X_k for every node, in raw DFT normalization.
Modes pulled_back(const DispersionSetup& setup, const TimeSlab& X) {
  const auto& g = X.grid();
  const std::vector<double> w = spectral::mode_frequencies(setup, g);
  Modes out;
  out.reserve(X.count());
  for (std::size_t k = 0; k < X.count(); ++k) {
    std::vector<cplx> d = X.fields[k].samples;
    spectral::transform_modes(g, d, true);
    const double t = X.time(k);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= std::polar(1.0, -t * w[i]);
    out.push_back(std::move(d));
  }
  return out;
}

void require_compatible(const TimeSlab& F, const TimeSlab& G) {
  spectral::validate(F);
  spectral::validate(G);
  if (F.count() != G.count() || !(F.grid() == G.grid()) || F.dt != G.dt || F.t0 != G.t0)
    throw InvalidArgument("slabs must share grid and time lattice");
}

// Neumaier accumulation for complex values.
struct Accumulator {
  double sr = 0, cr = 0, si = 0, ci = 0;
  static void add(double& s, double& c, double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  void operator+=(cplx z) {
    add(sr, cr, z.real());
    add(si, ci, z.imag());
  }
  [[nodiscard]] cplx value() const { return {sr + cr, si + ci}; }
};

// L^2 inner product from raw DFT coefficients: (h^n / m^n) sum a conj(b).
cplx mode_inner(const spectral::Grid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  Accumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc.value() * (g.cell_volume() / static_cast<double>(g.size()));
}

struct Prepared {
  Modes A, B;
};

cplx square_value(const TimeSlab& F, const Prepared& p, const WhitneySquare& Q) {
  const std::int64_t count = static_cast<std::int64_t>(F.count());
  if (Q.I.first_cell < 0 || Q.J.last_cell > count || Q.I.last_cell > Q.J.first_cell)
    throw InvalidArgument("square does not fit the slab's cells");
  const std::size_t size = p.A.front().size();
  std::vector<cplx> sa(size, 0.0), sb(size, 0.0);
  for (std::int64_t i = Q.I.first_cell; i < Q.I.last_cell; ++i)
    for (std::size_t k = 0; k < size; ++k) sa[k] += p.A[i][k];
  for (std::int64_t j = Q.J.first_cell; j < Q.J.last_cell; ++j)
    for (std::size_t k = 0; k < size; ++k) sb[k] += p.B[j][k];
  return F.dt * F.dt * mode_inner(F.grid(), sa, sb);
}

}  // namespace

cplx bilinear_B(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G) {
  require_compatible(F, G);
  const Modes A = pulled_back(setup, F);
  const Modes B = pulled_back(setup, G);
  std::vector<cplx> prefix(A.front().size(), 0.0);
  Accumulator acc;
  for (std::size_t j = 1; j < F.count(); ++j) {
    for (std::size_t k = 0; k < prefix.size(); ++k) prefix[k] += A[j - 1][k];
    acc += mode_inner(F.grid(), prefix, B[j]);
  }
  return F.dt * F.dt * acc.value();
}

cplx bilinear_diagonal(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G) {
  require_compatible(F, G);
  const Modes A = pulled_back(setup, F);
  const Modes B = pulled_back(setup, G);
  Accumulator acc;
  for (std::size_t j = 0; j < F.count(); ++j) acc += mode_inner(F.grid(), A[j], B[j]);
  return F.dt * F.dt * acc.value();
}

cplx bilinear_BQ(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G,
                 const WhitneySquare& Q) {
  require_compatible(F, G);
  const Prepared p{pulled_back(setup, F), pulled_back(setup, G)};
  return square_value(F, p, Q);
}

cplx bilinear_sum(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G,
                  const std::vector<WhitneySquare>& squares) {
  require_compatible(F, G);
  const Prepared p{pulled_back(setup, F), pulled_back(setup, G)};
  Accumulator acc;
  for (const auto& Q : squares) acc += square_value(F, p, Q);
  return acc.value();
}

cplx bilinear_BN(const DispersionSetup& setup, double N, const TimeSlab& F, const TimeSlab& G,
                 const spectral::CutoffProfile& profile) {
  spectral::validate(F);
  TimeSlab PF{F.t0, F.dt, {}};
  for (const auto& f : F.fields) PF.fields.push_back(spectral::project(N, f, profile));
  return bilinear_B(setup, PF, G);
}

}  // namespace strichlab::decomp
