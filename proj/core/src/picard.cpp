#include <algorithm>
#include <cmath>

#include "strichlab/error.hpp"
#include "strichlab/spectral.hpp"

namespace strichlab::spectral {

double slab_distance(const TimeSlab& a, const TimeSlab& b) {
  if (a.count() != b.count()) throw InvalidArgument("slabs have different lengths");
  double d = 0.0;
  for (std::size_t k = 0; k < a.count(); ++k) d = std::max(d, l2_norm(a.fields[k] - b.fields[k]));
  return d;
}

TimeSlab solution_map(const DispersionSetup& setup, const TimeSlab& V, const Field& u0,
                      const TimeSlab& u) {
  validate(V);
  validate(u);
  if (u.count() != V.count() || !(u.grid() == V.grid()) || !(u0.grid == V.grid()))
    throw InvalidArgument("potential, data and iterate must share grid and time nodes");
  TimeSlab forcing{V.t0, V.dt, {}};
  forcing.fields.reserve(V.count());
  for (std::size_t k = 0; k < V.count(); ++k)
    forcing.fields.push_back(pointwise(V.fields[k], u.fields[k]));
  const TimeSlab duh = duhamel_slab(setup, forcing);
  TimeSlab out = free_evolution(setup, u0, 0.0, V.dt, V.count());
  out.t0 = V.t0;
  for (std::size_t k = 0; k < out.count(); ++k)
    out.fields[k] = out.fields[k] - cplx(0.0, 1.0) * duh.fields[k];
  return out;
}

PicardResult picard_solve(const DispersionSetup& setup, const TimeSlab& V, const Field& u0,
                          const PicardOptions& options) {
  validate(V);
  if (!(u0.grid == V.grid())) throw InvalidArgument("data and potential live on different grids");
  if (options.max_iter < 1) throw InvalidArgument("max_iter must be positive");

  PicardResult res;
  res.u = free_evolution(setup, u0, 0.0, V.dt, V.count());
  res.u.t0 = V.t0;
  int growth_run = 0;
  for (int it = 0; it < options.max_iter; ++it) {
    TimeSlab next = solution_map(setup, V, u0, res.u);
    const double r = slab_distance(next, res.u);
    res.u = std::move(next);
    if (!res.residuals.empty() && r > res.residuals.back()) ++growth_run;
    else growth_run = 0;
    res.residuals.push_back(r);
    if (r < options.tol) {
      res.converged = true;
      break;
    }
    if (growth_run >= options.divergence_run) {
      res.diverged = true;
      break;
    }
  }
  res.fixed_point_residual = slab_distance(res.u, solution_map(setup, V, u0, res.u));
  return res;
}

WindowedPicardResult picard_solve_windowed(const DispersionSetup& setup, const TimeSlab& V,
                                           const Field& u0, int windows,
                                           const PicardOptions& options) {
  validate(V);
  if (windows < 1) throw InvalidArgument("need at least one window");
  const std::size_t intervals = V.count() - 1;
  if (intervals % static_cast<std::size_t>(windows) != 0)
    throw InvalidArgument("slab intervals must split evenly into windows");
  const std::size_t per = intervals / static_cast<std::size_t>(windows);

  WindowedPicardResult out;
  out.u = TimeSlab{V.t0, V.dt, {}};
  out.converged = true;
  Field start = u0;
  for (int w = 0; w < windows; ++w) {
    TimeSlab piece{V.time(w * per), V.dt, {}};
    for (std::size_t k = 0; k <= per; ++k) piece.fields.push_back(V.fields[w * per + k]);
    PicardResult r = picard_solve(setup, piece, start, options);
    out.converged = out.converged && r.converged;
    const std::size_t first = w == 0 ? 0 : 1;
    for (std::size_t k = first; k < r.u.count(); ++k) out.u.fields.push_back(r.u.fields[k]);
    start = r.u.fields.back();
    out.windows.push_back(std::move(r));
  }
  return out;
}

}  // namespace strichlab::spectral
