#include <cmath>

#include "strichlab/error.hpp"
#include "strichlab/exponents.hpp"

namespace strichlab::exponents {

namespace {

constexpr double kVertexTolerance = 1e-12;

bool is_dispersive_vertex(const DispersionSetup& setup, const ExponentTuple& t) {
  return t.inv_p == 0.0 && t.inv_pt == 0.0 && t.inv_q == 0.0 && t.inv_qt == 0.0 &&
         std::abs(t.s - derivative_offset_r(setup)) <= kVertexTolerance;
}

}  // namespace

RegionMask region_sample(const DispersionSetup& setup, double inv_q, double inv_qt, double s,
                         int resolution, bool solve_s) {
  if (resolution < 8) throw InvalidArgument("region resolution must be >= 8");
  decay_parameters(setup);
  RegionMask mask;
  mask.resolution = resolution;
  mask.inv_q = inv_q;
  mask.inv_qt = inv_qt;
  mask.points.resize(static_cast<std::size_t>(resolution) * resolution);

  const double step = 0.5 / (resolution - 1);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      ExponentTuple t{inv_q, i * step, inv_qt, j * step, s};
      if (solve_s) t.s = scaling_s(setup, t);
      RegionPoint& pt = mask.points[static_cast<std::size_t>(i) * resolution + j];
      pt.inv_p = t.inv_p;
      pt.inv_pt = t.inv_pt;
      pt.s = t.s;
      pt.dispersive_vertex = is_dispersive_vertex(setup, t);

      const auto local = check_local(setup, t);
      const auto nonsharp = check_global_nonsharp(setup, t);
      const auto sharp = check_global_sharp(setup, t);
      if (local.feasible) pt.code |= kLocalBit;
      if (nonsharp.feasible) pt.code |= kNonsharpBit;
      if (sharp.feasible) pt.code |= kSharpBit;
      // Prefer the strongest witness for reporting.
      if (sharp.witness) pt.witness = sharp.witness;
      else if (nonsharp.witness) pt.witness = nonsharp.witness;
      else pt.witness = local.witness;
    }
  }
  return mask;
}

ApplicationVertices application_vertices(const DispersionSetup& setup) {
  validate(setup);
  if (!(setup.a > 1.0 && setup.a < 2.0))
    throw InvalidArgument("application vertices are defined for 1 < a < 2");
  const double n = setup.n;
  const double a = setup.a;
  const double c = n / (2.0 * (n + 1.0));
  const double b = n / (n + a) - c;
  return {{(n - a) / (2.0 * n), 0.5}, {b, b}, {c, c}, {0.5, 0.0}};
}

ExponentTuple corollary_tuple(int n, double a, double q) {
  const double inv_q = 1.0 / q;
  const double inv_qt = n / (n + a) - inv_q;
  return ExponentTuple{inv_q, inv_q, inv_qt, inv_qt, 0.0};
}

CorollaryResult corollary_delta_search(int n, double epsilon,
                                       const CorollarySearchOptions& options) {
  if (n < 3) throw InvalidArgument("neighbourhood search needs n >= 3");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
  if (!(options.delta_step > 0.0 && options.a_step > 0.0 && options.delta_max <= 1.0))
    throw InvalidArgument("bad corollary search grid");

  CorollaryResult result;
  const auto q_of = [n](double a) { return 2.0 * (n + a) / n; };

  // Closed forms at a = 2.
  {
    const DispersionSetup at_two{2.0, n};
    const DecayWindow w = decay_parameters(at_two);
    const double q0 = q_of(2.0);
    const double mid = 0.5 * (w.sigma + w.sigma_ext);
    result.q_at_two = q0;
    result.mu_at_two = mu_value(at_two, corollary_tuple(n, 2.0, q0), mid, mid).value_or(NAN);
    const double h = 1e-4;
    result.dq_da = (q_of(2.0 + h) - q_of(2.0 - h)) / (2.0 * h);
  }

  // Walk delta upward; a-samples 2 - j * a_step are added as soon as they fall
  // inside [2 - delta, 2).
  std::vector<CorollarySample> accepted;
  int next_j = 1;
  const int k_max = static_cast<int>(std::floor(options.delta_max / options.delta_step + 1e-9));
  for (int k = 1; k <= k_max; ++k) {
    const double delta = k * options.delta_step;
    std::vector<CorollarySample> fresh;
    bool ok = true;
    while (ok && next_j * options.a_step <= delta + 1e-12) {
      const double a = 2.0 - next_j * options.a_step;
      const DispersionSetup setup{a, n};
      const double q0 = q_of(a);
      for (double f : options.q_offsets) {
        const double q = q0 * (1.0 + f * epsilon);
        const ExponentTuple t = corollary_tuple(n, a, q);
        if (!(t.inv_qt > 0.0 && t.inv_qt <= 1.0)) {
          ok = false;
          break;
        }
        const auto v = check_global_nonsharp(setup, t);
        if (!v.feasible) {
          ok = false;
          break;
        }
        fresh.push_back({a, q, 1.0 / t.inv_qt, *v.witness});
      }
      if (ok) ++next_j;
    }
    if (!ok) break;
    accepted.insert(accepted.end(), fresh.begin(), fresh.end());
    result.delta = delta;
    result.witnesses = accepted;
  }
  return result;
}

}  // namespace strichlab::exponents
