#include "strichlab/mixednorm.hpp"

#include <algorithm>
#include <cmath>

#include "spectral_internal.hpp"
#include "strichlab/error.hpp"

namespace strichlab::mixednorm {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const NormSpec& spec) {
  if (!in_unit(spec.inv_q) || !in_unit(spec.inv_p))
    throw InvalidArgument("norm reciprocals must lie in [0, 1]");
  if (spec.angular_exponent != 2.0) throw InvalidArgument("only angular exponent 2 is realized");
}

double lp_norm(const Field& u, double inv_p) {
  if (!in_unit(inv_p)) throw InvalidArgument("1/p must lie in [0, 1]");
  const double top = spectral::sup_norm(u);
  if (inv_p == 0.0 || top == 0.0) return top;
  const double p = 1.0 / inv_p;
  // Scaled by the maximum to stay clear of overflow for large p.
  double sum = 0.0;
  for (const auto& z : u.samples) sum += std::pow(std::abs(z) / top, p);
  return top * std::pow(sum * u.grid.cell_volume(), inv_p);
}

double lp_norm(const spectral::ProductField& u, double inv_p) {
  if (u.factors.empty()) throw InvalidArgument("product field has no factors");
  double v = 1.0;
  for (const auto& f : u.factors) v *= lp_norm(f, inv_p);
  return v;
}

double time_norm(const std::vector<double>& values, double dt, double inv_q) {
  if (values.empty()) throw InvalidArgument("no time samples");
  if (!in_unit(inv_q)) throw InvalidArgument("1/q must lie in [0, 1]");
  const double top = *std::max_element(values.begin(), values.end());
  if (inv_q == 0.0 || top == 0.0) return top;
  const double q = 1.0 / inv_q;
  double sum = 0.0;
  if (values.size() == 1) {
    sum = dt;
  } else {
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double w = (k == 0 || k + 1 == values.size()) ? 0.5 * dt : dt;
      sum += w * std::pow(values[k] / top, q);
    }
  }
  return top * std::pow(sum, inv_q);
}

double mixed_norm(const TimeSlab& slab, const NormSpec& spec) {
  validate(spec);
  spectral::validate(slab);
  std::vector<double> v;
  v.reserve(slab.count());
  for (const auto& f : slab.fields) v.push_back(lp_norm(f, spec.inv_p));
  return time_norm(v, slab.dt, spec.inv_q);
}

std::string_view to_string(RangeSpace space) {
  return space == RangeSpace::lebesgue ? "lebesgue" : "spherical";
}

RangeSpace parse_range_space(std::string_view text) {
  if (text == "lebesgue") return RangeSpace::lebesgue;
  if (text == "spherical") return RangeSpace::spherical;
  throw InvalidArgument("unknown range space '" + std::string(text) + "'");
}

double z_norm(const Field& u, double inv_p, const ZContext& ctx) {
  if (ctx.space == RangeSpace::lebesgue) return lp_norm(u, inv_p);
  if (ctx.polar == nullptr) throw InvalidArgument("spherical range space needs a polar resampling");
  return spherical_norm(u, inv_p, *ctx.polar);
}

double z_mixed_norm(const TimeSlab& slab, double inv_q, double inv_p, const ZContext& ctx) {
  spectral::validate(slab);
  std::vector<double> v;
  v.reserve(slab.count());
  for (const auto& f : slab.fields) v.push_back(z_norm(f, inv_p, ctx));
  return time_norm(v, slab.dt, inv_q);
}

namespace {

// z norms of P_N u for every N of the window from a single forward transform.
// Annuli holding less than 1e-30 of the spectral energy (roundoff after a
// propagation) are reported as zero instead of being transformed back.
std::vector<double> piece_norms(const Field& u, const std::vector<double>& window, double inv_p,
                                const ZContext& ctx) {
  const Grid& g = u.grid;
  std::vector<spectral::cplx> hat = u.samples;
  spectral::transform_modes(g, hat, true);
  std::vector<double> radius(hat.size());
  spectral::visit_mode_norms(g, [&](std::size_t i, double r) { radius[i] = r; });
  double total = 0.0;
  for (const auto& z : hat) total += std::norm(z);

  const double inv = 1.0 / static_cast<double>(g.size());
  std::vector<double> out;
  out.reserve(window.size());
  Field piece{g, std::vector<spectral::cplx>(hat.size())};
  for (double N : window) {
    spectral::require_dyadic(N);
    double energy = 0.0;
    for (std::size_t i = 0; i < hat.size(); ++i) {
      const double x = radius[i] / N;
      const double c = (x > 0.5 && x < 2.0) ? ctx.profile.chi(x) : 0.0;
      piece.samples[i] = hat[i] * (c * inv);
      energy += c * c * std::norm(hat[i]);
    }
    if (!(energy > 1e-30 * total)) {
      out.push_back(0.0);
      continue;
    }
    spectral::transform_modes(g, piece.samples, false);
    out.push_back(z_norm(piece, inv_p, ctx));
  }
  return out;
}

// v[N][k] = ||P_N F(t_k)||_{Z_p}.
std::vector<std::vector<double>> slab_piece_norms(const TimeSlab& slab, const std::vector<double>& window,
                                                  double inv_p, const ZContext& ctx) {
  std::vector<std::vector<double>> v(window.size(), std::vector<double>(slab.count()));
  for (std::size_t k = 0; k < slab.count(); ++k) {
    const auto norms = piece_norms(slab.fields[k], window, inv_p, ctx);
    for (std::size_t j = 0; j < window.size(); ++j) v[j][k] = norms[j];
  }
  return v;
}

}  // namespace

double besov_z_norm(const Field& u, double s, double inv_p, const ZContext& ctx) {
  const auto window = spectral::dyadic_window(u.grid);
  const auto norms = piece_norms(u, window, inv_p, ctx);
  double sum = 0.0;
  for (std::size_t j = 0; j < window.size(); ++j) sum += std::pow(window[j], 2.0 * s) * norms[j] * norms[j];
  return std::sqrt(sum);
}

double z_spq_norm(const TimeSlab& slab, double s, double inv_p, double inv_q, const ZContext& ctx) {
  spectral::validate(slab);
  if (!in_unit(inv_q)) throw InvalidArgument("1/q must lie in [0, 1]");
  const auto window = spectral::dyadic_window(slab.grid());
  const auto v = slab_piece_norms(slab, window, inv_p, ctx);
  double sum = 0.0;
  for (std::size_t j = 0; j < window.size(); ++j) {
    const double w = time_norm(v[j], slab.dt, inv_q);
    sum += std::pow(window[j], 2.0 * s) * w * w;
  }
  return std::sqrt(sum);
}

double besov_mixed_norm(const TimeSlab& slab, double s, double inv_p, double inv_q,
                        const ZContext& ctx) {
  spectral::validate(slab);
  std::vector<double> v;
  v.reserve(slab.count());
  for (const auto& f : slab.fields) v.push_back(besov_z_norm(f, s, inv_p, ctx));
  return time_norm(v, slab.dt, inv_q);
}

double sobolev_norm(const Field& u, double s, bool homogeneous) {
  if (!std::isfinite(s)) throw InvalidArgument("Sobolev index must be finite");
  if (s == 0.0) return spectral::l2_norm(u);
  if (homogeneous && s < 0.0) {
    spectral::cplx mean = 0.0;
    double mass = 0.0;
    for (const auto& z : u.samples) {
      mean += z;
      mass += std::abs(z);
    }
    if (std::abs(mean) > 1e-12 * std::max(1.0, mass))
      throw InvalidArgument("negative homogeneous Sobolev norm needs a vanishing zero mode");
  }
  const Field w = spectral::apply_radial_multiplier(u, [&](double r) -> spectral::cplx {
    if (homogeneous) return r == 0.0 ? 0.0 : std::pow(r, s);
    return std::pow(1.0 + r * r, 0.5 * s);
  });
  return spectral::l2_norm(w);
}

double y_norm(const TimeSlab& slab, double inv_q, double inv_p, const PolarResampling& polar,
              const CutoffProfile& profile) {
  spectral::validate(slab);
  if (!in_unit(inv_q)) throw InvalidArgument("1/q must lie in [0, 1]");
  const ZContext ctx{RangeSpace::spherical, &polar, profile};
  const auto window = spectral::dyadic_window(slab.grid());
  double sum = 0.0;
  for (const auto& v : slab_piece_norms(slab, window, inv_p, ctx)) sum += time_norm(v, slab.dt, inv_q);
  return sum;
}

OverlapBounds overlap_bounds(const CutoffProfile& profile) {
  // sum_N chi(r/N)^2 is invariant under r -> 2r, so one octave suffices.
  OverlapBounds b{1e300, 0.0};
  constexpr int kSamples = 4096;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = std::exp2(static_cast<double>(i) / kSamples);
    double sum = 0.0;
    for (int k = -3; k <= 3; ++k) {
      const double c = profile.chi(r / std::ldexp(1.0, k));
      sum += c * c;
    }
    b.lower = std::min(b.lower, sum);
    b.upper = std::max(b.upper, sum);
  }
  return b;
}

}  // namespace strichlab::mixednorm
