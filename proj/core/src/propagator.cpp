#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectral_internal.hpp"
#include "strichlab/error.hpp"
#include "strichlab/spectral.hpp"

namespace strichlab::spectral {

double dispersion_symbol(const DispersionSetup& setup, double xi_norm) {
  if (xi_norm == 0.0) return 0.0;
  return setup.a == 2.0 ? xi_norm * xi_norm : std::pow(xi_norm, setup.a);
}

std::vector<double> mode_frequencies(const DispersionSetup& setup, const Grid& grid) {
  std::vector<double> w(grid.size());
  visit_mode_norms(grid, [&](std::size_t i, double r) { w[i] = dispersion_symbol(setup, r); });
  return w;
}

Field propagate(const DispersionSetup& setup, double t, const Field& u) {
  exponents::validate(setup);
  if (t == 0.0) return u;
  return apply_radial_multiplier(
      u, [&](double r) { return std::polar(1.0, t * dispersion_symbol(setup, r)); });
}

Field ProductField::expand() const {
  if (factors.empty() || factors.size() > 3) throw InvalidArgument("product field needs 1-3 factors");
  const Grid& g1 = factors.front().grid;
  const Grid g = make_grid(static_cast<int>(factors.size()), g1.m, g1.L);
  Field u = zeros(g);
  const auto m = static_cast<std::size_t>(g1.m);
  for (std::size_t i = 0; i < u.samples.size(); ++i) {
    cplx v = 1.0;
    std::size_t idx = i;
    for (int d = g.n - 1; d >= 0; --d) {
      v *= factors[d].samples[idx % m];
      idx /= m;
    }
    u.samples[i] = v;
  }
  return u;
}

ProductField propagate(const DispersionSetup& setup, double t, const ProductField& u) {
  if (setup.a != 2.0) throw InvalidArgument("product propagation needs a = 2");
  ProductField r;
  for (const auto& f : u.factors) {
    if (f.grid.n != 1) throw InvalidArgument("product factors must be one-dimensional");
    r.factors.push_back(propagate(setup, t, f));
  }
  return r;
}

double sup_norm(const ProductField& u) {
  double s = 1.0;
  for (const auto& f : u.factors) s *= sup_norm(f);
  return s;
}

// Cutoff profile ---------------------------------------------------------------

namespace {

double bump_tail(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// C^infinity step, 0 for x <= 0 and 1 for x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double f = bump_tail(x);
  return f / (f + bump_tail(1.0 - x));
}

}  // namespace

double CutoffProfile::psi(double r) const { return 1.0 - smooth_step(r - 1.0); }
double CutoffProfile::chi(double r) const { return psi(r) - psi(2.0 * r); }
double CutoffProfile::chi_fattened(double r) const {
  return chi(2.0 * r) + chi(r) + chi(0.5 * r);
}

bool is_dyadic(double N) {
  if (!(N > 0.0) || !std::isfinite(N)) return false;
  int e = 0;
  return std::frexp(N, &e) == 0.5;
}

void require_dyadic(double N) {
  if (!is_dyadic(N)) throw InvalidArgument("frequency scale must be a power of two");
}

Field project(double N, const Field& u, const CutoffProfile& profile) {
  require_dyadic(N);
  return apply_radial_multiplier(u, [&](double r) { return cplx(profile.chi(r / N)); });
}

Field project_fattened(double N, const Field& u, const CutoffProfile& profile) {
  require_dyadic(N);
  return apply_radial_multiplier(u, [&](double r) { return cplx(profile.chi_fattened(r / N)); });
}

std::vector<double> dyadic_window(const Grid& grid) {
  const double lo = 4.0 * grid.fundamental();
  const double hi = 0.5 * grid.nyquist();
  std::vector<double> out;
  for (int k = static_cast<int>(std::ceil(std::log2(lo))); std::ldexp(1.0, k) <= hi; ++k)
    if (std::ldexp(1.0, k) >= lo) out.push_back(std::ldexp(1.0, k));
  return out;
}

// Time slabs -------------------------------------------------------------------

const Grid& TimeSlab::grid() const {
  if (fields.empty()) throw InvalidArgument("empty time slab");
  return fields.front().grid;
}

void validate(const TimeSlab& slab) {
  if (slab.fields.empty()) throw InvalidArgument("time slab is empty");
  if (!(slab.dt > 0.0) || !std::isfinite(slab.dt)) throw InvalidArgument("time step must be positive");
  for (const auto& f : slab.fields)
    if (!(f.grid == slab.fields.front().grid) || f.samples.size() != f.grid.size())
      throw InvalidArgument("slab fields do not share one grid");
}

TimeSlab make_slab(double t0, double dt, std::size_t count,
                   const std::function<Field(double)>& generator) {
  TimeSlab slab{t0, dt, {}};
  slab.fields.reserve(count);
  for (std::size_t k = 0; k < count; ++k) slab.fields.push_back(generator(slab.time(k)));
  validate(slab);
  return slab;
}

TimeSlab free_evolution(const DispersionSetup& setup, const Field& u0, double t0, double dt,
                        std::size_t count) {
  const std::vector<double> w = mode_frequencies(setup, u0.grid);
  std::vector<cplx> hat = u0.samples;
  transform_modes(u0.grid, hat, true);
  const double inv = 1.0 / static_cast<double>(u0.grid.size());
  TimeSlab slab{t0, dt, {}};
  for (std::size_t k = 0; k < count; ++k) {
    const double t = slab.time(k);
    Field f{u0.grid, hat};
    for (std::size_t i = 0; i < hat.size(); ++i) f.samples[i] *= std::polar(inv, t * w[i]);
    transform_modes(u0.grid, f.samples, false);
    slab.fields.push_back(std::move(f));
  }
  validate(slab);
  return slab;
}

namespace {

std::vector<std::vector<cplx>> slab_modes(const TimeSlab& F) {
  std::vector<std::vector<cplx>> out;
  out.reserve(F.count());
  for (const auto& f : F.fields) {
    out.push_back(f.samples);
    transform_modes(f.grid, out.back(), true);
  }
  return out;
}

Field from_modes(const Grid& grid, std::vector<cplx> modes) {
  const double inv = 1.0 / static_cast<double>(grid.size());
  for (auto& z : modes) z *= inv;
  transform_modes(grid, modes, false);
  return Field{grid, std::move(modes)};
}

}  // namespace

// Recursion on nodes: S_{k+1} = e^{i w dt} S_k + dt/2 (e^{i w dt} F_k + F_{k+1}).
TimeSlab duhamel_slab(const DispersionSetup& setup, const TimeSlab& F) {
  validate(F);
  const Grid& g = F.grid();
  const std::vector<double> w = mode_frequencies(setup, g);
  const auto modes = slab_modes(F);
  std::vector<cplx> step(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) step[i] = std::polar(1.0, F.dt * w[i]);

  TimeSlab out{F.t0, F.dt, {}};
  std::vector<cplx> S(w.size(), cplx(0.0));
  out.fields.push_back(zeros(g));
  const double half = 0.5 * F.dt;
  for (std::size_t k = 0; k + 1 < F.count(); ++k) {
    for (std::size_t i = 0; i < S.size(); ++i)
      S[i] = step[i] * (S[i] + half * modes[k][i]) + half * modes[k + 1][i];
    out.fields.push_back(from_modes(g, S));
  }
  return out;
}

Field duhamel(const DispersionSetup& setup, const TimeSlab& F, double t) {
  validate(F);
  const double tol = 1e-12 * std::max(1.0, std::abs(F.t_end()));
  if (t < F.t0 - tol || t > F.t_end() + tol) throw InvalidArgument("time outside the slab range");
  const Grid& g = F.grid();
  const std::vector<double> w = mode_frequencies(setup, g);
  const auto modes = slab_modes(F);

  // Node k contributes with phase e^{i(t - tau_k) w}.
  const double pos = std::clamp((t - F.t0) / F.dt, 0.0, static_cast<double>(F.count() - 1));
  auto whole = static_cast<std::size_t>(std::floor(pos + 1e-12));
  whole = std::min(whole, F.count() - 1);
  const double frac = std::max(0.0, (pos - static_cast<double>(whole)) * F.dt);

  std::vector<cplx> S(w.size(), cplx(0.0));
  const double half = 0.5 * F.dt;
  for (std::size_t k = 0; k < whole; ++k) {
    const double ta = t - F.time(k);
    const double tb = t - F.time(k + 1);
    for (std::size_t i = 0; i < S.size(); ++i)
      S[i] += half * (std::polar(1.0, ta * w[i]) * modes[k][i] +
                      std::polar(1.0, tb * w[i]) * modes[k + 1][i]);
  }
  if (frac > 0.0 && whole + 1 < F.count()) {
    const double lam = frac / F.dt;
    const double ta = t - F.time(whole);
    for (std::size_t i = 0; i < S.size(); ++i) {
      const cplx end = (1.0 - lam) * modes[whole][i] + lam * modes[whole + 1][i];
      S[i] += 0.5 * frac * (std::polar(1.0, ta * w[i]) * modes[whole][i] + end);
    }
  }
  return from_modes(g, std::move(S));
}

// Decay ------------------------------------------------------------------------

std::vector<double> log_times(double t_min, double t_max, int samples) {
  if (samples < 3) throw NumericalError("decay fit needs at least 3 samples");
  if (!(t_min > 0.0 && t_max > t_min)) throw InvalidArgument("need 0 < t_min < t_max");
  std::vector<double> t(static_cast<std::size_t>(samples));
  const double l0 = std::log(t_min), l1 = std::log(t_max);
  for (int k = 0; k < samples; ++k) t[k] = std::exp(l0 + (l1 - l0) * k / (samples - 1));
  t.back() = t_max;
  return t;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw NumericalError("degenerate log-log fit");
  const auto k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw NumericalError("log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw NumericalError("degenerate log-log fit");
  return (k * sxy - sx * sy) / den;
}

DecayFit dispersive_fit(const DispersionSetup& setup, const Field& u0, double t_min, double t_max,
                        int samples) {
  if (t_min < 1.0) throw InvalidArgument("decay fits start at t >= 1");
  DecayFit fit;
  fit.times = log_times(t_min, t_max, samples);
  for (double t : fit.times) {
    const Field u = propagate(setup, t, u0);
    fit.sup_norms.push_back(sup_norm(u));
    fit.boundary_mass = std::max(fit.boundary_mass, boundary_mass(u));
  }
  fit.slope = loglog_slope(fit.times, fit.sup_norms);
  return fit;
}

DecayFit dispersive_fit(const DispersionSetup& setup, const ProductField& u0, double t_min,
                        double t_max, int samples) {
  if (t_min < 1.0) throw InvalidArgument("decay fits start at t >= 1");
  DecayFit fit;
  fit.times = log_times(t_min, t_max, samples);
  for (double t : fit.times) {
    const ProductField u = propagate(setup, t, u0);
    fit.sup_norms.push_back(sup_norm(u));
    // Factor boundary masses combine as 1 - prod(1 - b_j).
    double inside = 1.0;
    for (const auto& f : u.factors) inside *= 1.0 - boundary_mass(f);
    fit.boundary_mass = std::max(fit.boundary_mass, 1.0 - inside);
  }
  fit.slope = loglog_slope(fit.times, fit.sup_norms);
  return fit;
}

// Knapp data -------------------------------------------------------------------

namespace {

// 1 inside |x - c| <= half, 0 beyond half + cell, linear in between.
double ramp(double x, double centre, double half, double cell) {
  const double d = std::abs(x - centre) - half;
  if (d <= 0.0) return 1.0;
  if (d >= cell) return 0.0;
  return 1.0 - d / cell;
}

}  // namespace

Field knapp_data(const Grid& grid, const KnappSpec& spec) {
  require_dyadic(spec.N);
  if (!(spec.ecc >= 1.0)) throw InvalidArgument("Knapp eccentricity must be >= 1");
  const double cell = grid.fundamental();
  const double half_long = 0.5 * spec.N / spec.ecc;
  const double half_trans = 0.5 * std::sqrt(spec.N) / spec.ecc;
  if (spec.N + half_long + cell >= grid.nyquist() || half_trans + cell >= grid.nyquist())
    throw InvalidArgument("Knapp tube exceeds the frequency lattice");

  Spectrum s{grid, std::vector<cplx>(grid.size())};
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    const Point xi = frequency(grid, i);
    double v = ramp(xi[0], spec.N, half_long, cell);
    for (int d = 1; d < grid.n && v > 0.0; ++d) v *= ramp(xi[d], 0.0, half_trans, cell);
    s.coeffs[i] = v;
  }
  Field u = inverse_fourier_transform(s);
  const double norm = l2_norm(u);
  if (!(norm > 0.0)) throw InvalidArgument("Knapp tube contains no lattice frequency");
  return (1.0 / norm) * u;
}

ProductField knapp_product(const Grid& axis, int n, const KnappSpec& spec) {
  if (axis.n != 1) throw InvalidArgument("Knapp factors live on a 1-d grid");
  if (n < 1 || n > 3) throw InvalidArgument("Knapp product needs 1-3 factors");
  require_dyadic(spec.N);
  if (!(spec.ecc >= 1.0)) throw InvalidArgument("Knapp eccentricity must be >= 1");
  const double cell = axis.fundamental();
  ProductField out;
  for (int d = 0; d < n; ++d) {
    const double centre = d == 0 ? spec.N : 0.0;
    const double half = d == 0 ? 0.5 * spec.N / spec.ecc : 0.5 * std::sqrt(spec.N) / spec.ecc;
    if (std::abs(centre) + half + cell >= axis.nyquist())
      throw InvalidArgument("Knapp tube exceeds the frequency lattice");
    Spectrum s{axis, std::vector<cplx>(axis.size())};
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] = ramp(frequency(axis, i)[0], centre, half, cell);
    Field f = inverse_fourier_transform(s);
    const double norm = l2_norm(f);
    if (!(norm > 0.0)) throw InvalidArgument("Knapp tube contains no lattice frequency");
    out.factors.push_back((1.0 / norm) * f);
  }
  return out;
}

// Rescaling --------------------------------------------------------------------

Field rescale_field(const Field& u, double lambda) {
  require_dyadic(lambda);
  Field r = u;
  r.grid.L = u.grid.L / lambda;
  return r;
}

ProductField rescale_field(const ProductField& u, double lambda) {
  ProductField r;
  for (const auto& f : u.factors) r.factors.push_back(rescale_field(f, lambda));
  return r;
}

}  // namespace strichlab::spectral
