#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "spectral_internal.hpp"
#include "strichlab/io.hpp"
#include "strichlab/random.hpp"
#include "strichlab/runner.hpp"

namespace strichlab::runner {

using nlohmann::json;
using spectral::cplx;
using spectral::Field;
using spectral::Grid;
using spectral::Point;
using spectral::TimeSlab;

double RatioReport::spread() const {
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : rows) {
    if (!r.valid) continue;
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  return (hi > 0.0 && lo > 0.0 && std::isfinite(lo)) ? hi / lo : 0.0;
}

bool RatioReport::all_valid() const {
  return std::all_of(rows.begin(), rows.end(), [](const RatioRow& r) { return r.valid; });
}

namespace {

double radius2(const Point& x, int n) {
  double r = 0.0;
  for (int d = 0; d < n; ++d) r += x[d] * x[d];
  return r;
}

// Smooth random profile: Gaussian envelope times a few plane waves with
// |k| <= 1.5, all drawn from the seed so it can be evaluated anywhere.
struct RandomProfile {
  int n = 2;
  std::vector<Point> k;
  std::vector<cplx> c;

  RandomProfile(int dim, std::uint64_t seed) : n(dim) {
    Rng rng(seed);
    for (int j = 0; j < 8; ++j) {
      Point p{0, 0, 0};
      do {
        for (int d = 0; d < n; ++d) p[d] = rng.uniform(-1.5, 1.5);
      } while (radius2(p, n) > 2.25);
      k.push_back(p);
      c.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    }
  }

  cplx operator()(const Point& x) const {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
      double phase = 0.0;
      for (int d = 0; d < n; ++d) phase += k[j][d] * x[d];
      sum += c[j] * std::polar(1.0, phase);
    }
    return std::exp(-radius2(x, n) / 8.0) * sum;
  }
};

Grid sweep_grid(const ExperimentConfig& c, double N) {
  const double L = c.box_scaling == BoxScaling::fixed ? c.grid.L : c.grid.L / N;
  return spectral::make_grid(c.setup.n, c.grid.m, L);
}

struct Diagnostics {
  double boundary = 0.0;
  double nyquist = 0.0;
  void add(const Field& u) {
    boundary = std::max(boundary, spectral::boundary_mass(u));
    nyquist = std::max(nyquist, spectral::nyquist_mass(u));
  }
  void add(const TimeSlab& s) {
    for (const auto& f : s.fields) add(f);
  }
};

RatioRow finish_row(const ExperimentConfig& c, double parameter, double lhs, double rhs, const Diagnostics& d) {
  RatioRow r;
  r.parameter = parameter;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = rhs > 0.0 ? lhs / rhs : INFINITY;
  r.boundary_mass = d.boundary;
  r.nyquist_mass = d.nyquist;
  r.valid = std::isfinite(lhs) && std::isfinite(rhs) && rhs > 0.0 && d.boundary <= c.max_boundary_mass &&
            d.nyquist <= c.max_nyquist_mass;
  return r;
}

// Polar resamplings are costly to build; a sweep reuses one per box size.
class PolarCache {
 public:
  const mixednorm::PolarResampling* get(const Grid& g) {
    auto& slot = cache_[g.L];
    if (!slot) slot = std::make_unique<mixednorm::PolarResampling>(g);
    return slot.get();
  }

 private:
  std::map<double, std::unique_ptr<mixednorm::PolarResampling>> cache_;
};

double homogeneous_s(const exponents::DispersionSetup& setup, const exponents::ExponentTuple& t) {
  return -0.5 * setup.n + setup.n * t.inv_p + setup.a * t.inv_q;
}

void require_homogeneous(const ExperimentConfig& c, const exponents::ExponentTuple& t, bool force) {
  if (force) return;
  if (t.inv_q > 0.5 || t.inv_p > 0.5 || !exponents::homogeneous_admissible(c.setup, t.inv_q, t.inv_p))
    throw RejectedTuple("(q, p) is not generalized admissible for this setup");
}

RatioReport homogeneous_sweep(const ExperimentConfig& c, const exponents::ExponentTuple& t) {
  RatioReport rep{c.experiment, "N", {}};
  const double s = homogeneous_s(c.setup, t);
  PolarCache polar;
  for (double N : c.N) {
    const Grid g = sweep_grid(c, N);
    const Field u0 = make_data(c, g, N, c.ecc.front());
    const double scale = std::pow(N, -c.setup.a);
    const double dt = c.window.duration * scale / (c.window.samples - 1);
    const TimeSlab slab = spectral::free_evolution(c.setup, u0, c.window.t0 * scale, dt,
                                                   static_cast<std::size_t>(c.window.samples));
    const mixednorm::NormSpec spec{t.inv_q, t.inv_p, 2.0, std::nullopt};
    const double lhs = c.range == mixednorm::RangeSpace::lebesgue
                           ? mixednorm::mixed_norm(slab, spec)
                           : mixednorm::spherical_mixed_norm(slab, spec, *polar.get(g));
    Diagnostics d;
    d.add(slab);
    rep.rows.push_back(finish_row(c, N, lhs, std::pow(N, -s) * spectral::l2_norm(u0), d));
  }
  return rep;
}

RatioReport knapp_sweep(const ExperimentConfig& c, const exponents::ExponentTuple& t) {
  RatioReport rep{c.experiment, "ecc", {}};
  const double s = homogeneous_s(c.setup, t);
  const double N = c.N.front();
  const bool product = c.setup.a == 2.0;
  if (product && c.range != mixednorm::RangeSpace::lebesgue)
    throw InvalidArgument("the tensor-product Knapp path only evaluates Lebesgue norms");
  PolarCache polar;
  for (double ecc : c.ecc) {
    // The tube stays coherent for times of order ecc^2 / N^a.
    const double T = c.window.duration * ecc * ecc * std::pow(N, -c.setup.a);
    const double t0 = c.window.t0 * ecc * ecc * std::pow(N, -c.setup.a);
    const double dt = T / (c.window.samples - 1);
    const auto count = static_cast<std::size_t>(c.window.samples);
    Diagnostics d;
    double lhs = 0.0, l2 = 0.0;
    if (product) {
      const Grid axis = spectral::make_grid(1, c.grid.m, c.grid.L);
      const auto u0 = spectral::knapp_product(axis, c.setup.n, {N, ecc});
      std::vector<double> norms;
      for (std::size_t k = 0; k < count; ++k) {
        const auto u = spectral::propagate(c.setup, t0 + k * dt, u0);
        norms.push_back(mixednorm::lp_norm(u, t.inv_p));
        for (const auto& f : u.factors) d.add(f);
      }
      lhs = mixednorm::time_norm(norms, dt, t.inv_q);
      l2 = mixednorm::lp_norm(u0, 0.5);
    } else {
      const Grid g = spectral::make_grid(c.setup.n, c.grid.m, c.grid.L);
      const Field u0 = spectral::knapp_data(g, {N, ecc});
      const TimeSlab slab = spectral::free_evolution(c.setup, u0, t0, dt, count);
      const mixednorm::NormSpec spec{t.inv_q, t.inv_p, 2.0, std::nullopt};
      lhs = c.range == mixednorm::RangeSpace::lebesgue ? mixednorm::mixed_norm(slab, spec)
                                                       : mixednorm::spherical_mixed_norm(slab, spec, *polar.get(g));
      d.add(slab);
      l2 = spectral::l2_norm(u0);
    }
    rep.rows.push_back(finish_row(c, ecc, lhs, std::pow(N, -s) * l2, d));
  }
  return rep;
}

RatioReport inhomogeneous_sweep(const ExperimentConfig& c, const exponents::ExponentTuple& t) {
  RatioReport rep{c.experiment, "N", {}};
  PolarCache polar;
  for (double N : c.N) {
    const Grid g = sweep_grid(c, N);
    const Field f = make_data(c, g, N, c.ecc.front());
    const double scale = std::pow(N, -c.setup.a);
    const double T = c.window.duration * scale;
    const double t0 = c.window.t0 * scale;
    const TimeSlab F = spectral::make_slab(t0, T / (c.window.samples - 1), static_cast<std::size_t>(c.window.samples),
                                           [&](double time) {
                                             const double w = std::sin(std::numbers::pi * (time - t0) / T);
                                             return (w * w) * f;
                                           });
    const TimeSlab u = spectral::duhamel_slab(c.setup, F);
    mixednorm::ZContext ctx;
    ctx.space = c.range;
    if (c.range == mixednorm::RangeSpace::spherical) ctx.polar = polar.get(g);
    double lhs, rhs;
    if (c.estimate_norm == EstimateNorm::z_spq) {
      lhs = mixednorm::z_spq_norm(u, t.s, t.inv_p, t.inv_q, ctx);
      rhs = mixednorm::z_spq_norm(F, -t.s, 1.0 - t.inv_pt, 1.0 - t.inv_qt, ctx);
    } else {
      lhs = mixednorm::besov_mixed_norm(u, t.s, t.inv_p, t.inv_q, ctx);
      rhs = mixednorm::besov_mixed_norm(F, -t.s, 1.0 - t.inv_pt, 1.0 - t.inv_qt, ctx);
    }
    Diagnostics d;
    d.add(u);
    d.add(F);
    rep.rows.push_back(finish_row(c, N, lhs, rhs, d));
  }
  return rep;
}

}  // namespace

Field make_data(const ExperimentConfig& c, const Grid& grid, double N, double ecc) {
  const int n = grid.n;
  switch (c.data) {
    case DataFamily::knapp:
      return spectral::knapp_data(grid, {N, ecc});
    case DataFamily::annulus: {
      // transform chi(|xi| / N): P_N applied to a point mass
      spectral::Spectrum s{grid, std::vector<cplx>(grid.size())};
      const spectral::CutoffProfile profile;
      spectral::visit_mode_norms(grid, [&](std::size_t i, double r) { s.coeffs[i] = profile.chi(r / N); });
      return spectral::inverse_fourier_transform(s);
    }
    case DataFamily::gaussian: {
      const Field g = spectral::sample(grid, [&](const Point& x) {
        return cplx(std::exp(-0.5 * N * N * radius2(x, n)));
      });
      return spectral::project(N, g);
    }
    case DataFamily::random_bandlimited: {
      const RandomProfile profile(n, c.seed);
      const Field g = spectral::sample(grid, [&](const Point& x) {
        Point y{0, 0, 0};
        for (int d = 0; d < n; ++d) y[d] = N * x[d];
        return profile(y);
      });
      return spectral::project(N, g);
    }
  }
  throw InvalidArgument("unknown data family");
}

RatioReport run_estimate_sweep(const ExperimentConfig& config, bool force) {
  validate(config);
  const auto& t = config.tuples.front();
  if (config.experiment == "homogeneous") {
    require_homogeneous(config, t, force);
    return homogeneous_sweep(config, t);
  }
  if (config.experiment == "knapp") {
    require_homogeneous(config, t, force);
    return knapp_sweep(config, t);
  }
  if (config.experiment == "inhomogeneous") {
    if (!force) {
      const auto v = exponents::check(config.setup, t, config.mode);
      if (!v.feasible) {
        std::string ids;
        for (const auto& x : v.violations) ids += (ids.empty() ? "" : ", ") + x.id;
        throw RejectedTuple("tuple rejected by the " + std::string(exponents::to_string(config.mode)) +
                            " checker: " + ids);
      }
    }
    return inhomogeneous_sweep(config, t);
  }
  throw InvalidArgument("experiment '" + config.experiment + "' is not an estimate sweep");
}

std::string ratio_csv(const RatioReport& r) {
  std::ostringstream out;
  out << r.parameter_name << ",lhs,rhs,ratio,boundary_mass,nyquist_mass,valid\n";
  for (const auto& row : r.rows)
    out << io::format_number(row.parameter) << ',' << io::format_number(row.lhs) << ','
        << io::format_number(row.rhs) << ',' << io::format_number(row.ratio) << ','
        << io::format_number(row.boundary_mass) << ',' << io::format_number(row.nyquist_mass) << ','
        << (row.valid ? 1 : 0) << '\n';
  return out.str();
}

RegionRun run_region(const ExperimentConfig& c) {
  validate(c);
  RegionRun run;
  run.mask = exponents::region_sample(c.setup, c.region.inv_q, c.region.inv_qt, c.region.s, c.region.resolution,
                                      c.region.solve_s);
  if (c.setup.a > 1.0 && c.setup.a < 2.0) run.vertices = exponents::application_vertices(c.setup);
  std::ostringstream csv;
  io::write_region_csv(csv, run.mask);
  run.csv = csv.str();

  int local = 0, nonsharp = 0, sharp = 0, vertex = 0;
  for (const auto& p : run.mask.points) {
    local += (p.code & exponents::kLocalBit) ? 1 : 0;
    nonsharp += (p.code & exponents::kNonsharpBit) ? 1 : 0;
    sharp += (p.code & exponents::kSharpBit) ? 1 : 0;
    vertex += p.dispersive_vertex ? 1 : 0;
  }
  const auto w = exponents::decay_parameters(c.setup);
  json j;
  j["setup"] = {{"a", c.setup.a}, {"n", c.setup.n}};
  j["sigma"] = w.sigma;
  j["sigma_ext"] = w.sigma_ext;
  j["inv_q"] = c.region.inv_q;
  j["inv_qt"] = c.region.inv_qt;
  j["s"] = c.region.s;
  j["solve_s"] = c.region.solve_s;
  j["resolution"] = c.region.resolution;
  j["feasible"] = {{"local", local}, {"nonsharp", nonsharp}, {"sharp", sharp}};
  j["dispersive_vertex_points"] = vertex;
  if (run.vertices) {
    auto pt = [](const std::pair<double, double>& v) { return json::array({v.first, v.second}); };
    j["vertices"] = {{"A", pt(run.vertices->A)}, {"B", pt(run.vertices->B)}, {"C", pt(run.vertices->C)},
                     {"D", pt(run.vertices->D)}, {"coordinates", "inv_p,inv_q"}};
  } else {
    j["vertices"] = nullptr;
  }
  run.metadata_json = j.dump(2);
  return run;
}

namespace {

// Largest ratio of consecutive residuals while they are above the roundoff floor.
double contraction_factor(const std::vector<double>& r, double scale) {
  const double floor = 1e-13 * std::max(1.0, scale);
  double f = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (r[k - 1] > floor) f = std::max(f, r[k] / r[k - 1]);
  return f;
}

}  // namespace

PicardReport run_picard(const ExperimentConfig& c) {
  validate(c);
  const Grid g = spectral::make_grid(c.setup.n, c.grid.m, c.grid.L);
  const double N = c.N.front();
  const Field u0 = make_data(c, g, N, c.ecc.front());
  const auto& p = c.potential;
  const bool angular = c.setup.n == 2 && p.angular_alpha > 0.0;
  const Field V0 = spectral::sample(g, [&](const Point& x) {
    const double r2 = radius2(x, c.setup.n);
    double v = p.amplitude * std::exp(-r2 / (2.0 * p.width * p.width));
    if (angular) v *= 1.0 + 0.5 * std::cos(std::atan2(x[1], x[0]));
    return cplx(v);
  });
  const auto count = static_cast<std::size_t>(c.window.samples);
  const double dt = c.window.duration / (c.window.samples - 1);
  const TimeSlab V = spectral::make_slab(c.window.t0, dt, count, [&](double) { return V0; });
  const spectral::PicardOptions opts{p.max_iter, p.tol, 3};
  const double scale = spectral::l2_norm(u0);

  PicardReport rep;
  TimeSlab u;
  if (p.windows == 1) {
    const auto r = spectral::picard_solve(c.setup, V, u0, opts);
    rep.residuals = r.residuals;
    rep.iterations = static_cast<int>(r.residuals.size());
    rep.converged = r.converged;
    rep.diverged = r.diverged;
    rep.fixed_point_residual = r.fixed_point_residual;
    rep.contraction_factor = contraction_factor(r.residuals, scale);
    u = r.u;
  } else {
    const auto r = spectral::picard_solve_windowed(c.setup, V, u0, p.windows, opts);
    rep.converged = r.converged;
    for (const auto& w : r.windows) {
      rep.residuals.insert(rep.residuals.end(), w.residuals.begin(), w.residuals.end());
      rep.iterations = std::max(rep.iterations, static_cast<int>(w.residuals.size()));
      rep.diverged = rep.diverged || w.diverged;
      rep.fixed_point_residual = std::max(rep.fixed_point_residual, w.fixed_point_residual);
      rep.window_factors.push_back(contraction_factor(w.residuals, scale));
    }
    rep.contraction_factor = *std::max_element(rep.window_factors.begin(), rep.window_factors.end());
    u = r.u;
  }

  // Regularity of the solution at both ends of the window.
  const double inv_p = c.tuples.empty() ? 0.5 : c.tuples.front().inv_p;
  const mixednorm::PolarResampling polar(g);
  auto node = [&](std::size_t k) { return TimeSlab{u.time(k), dt, {u.fields[k]}}; };
  rep.y_norm_start = mixednorm::y_norm(node(0), 0.0, inv_p, polar);
  rep.y_norm_end = mixednorm::y_norm(node(u.count() - 1), 0.0, inv_p, polar);
  rep.besov_start = mixednorm::besov_z_norm(u.fields.front(), 0.0, inv_p);
  rep.besov_end = mixednorm::besov_z_norm(u.fields.back(), 0.0, inv_p);

  json j;
  j["setup"] = {{"a", c.setup.a}, {"n", c.setup.n}};
  j["amplitude"] = p.amplitude;
  j["windows"] = p.windows;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["diverged"] = rep.diverged;
  j["contraction_factor"] = rep.contraction_factor;
  j["fixed_point_residual"] = rep.fixed_point_residual;
  j["residuals"] = rep.residuals;
  j["window_factors"] = rep.window_factors;
  j["y_norm"] = {{"start", rep.y_norm_start}, {"end", rep.y_norm_end}};
  j["besov_norm"] = {{"start", rep.besov_start}, {"end", rep.besov_end}};
  if (angular) j["angular_weighted_sup"] = spectral::sup_norm(mixednorm::angular_weight(V0, p.angular_alpha));
  rep.json = j.dump(2);
  return rep;
}

DecayReport run_decay(const ExperimentConfig& c) {
  validate(c);
  const auto& d = c.decay;
  DecayReport rep;
  rep.expected_slope = -exponents::decay_parameters(c.setup).sigma;
  const bool gaussian_only = c.data == DataFamily::gaussian;
  if (d.separable) {
    if (!gaussian_only) throw InvalidArgument("the separable path only supports Gaussian data");
    const Grid axis = spectral::make_grid(1, c.grid.m, c.grid.L);
    const Field g = spectral::sample(axis, [](const Point& x) { return cplx(std::exp(-0.5 * x[0] * x[0])); });
    spectral::ProductField u0;
    for (int k = 0; k < c.setup.n; ++k) u0.factors.push_back(g);
    rep.fit = spectral::dispersive_fit(c.setup, u0, d.t_min, d.t_max, d.samples);
  } else {
    const Grid grid = spectral::make_grid(c.setup.n, c.grid.m, c.grid.L);
    Field u0 = c.data == DataFamily::gaussian
                   ? spectral::sample(grid, [&](const Point& x) { return cplx(std::exp(-0.5 * radius2(x, c.setup.n))); })
                   : make_data(c, grid, c.N.front(), c.ecc.front());
    if (d.localize_N != 0.0) u0 = spectral::project(d.localize_N, u0);
    rep.fit = spectral::dispersive_fit(c.setup, u0, d.t_min, d.t_max, d.samples);
  }
  if (c.setup.a == 2.0 && gaussian_only && d.localize_N == 0.0) {
    // |e^{it Delta} e^{-|x|^2/2}| peaks at (1 + 4t^2)^{-n/4}.
    std::vector<double> amp;
    for (double t : rep.fit.times) amp.push_back(std::pow(1.0 + 4.0 * t * t, -0.25 * c.setup.n));
    rep.oracle_slope = spectral::loglog_slope(rep.fit.times, amp);
  }
  std::ostringstream out;
  out << "t,sup_norm\n";
  for (std::size_t k = 0; k < rep.fit.times.size(); ++k)
    out << io::format_number(rep.fit.times[k]) << ',' << io::format_number(rep.fit.sup_norms[k]) << '\n';
  rep.csv = out.str();
  return rep;
}

}  // namespace strichlab::runner
