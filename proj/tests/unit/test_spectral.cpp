#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "strichlab/error.hpp"
#include "strichlab/spectral.hpp"

using namespace strichlab;
using namespace strichlab::spectral;

namespace {

Field gaussian(const Grid& g, double width = 1.0) {
  return sample(g, [&](const Point& x) {
    double r2 = 0;
    for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
    return cplx(std::exp(-r2 / (2 * width * width)));
  });
}

Field random_field(const Grid& g, std::uint64_t seed) {
  oracle::SplitMix rng{seed};
  Field u = zeros(g);
  for (auto& z : u.samples) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return u;
}

double rel(const Field& a, const Field& b) { return l2_norm(a - b) / std::max(l2_norm(b), 1e-300); }

}  // namespace

TEST_CASE("grid construction") {
  const Grid g = make_grid(1, 8, 2 * std::numbers::pi);
  CHECK(g.spacing() == doctest::Approx(std::numbers::pi / 4));
  CHECK(make_grid(2, 256, 64).size() == 65536);
  CHECK_THROWS_AS(make_grid(3, 4, 1), InvalidArgument);
  CHECK_THROWS_AS(make_grid(2, 24, 1), InvalidArgument);
  CHECK_THROWS_AS(make_grid(4, 8, 1), InvalidArgument);
  CHECK(g.wavenumber(4) == doctest::Approx(-4.0));
  CHECK(g.wavenumber(3) == doctest::Approx(3.0));
}

TEST_CASE("fourier convention matches the Gaussian transform") {
  const Grid g = make_grid(2, 64, 24);
  const Spectrum s = fourier_transform(gaussian(g));
  double worst = 0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    const Point xi = frequency(g, i);
    const double exact = 2 * std::numbers::pi * std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]) / 2);
    worst = std::max(worst, std::abs(s.coeffs[i] - exact));
  }
  CHECK(worst < 1e-12);
  CHECK(rel(inverse_fourier_transform(s), gaussian(g)) < 1e-14);
}

TEST_CASE("propagator") {
  const DispersionSetup a2{2.0, 2};
  // |u(2, x)| < 1e-20 at the box edge
  const Grid g = make_grid(2, 256, 80);
  const Field u0 = gaussian(g);
  CHECK(rel(propagate(a2, 0.0, u0), u0) == 0.0);

  // closed form Gaussian evolution, pointwise relative to the peak
  for (double t : {0.5, 2.0}) {
    const Field u = propagate(a2, t, u0);
    const double peak = oracle::gaussian_amplitude(2, t);
    double worst = 0;
    for (std::size_t i = 0; i < u.samples.size(); ++i) {
      const Point x = position(g, i);
      worst = std::max(worst, std::abs(u.samples[i] - oracle::gaussian_schroedinger(2, t, x.data())));
    }
    CHECK(worst / peak < 1e-8);
  }

  for (double a : {1.0, 1.5, 2.0, 3.0}) {
    const DispersionSetup s{a, 2};
    const Field r = random_field(g, 9);
    const Field u = propagate(s, 1.3, r);
    CHECK(std::abs(l2_norm(u) - l2_norm(r)) / l2_norm(r) < 1e-12);
    CHECK(rel(propagate(s, 0.4, propagate(s, 0.9, r)), propagate(s, 1.3, r)) < 1e-12);
  }
}

TEST_CASE("cutoff profile and projectors") {
  const CutoffProfile p;
  CHECK(p.psi(0.5) == 1.0);
  CHECK(p.psi(1.0) == 1.0);
  CHECK(p.psi(2.0) == 0.0);
  CHECK(p.psi(3.0) == 0.0);
  for (double r = 0.0; r < 2.5; r += 0.01) {
    CHECK(p.psi(r) >= p.psi(r + 0.01));
    CHECK(p.chi(r) >= 0.0);
    if (r < 0.5 || r > 2.0) CHECK(p.chi(r) == 0.0);
  }
  CHECK(is_dyadic(0.25));
  CHECK_FALSE(is_dyadic(3.0));

  const Grid g = make_grid(2, 128, 64);
  const auto window = dyadic_window(g);
  REQUIRE(window.size() >= 3);
  for (double N : window) {
    CHECK(N / 2 >= 2 * g.fundamental());
    CHECK(2 * N <= g.nyquist());
  }

  // partition of unity on the covered range
  const double lo = window.front(), hi = window.back();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point xi = frequency(g, i);
    const double r = std::hypot(xi[0], xi[1]);
    if (r < lo || r > hi) continue;
    double sum = 0;
    for (double N : window) sum += p.chi(r / N);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }

  const Field u = random_field(g, 4);
  for (double N : window) {
    const Field pn = project(N, u);
    CHECK(rel(project_fattened(N, pn), pn) <= 1e-12);
    for (double M : window) {
      if (std::abs(std::log2(N / M)) >= 2) CHECK(l2_norm(project(M, pn)) <= 1e-12 * l2_norm(u));
    }
    const DispersionSetup s{1.5, 2};
    CHECK(rel(project(N, propagate(s, 2.0, u)), propagate(s, 2.0, pn)) <= 1e-12);
  }

  // Fourier support at |xi| = 3N is killed.
  const double N = 1.0;
  const Field wave = sample(g, [&](const Point& x) { return std::polar(1.0, 3.0 * N * x[0] * 0 + g.fundamental() * 31 * x[0]); });
  const double k3 = g.fundamental() * 31;  // about 3.04
  CHECK(k3 > 2 * N);
  CHECK(l2_norm(project(N, wave)) <= 1e-12 * l2_norm(wave));
}

TEST_CASE("duhamel") {
  const DispersionSetup s{2.0, 1};
  const Grid g = make_grid(1, 64, 20);
  const Field f = gaussian(g);
  const double T = 2.0;

  auto constant_slab = [&](int count) {
    return make_slab(0.0, T / (count - 1), count, [&](double) { return f; });
  };
  auto exact = [&](double t) {
    Spectrum sp = fourier_transform(f);
    for (std::size_t i = 0; i < sp.coeffs.size(); ++i) {
      const double xi = frequency(g, i)[0];
      sp.coeffs[i] *= oracle::duhamel_constant(xi * xi, t);
    }
    return inverse_fourier_transform(sp);
  };

  CHECK(l2_norm(duhamel(s, make_slab(0, 0.1, 5, [&](double) { return zeros(g); }), 0.3)) == 0.0);

  const Field ref = exact(T);
  const double e1 = rel(duhamel(s, constant_slab(65), T), ref);
  const double e2 = rel(duhamel(s, constant_slab(129), T), ref);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  // slab form agrees with the pointwise form at every node
  const TimeSlab F = make_slab(0, 0.05, 21, [&](double t) { return std::cos(t) * f; });
  const TimeSlab D = duhamel_slab(s, F);
  for (std::size_t k = 0; k < F.count(); k += 5) CHECK(rel(D.fields[k], duhamel(s, F, F.time(k)) ) < 1e-12);
  CHECK(l2_norm(D.fields[0]) == 0.0);

  // partial last interval reduces to the closed form for constant F
  const double tp = 1.03;
  CHECK(rel(duhamel(s, constant_slab(257), tp), exact(tp)) < 1e-4);
  CHECK_THROWS_AS(duhamel(s, F, 5.0), InvalidArgument);

  // linearity
  const TimeSlab G = make_slab(0, 0.05, 21, [&](double t) { return cplx(0, t) * propagate(s, t, f); });
  TimeSlab H = F;
  const cplx al(0.3, -1.2), be(2.0, 0.5);
  for (std::size_t k = 0; k < H.count(); ++k) H.fields[k] = al * F.fields[k] + be * G.fields[k];
  const Field lhs = duhamel(s, H, 0.77);
  const Field rhs = al * duhamel(s, F, 0.77) + be * duhamel(s, G, 0.77);
  CHECK(rel(lhs, rhs) < 1e-12);
}

TEST_CASE("rescaling") {
  const Grid g = make_grid(2, 64, 32);
  const Field u = gaussian(g);
  CHECK(rel(rescale_field(u, 1.0), u) == 0.0);
  CHECK_THROWS_AS(rescale_field(u, 3.0), InvalidArgument);
  for (double lam : {0.5, 2.0, 4.0}) {
    const Field r = rescale_field(u, lam);
    CHECK(l2_norm(r) == doctest::Approx(std::pow(lam, -1.0) * l2_norm(u)).epsilon(1e-10));
    for (double a : {1.0, 1.5, 2.0}) {
      const DispersionSetup s{a, 2};
      const Field lhs = propagate(s, 0.7, r);
      const Field rhs = rescale_field(propagate(s, std::pow(lam, a) * 0.7, u), lam);
      CHECK(rel(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("knapp data") {
  const Grid g = make_grid(2, 256, 128);
  for (double ecc : {1.0, 2.0, 4.0}) {
    const Field k = knapp_data(g, {4.0, ecc});
    CHECK(std::abs(l2_norm(k) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(knapp_data(g, {8.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(knapp_data(g, {8.0, 1.0}), InvalidArgument);  // 8 + 4 + cell > pi/h ~ 6.3
}

TEST_CASE("product fields match the full propagator") {
  const DispersionSetup s{2.0, 3};
  const Grid g1 = make_grid(1, 32, 16);
  ProductField pf;
  for (double w : {1.0, 1.3, 0.8}) pf.factors.push_back(gaussian(g1, w));
  const Field full = pf.expand();
  const Field a = propagate(s, 0.9, full);
  const Field b = propagate(s, 0.9, pf).expand();
  CHECK(rel(a, b) < 1e-12);
  CHECK(sup_norm(propagate(s, 0.9, pf)) == doctest::Approx(sup_norm(a)).epsilon(1e-12));
  CHECK_THROWS_AS(propagate(DispersionSetup{1.5, 3}, 0.5, pf), InvalidArgument);
}

TEST_CASE("decay fit on a small box") {
  CHECK(loglog_slope({1, 2, 4}, {1, 0.25, 0.0625}) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(loglog_slope({1, 2}, {1, 2}), NumericalError);
  const DispersionSetup s{2.0, 1};
  const Grid g = make_grid(1, 4096, 2400);
  ProductField pf;
  pf.factors = {gaussian(g), gaussian(g), gaussian(g)};
  const auto fit = dispersive_fit(DispersionSetup{2.0, 3}, pf, 10, 100, 8);
  std::vector<double> exact;
  for (double t : fit.times) exact.push_back(oracle::gaussian_amplitude(3, t));
  CHECK(fit.slope == doctest::Approx(loglog_slope(fit.times, exact)).epsilon(0.01));
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(0.02));
  CHECK_THROWS_AS(dispersive_fit(s, gaussian(g), 0.5, 10, 5), InvalidArgument);
}

TEST_CASE("picard iteration") {
  const DispersionSetup s{2.0, 2};
  const Grid g = make_grid(2, 32, 16);
  const Field u0 = gaussian(g);
  const TimeSlab zero = make_slab(0, 0.05, 21, [&](double) { return zeros(g); });
  const auto free = picard_solve(s, zero, u0);
  CHECK(free.residuals.size() == 1);
  CHECK(free.residuals[0] < 1e-12);
  CHECK(free.converged);
  CHECK(slab_distance(free.u, free_evolution(s, u0, 0, 0.05, 21)) < 1e-12);

  const Field V = sample(g, [](const Point& x) { return cplx(0.2 * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 8)); });
  const TimeSlab Vs = make_slab(0, 0.05, 21, [&](double) { return V; });
  PicardOptions opt;
  opt.max_iter = 20;
  opt.tol = 1e-12;
  const auto r = picard_solve(s, Vs, u0, opt);
  CHECK(r.converged);
  CHECK(r.fixed_point_residual < 1e-10);
  for (std::size_t k = 2; k < r.residuals.size(); ++k) {
    CHECK(r.residuals[k] < r.residuals[k - 1]);
  }

  const auto w = picard_solve_windowed(s, Vs, u0, 2, opt);
  CHECK(w.converged);
  CHECK(slab_distance(w.u, r.u) < 1e-9);

  // strong potential over a long window diverges and is flagged
  const TimeSlab big = make_slab(0, 0.5, 41, [&](double) { return 40.0 * V; });
  PicardOptions o2;
  o2.max_iter = 30;
  const auto d = picard_solve(s, big, u0, o2);
  CHECK(d.diverged);
  CHECK_FALSE(d.converged);
}

TEST_CASE("boundary and nyquist diagnostics") {
  const Grid g = make_grid(2, 64, 40);
  CHECK(boundary_mass(gaussian(g)) < 1e-12);
  CHECK(nyquist_mass(gaussian(g)) < 1e-8);
  const Field noise = random_field(g, 2);
  CHECK(boundary_mass(noise) > 0.05);
  CHECK(nyquist_mass(noise) > 0.05);
}
