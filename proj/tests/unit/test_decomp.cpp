#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "doctest.h"
#include "oracles.hpp"
#include "strichlab/decomp.hpp"
#include "strichlab/error.hpp"

using namespace strichlab;
using namespace strichlab::decomp;
using spectral::Field;
using spectral::Grid;
using spectral::Point;

namespace {

const DispersionSetup kSetup{1.5, 2};

Field random_field(const Grid& g, oracle::SplitMix& rng) {
  // smooth and localized: Gaussian envelope times a few random plane waves
  const double c[4] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return spectral::sample(g, [&](const Point& x) {
    const double env = std::exp(-(x[0] * x[0] + x[1] * x[1]) / 4);
    return env * cplx(c[0] * std::cos(x[0]) + c[1], c[2] * std::sin(x[1]) + c[3] * std::cos(2 * x[0]));
  });
}

TimeSlab random_slab(const Grid& g, std::size_t count, double dt, oracle::SplitMix& rng) {
  TimeSlab s{0.0, dt, {}};
  for (std::size_t k = 0; k < count; ++k) s.fields.push_back(random_field(g, rng));
  return s;
}

// Direct evaluation of <U(-t_i) F_i, U(-t_j) G_j> over a set of index pairs.
cplx direct_pairs(const TimeSlab& F, const TimeSlab& G, bool (*keep)(std::size_t, std::size_t)) {
  cplx sum = 0;
  for (std::size_t i = 0; i < F.count(); ++i)
    for (std::size_t j = 0; j < G.count(); ++j)
      if (keep(i, j))
        sum += spectral::inner_product(spectral::propagate(kSetup, -F.time(i), F.fields[i]),
                                       spectral::propagate(kSetup, -G.time(j), G.fields[j]));
  return F.dt * F.dt * sum;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("Whitney squares at one and two levels") {
  const auto one = whitney_decompose(1.0, 0.5, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].I.start() == 0.0);
  CHECK(one[0].I.end() == 0.5);
  CHECK(one[0].J.start() == 0.5);
  CHECK(one[0].J.end() == 1.0);

  std::set<std::tuple<double, double, double, double>> got;
  for (const auto& q : whitney_decompose(1.0, 0.25, 2)) got.insert({q.I.start(), q.I.end(), q.J.start(), q.J.end()});
  const std::set<std::tuple<double, double, double, double>> want{
      {0, .25, .5, .75}, {0, .25, .75, 1}, {.25, .5, .75, 1},  // separated
      {0, .25, .25, .5}, {.25, .5, .5, .75}, {.5, .75, .75, 1},  // finest adjacent
  };
  CHECK(got == want);
}

TEST_CASE("Whitney cover is an exact tiling") {
  for (int levels : {3, 6}) {
    const std::int64_t cells = whitney_cells(levels);
    const auto squares = whitney_decompose(2.0, 2.0 / static_cast<double>(cells), levels);
    std::vector<int> hits(static_cast<std::size_t>(cells * cells), 0);
    for (const auto& q : squares)
      for (auto i = q.I.first_cell; i < q.I.last_cell; ++i)
        for (auto j = q.J.first_cell; j < q.J.last_cell; ++j) ++hits[static_cast<std::size_t>(i * cells + j)];
    int bad = 0;
    for (std::int64_t i = 0; i < cells; ++i)
      for (std::int64_t j = 0; j < cells; ++j)
        if (hits[static_cast<std::size_t>(i * cells + j)] != (i < j ? 1 : 0)) ++bad;
    CHECK(bad == 0);
  }
  // enumeration of the cover rule
  std::set<std::tuple<int, long, long>> got;
  for (const auto& q : whitney_decompose(1.0, 1.0 / 64, 6))
    got.insert({static_cast<int>(std::lround(-std::log2(q.lambda()))), static_cast<long>(q.I.k), static_cast<long>(q.J.k)});
  const auto brute = oracle::whitney_bruteforce(6);
  CHECK(got == std::set<std::tuple<int, long, long>>(brute.begin(), brute.end()));
}

TEST_CASE("Whitney geometry") {
  const int levels = 7;
  const double T = 3.0;
  const double finest = T / static_cast<double>(whitney_cells(levels));
  for (const auto& q : whitney_decompose(T, finest / 4, levels)) {
    CHECK(q.I.lambda == q.J.lambda);
    CHECK(q.I.end() <= q.J.start());
    if (q.lambda() > finest) {
      CHECK(q.distance() >= q.lambda() * (1 - 1e-12));
      CHECK(q.distance() <= 2 * q.lambda() * (1 + 1e-12));
    }
  }
  CHECK_THROWS_AS(whitney_decompose(1.0, 0.3, 1), InvalidArgument);
  CHECK_THROWS_AS(whitney_decompose(1.0, 0.25, 3), InvalidArgument);
}

TEST_CASE("bilinear form basics") {
  const Grid g = spectral::make_grid(2, 32, 16);
  oracle::SplitMix rng{5};
  const auto F = random_slab(g, 8, 0.125, rng);
  TimeSlab Z{0.0, 0.125, std::vector<Field>(8, spectral::zeros(g))};
  CHECK(bilinear_B(kSetup, F, Z) == cplx(0.0));

  // single nonzero cell on each side
  TimeSlab A = Z, B = Z;
  A.fields[2] = random_field(g, rng);
  B.fields[5] = random_field(g, rng);
  const cplx one = 0.125 * 0.125 *
                   spectral::inner_product(spectral::propagate(kSetup, -A.time(2), A.fields[2]),
                                           spectral::propagate(kSetup, -B.time(5), B.fields[5]));
  CHECK(rel(bilinear_B(kSetup, A, B), one) < 1e-12);
  CHECK(bilinear_B(kSetup, B, A) == cplx(0.0));

  // against direct evaluation
  const auto G = random_slab(g, 8, 0.125, rng);
  CHECK(rel(bilinear_B(kSetup, F, G), direct_pairs(F, G, [](std::size_t i, std::size_t j) { return i < j; })) < 1e-12);
  CHECK(rel(bilinear_diagonal(kSetup, F, G), direct_pairs(F, G, [](std::size_t i, std::size_t j) { return i == j; })) <
        1e-12);

  TimeSlab shifted = G;
  shifted.t0 = 0.5;
  CHECK_THROWS_AS(bilinear_B(kSetup, F, shifted), InvalidArgument);
}

TEST_CASE("conjugate symmetry of the bilinear form") {
  const Grid g = spectral::make_grid(2, 32, 16);
  oracle::SplitMix rng{9};
  const auto F = random_slab(g, 6, 0.2, rng);
  const auto G = random_slab(g, 6, 0.2, rng);
  Field sf = spectral::zeros(g), sg = spectral::zeros(g);
  for (std::size_t k = 0; k < F.count(); ++k) {
    sf = sf + spectral::propagate(kSetup, -F.time(k), F.fields[k]);
    sg = sg + spectral::propagate(kSetup, -G.time(k), G.fields[k]);
  }
  const cplx full = 0.2 * 0.2 * spectral::inner_product(sf, sg);
  const cplx lhs = bilinear_B(kSetup, F, G) + std::conj(bilinear_B(kSetup, G, F)) + bilinear_diagonal(kSetup, F, G);
  CHECK(rel(lhs, full) < 1e-12);
}

TEST_CASE("Whitney squares sum to the bilinear form") {
  const Grid g = spectral::make_grid(2, 16, 12);
  oracle::SplitMix rng{13};
  for (int levels : {3, 4, 5, 6}) {
    const std::size_t cells = std::size_t{1} << levels;
    const double T = 1.0, dt = T / static_cast<double>(cells);
    const auto F = random_slab(g, cells, dt, rng);
    const auto G = random_slab(g, cells, dt, rng);
    const auto squares = whitney_decompose(T, dt, levels);
    const cplx B = bilinear_B(kSetup, F, G);
    CHECK(rel(bilinear_sum(kSetup, F, G, squares), B) < 1e-12);
    if (levels == 3) {
      cplx s = 0;
      for (const auto& q : squares) s += bilinear_BQ(kSetup, F, G, q);
      CHECK(rel(s, B) < 1e-12);
    }
  }
}

TEST_CASE("square disjoint from the support gives zero") {
  const Grid g = spectral::make_grid(2, 16, 12);
  oracle::SplitMix rng{17};
  TimeSlab F{0.0, 0.125, std::vector<Field>(8, spectral::zeros(g))};
  TimeSlab G = F;
  F.fields[6] = random_field(g, rng);
  G.fields[7] = random_field(g, rng);
  for (const auto& q : whitney_decompose(1.0, 0.125, 3))
    if (q.I.last_cell <= 6 || q.J.last_cell <= 7) CHECK(bilinear_BQ(kSetup, F, G, q) == cplx(0.0));
}

TEST_CASE("frequency-localized bilinear form") {
  const Grid g = spectral::make_grid(2, 64, 32);
  oracle::SplitMix rng{19};
  const auto F = random_slab(g, 8, 0.125, rng);
  const auto G = random_slab(g, 8, 0.125, rng);
  for (double N : {0.5, 1.0, 2.0}) {
    TimeSlab PF = F;
    for (auto& f : PF.fields) f = spectral::project(N, f);
    CHECK(bilinear_BN(kSetup, N, F, G) == bilinear_B(kSetup, PF, G));
  }
}

TEST_CASE("atoms of simple functions") {
  {
    const auto d = atomic_decompose({3.0}, {1.0}, 2.0);
    REQUIRE(d.atoms.size() == 1);
    CHECK(d.atoms[0].lambda == 1.0);
    CHECK(d.atoms[0].coefficient == doctest::Approx(3.0));
  }
  {
    // levels 2 > 1 on measures 1/2 and 1, in quarter cells
    const std::vector<double> f{2, 2, 1, 1, 1, 1};
    const std::vector<double> mu(6, 0.25);
    for (double p : {1.0, 2.0, 5.0}) {
      const auto d = atomic_decompose(f, mu, p);
      std::set<double> sizes;
      for (const auto& a : d.atoms) sizes.insert(a.lambda);
      CHECK(sizes.count(0.5) == 1);
      CHECK(sizes.count(1.0) == 1);
      const double ratio = d.coefficient_norm() / weighted_lp(f, mu, p);
      CHECK(ratio >= 0.25);
      CHECK(ratio <= 4.0);
      const auto c = check_atoms(d, f, mu);
      CHECK(c.supports_disjoint);
      CHECK(c.support_measure_ok);
      CHECK(c.sup_bound_ok);
      CHECK(c.reconstruction_error < 1e-14);
    }
  }
  CHECK(atomic_decompose({0.0, 0.0}, {1.0, 1.0}, 2.0).atoms.empty());
  CHECK_THROWS_AS(atomic_decompose({1.0}, {1.0}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(atomic_decompose({1.0}, {0.0}, 2.0), InvalidArgument);
}

TEST_CASE("atoms of random step functions") {
  oracle::SplitMix rng{23};
  double lo = INFINITY, hi = 0;
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t cells = 1 + rng.next() % 200;
    std::vector<double> f(cells), mu(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      f[i] = rng.uniform() < 0.1 ? 0.0 : rng.uniform(-5, 5);
      mu[i] = rng.uniform(0.001, 0.1);
    }
    const double p = rng.uniform(1.0, 8.0);
    const auto d = atomic_decompose(f, mu, p);
    const auto c = check_atoms(d, f, mu);
    if (!c.supports_disjoint || !c.support_measure_ok || !c.sup_bound_ok || c.reconstruction_error > 1e-14) ++failures;
    const double ratio = d.coefficient_norm() / weighted_lp(f, mu, p);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    CHECK(atomic_decompose(f, mu, p).atoms.size() == d.atoms.size());  // deterministic
  }
  CHECK(failures == 0);
  CHECK(lo >= 0.25);
  CHECK(hi <= 4.0);
}

TEST_CASE("Hoelder sum over squares of one scale") {
  auto lhs = [](int level) {
    const double lambda = std::ldexp(1.0, -level);
    double s = 0;
    for (const auto& q : whitney_decompose(1.0, lambda, level))
      if (q.lambda() == lambda && q.distance() > 0) s += std::sqrt(lambda) * std::sqrt(lambda);
    return s;
  };
  // f = g = 1, r = r~ = 2
  CHECK(lhs(2) == doctest::Approx(0.75));
  CHECK(lhs(2) <= 1.0);
  // one scale finer the full family exceeds the constant-one bound; each
  // matching class stays below it
  CHECK(lhs(3) == doctest::Approx(9.0 / 8.0));
  for (const auto& cls : matching_classes(3)) {
    std::set<std::int64_t> left, right;
    for (const auto& q : cls) {
      CHECK(left.insert(q.I.k).second);
      CHECK(right.insert(q.J.k).second);
    }
    CHECK(static_cast<double>(cls.size()) * 0.125 <= 1.0);
  }
}

TEST_CASE("sequence lemmas") {
  const auto rep = verify_sequence_lemmas(1000, 4);
  CHECK(rep.trials == 1000);
  CHECK(rep.holder_violations == 0);
  CHECK(rep.holder_family_violations == 0);
  CHECK(rep.young_violations == 0);
  CHECK(rep.passed());
  CHECK(rep.holder_max_ratio <= 1.0 + kLemmaSlack);
  CHECK(rep.young_max_ratio <= 1.0 + kLemmaSlack);
  const auto again = verify_sequence_lemmas(1000, 4);
  CHECK(again.holder_max_ratio == rep.holder_max_ratio);
  CHECK(again.young_max_ratio == rep.young_max_ratio);

  // single spikes: the convolution sum has one term and every l^p norm is the spike height
  std::vector<double> A(5, 0.0), B(5, 0.0), C(5, 0.0);
  A[3] = 2.0;
  B[1] = 3.0;
  C[2] = 0.5;
  double sum = 0;
  for (std::size_t n = 0; n < A.size(); ++n)
    for (std::size_t k = 0; k <= n; ++k) sum += A[n] * B[k] * C[n - k];
  const std::vector<double> unit(5, 1.0);
  CHECK(sum == weighted_lp(A, unit, 1.5) * weighted_lp(B, unit, 3.0) * weighted_lp(C, unit, 1.2));
}
