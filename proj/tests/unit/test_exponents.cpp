#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "strichlab/error.hpp"
#include "strichlab/exponents.hpp"

using namespace strichlab;
using namespace strichlab::exponents;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_violation(const AdmissibilityVerdict& v, const std::string& id) {
  for (const auto& x : v.violations)
    if (x.id == id) return true;
  return false;
}

ExponentTuple diagonal(int n, double a, double q) { return corollary_tuple(n, a, q); }

}  // namespace

TEST_CASE("decay windows follow the case split") {
  auto w = decay_parameters({2.0, 3});
  CHECK(w.sigma == 1.5);
  CHECK(w.sigma_ext == 2.5);
  w = decay_parameters({1.0, 3});
  CHECK(w.sigma == 1.0);
  CHECK(w.sigma_ext == 2.0);
  w = decay_parameters({1.0, 4});
  CHECK(w.sigma == 1.5);
  CHECK(w.sigma_ext == 3.0);
  CHECK_THROWS_AS(decay_parameters({1.0, 1}), UnsupportedSetup);
  CHECK_THROWS_AS(decay_parameters({2.0, 1}), UnsupportedSetup);
  CHECK_THROWS_AS(decay_parameters({0.5, 3}), InvalidArgument);
  CHECK_THROWS_AS(decay_parameters({2.0, 0}), InvalidArgument);
}

TEST_CASE("instance validity windows") {
  CHECK(radial_instance_valid({2.0, 2}));
  CHECK_FALSE(radial_instance_valid({1.0, 2}));
  CHECK(radial_instance_valid({1.0, 3}));
  CHECK_FALSE(averaged_instance_valid({2.0, 2}));
  CHECK(averaged_instance_valid({1.0, 3}));
}

TEST_CASE("derivative offset r") {
  CHECK(derivative_offset_r({2.0, 5}) == 0.0);
  CHECK(derivative_offset_r({1.0, 3}) == -1.0);
  CHECK(derivative_offset_r({3.0, 2}) == 0.5);
}

TEST_CASE("scaling function") {
  const DispersionSetup s{2.0, 3};
  CHECK(std::abs(scaling_beta(s, ExponentTuple::from_exponents(10.0 / 3, 10.0 / 3, 10.0 / 3, 10.0 / 3, 0))) < 1e-15);
  CHECK(std::abs(scaling_beta(s, ExponentTuple::from_exponents(kInf, kInf, kInf, kInf, -1.5))) < 1e-15);
  CHECK(std::abs(scaling_beta(s, ExponentTuple::from_exponents(2, 6, 2, 6, 0))) < 1e-15);

  oracle::SplitMix rng{7};
  for (int i = 0; i < 200; ++i) {
    const DispersionSetup su{rng.uniform(1.0, 4.0), 2 + static_cast<int>(rng.next() % 3)};
    ExponentTuple t{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), 0.0};
    t.s = scaling_s(su, t);
    CHECK(std::abs(scaling_beta(su, t)) <= 1e-14);
  }
}

TEST_CASE("reciprocal handling") {
  CHECK(reciprocal(kInf) == 0.0);
  CHECK(reciprocal(4.0) == 0.25);
  CHECK_THROWS_AS(reciprocal(0.5), InvalidArgument);
  CHECK_THROWS_AS(validate(ExponentTuple{1.5, 0, 0, 0, 0}), InvalidArgument);
}

TEST_CASE("homogeneous admissibility") {
  const DispersionSetup s{2.0, 3};
  auto h = homogeneous_admissible(s, 0.5, 0.25);
  REQUIRE(h);
  CHECK(h->tau == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(h->s == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(homogeneous_admissible(s, 0.5, 1.0 / 6.0));  // tau = sigma
  CHECK_FALSE(homogeneous_admissible(s, 0.5, 0.5));
  CHECK_THROWS_AS(homogeneous_admissible(s, 0.6, 0.25), InvalidArgument);
}

TEST_CASE("mu values") {
  const DispersionSetup s{2.0, 3};
  const auto t = diagonal(3, 2.0, 10.0 / 3.0);
  for (double s1 : {1.6, 2.0, 2.4})
    for (double s2 : {1.55, 2.2})
      CHECK(*mu_value(s, t, s1, s2) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));

  const auto u = ExponentTuple::from_exponents(3.0, 4.0, 3.0, 4.0, 0.0);
  CHECK(*mu_value(s, u, 2.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(*mu_value(s, u, 2.0, 2.0) ==
        doctest::Approx(oracle::mu_direct(2.0, 3, 1.5, 4.0, 4.0, 0.0, 2.0, 2.0)));

  // s - r + ... = 0
  const auto z = ExponentTuple::from_exponents(kInf, kInf, kInf, kInf, 0.0);
  CHECK_FALSE(mu_value(s, z, 2.0, 2.0).has_value());
}

TEST_CASE("mu theta reciprocity") {
  oracle::SplitMix rng{11};
  const DispersionSetup s{1.7, 3};
  const auto w = decay_parameters(s);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    ExponentTuple t{rng.uniform(0, 0.5), rng.uniform(0, 0.5), rng.uniform(0, 0.5), rng.uniform(0, 0.5), 0};
    t.s = scaling_s(s, t);
    const SigmaPair p{rng.uniform(w.sigma, w.sigma_ext), rng.uniform(w.sigma, w.sigma_ext)};
    const auto v = evaluate_witness(s, t, Mode::local, p);
    if (v.witness) {
      CHECK(std::abs(v.witness->mu * v.witness->theta - 1.0) <= 1e-12);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("local checker with explicit witness") {
  const DispersionSetup s{2.0, 3};
  const auto t = ExponentTuple::from_exponents(2, 6, 2, 6, 0);
  const auto v = check_local(s, t, SigmaPair{2.0, 2.0});
  CHECK(v.feasible);
  REQUIRE(v.witness);
  CHECK(v.witness->mu == doctest::Approx(3.0).epsilon(1e-12));

  const auto b = check_local(s, t, SigmaPair{1.5, 2.0});
  CHECK_FALSE(b.feasible);
  CHECK(has_violation(b, "sigma-window"));
}

TEST_CASE("non-sharp checker") {
  const DispersionSetup s{1.98, 3};
  const double q = 2.0 * (3 + 1.98) / 3;
  const auto v = check_global_nonsharp(s, diagonal(3, 1.98, q));
  CHECK(v.feasible);
  REQUIRE(v.witness);
  CHECK(v.witness->sigma1 < 1.6);
  CHECK(oracle::nonsharp_direct(1.98, 3, 1.5, q, q, 1.0 / (3 / 4.98 - 1 / q), 1.0 / (3 / 4.98 - 1 / q),
                                0.0, v.witness->sigma1, v.witness->sigma2));

  // p = infinity
  const DispersionSetup s2{2.0, 3};
  ExponentTuple inf_p{0.3, 0.0, 0.3, 0.2, 0.0};
  inf_p.s = scaling_s(s2, inf_p);
  const auto w = check_global_nonsharp(s2, inf_p);
  CHECK_FALSE(w.feasible);
  CHECK(w.violations.size() > 0);

  const auto x = check_global_nonsharp(s2, ExponentTuple::from_exponents(2, 6, 2, 6, 0));
  CHECK_FALSE(x.feasible);
  CHECK(has_violation(x, "nonsharp-time-sum"));

  auto off = diagonal(3, 2.0, 10.0 / 3);
  off.s = 0.1;
  CHECK(has_violation(check_global_nonsharp(s2, off), "scaling"));
}

TEST_CASE("sharp checker") {
  const DispersionSetup s{2.0, 3};
  const auto good = ExponentTuple::from_exponents(2, 4, 2, 4, 0.25);
  const auto at = evaluate_witness(s, good, Mode::sharp, {2.25, 2.25});
  CHECK(at.feasible);
  REQUIRE(at.witness);
  CHECK(at.witness->mu == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(check_global_sharp(s, good).feasible);

  const auto end = ExponentTuple::from_exponents(2, 6, 2, 6, 0);
  CHECK_FALSE(check_global_sharp(s, end).feasible);
  CHECK_FALSE(sigma_feasibility_search(s, end, Mode::sharp).has_value());
  // mu = 3 on the whole window square
  for (double a = 1.6; a < 2.5; a += 0.2)
    for (double b = 1.6; b < 2.5; b += 0.2) CHECK(*mu_value(s, end, a, b) == doctest::Approx(3.0));

  const auto p2 = check_global_sharp(s, ExponentTuple::from_exponents(2, 2, 2, 2, 0));
  CHECK_FALSE(p2.feasible);
  CHECK(has_violation(p2, "p-range"));
}

TEST_CASE("verdict structure and relaxations") {
  oracle::SplitMix rng{3};
  int nonsharp_hits = 0;
  for (int i = 0; i < 400; ++i) {
    const DispersionSetup s{rng.uniform(1.0, 3.0), 2 + static_cast<int>(rng.next() % 3)};
    if (decay_parameters(s).sigma < 1.0) continue;
    ExponentTuple t{rng.uniform(0, 0.6), rng.uniform(0, 0.5), rng.uniform(0, 0.6), rng.uniform(0, 0.5), 0};
    if (i % 2 == 0) t.inv_qt = std::max(0.0, std::min(1.0, 1.0 - t.inv_q));
    t.s = scaling_s(s, t);
    const auto ns = check_global_nonsharp(s, t);
    const auto sh = check_global_sharp(s, t);
    for (const auto* v : {&ns, &sh}) {
      CHECK(v->feasible == v->violations.empty());
      CHECK(v->feasible == v->witness.has_value());
    }
    CHECK_FALSE((ns.feasible && sh.feasible));
    if (ns.feasible) {
      ++nonsharp_hits;
      const auto loc = check_local(s, t, SigmaPair{ns.witness->sigma1, ns.witness->sigma2});
      CHECK(loc.feasible);
      // returned witnesses re-validate
      CHECK(evaluate_witness(s, t, Mode::nonsharp, {ns.witness->sigma1, ns.witness->sigma2}).feasible);
    }
    if (sh.feasible)
      CHECK(evaluate_witness(s, t, Mode::sharp, {sh.witness->sigma1, sh.witness->sigma2}).feasible);
  }
  CHECK(nonsharp_hits > 0);
}

TEST_CASE("search is deterministic and short-circuits") {
  const DispersionSetup s{1.98, 3};
  const auto t = diagonal(3, 1.98, 2.0 * 4.98 / 3);
  const auto a = sigma_feasibility_search(s, t, Mode::nonsharp);
  const auto b = sigma_feasibility_search(s, t, Mode::nonsharp);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->sigma1 == b->sigma1);
  CHECK(a->sigma2 == b->sigma2);
  auto bad = t;
  bad.s += 0.5;
  CHECK_FALSE(sigma_feasibility_search(s, bad, Mode::nonsharp));
}

TEST_CASE("mu at a = 2 on the diagonal ignores sigma") {
  oracle::SplitMix rng{5};
  for (int n : {2, 3, 4}) {
    const DispersionSetup s{2.0, n};
    const auto w = decay_parameters(s);
    const double q = 2.0 * (n + 2.0) / n;
    const auto t = diagonal(n, 2.0, q);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const double mu = *mu_value(s, t, rng.uniform(w.sigma, w.sigma_ext), rng.uniform(w.sigma, w.sigma_ext));
      worst = std::max(worst, std::abs(mu - q / 2) / (q / 2));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("region sampling") {
  const DispersionSetup s{2.0, 3};
  const auto mask = region_sample(s, 0.0, 0.0, derivative_offset_r(s), 8, false);
  CHECK(mask.points.size() == 64);
  const auto& o = mask.at(0, 0);
  CHECK(o.dispersive_vertex);
  CHECK((o.code & kLocalBit) == 0);
  for (const auto& p : mask.points) {
    CHECK(p.inv_p <= 0.5);
    CHECK(p.inv_pt <= 0.5);
  }
  CHECK_THROWS_AS(region_sample(s, 0.2, 0.2, 0, 4, true), InvalidArgument);

  // An interior wedge point re-validates.
  const auto wedge = region_sample(s, 0.3, 0.3, 0.0, 16, true);
  int local = 0;
  for (const auto& p : wedge.points) {
    if (!(p.code & kLocalBit)) continue;
    ++local;
    CHECK(check_local(s, ExponentTuple{0.3, p.inv_p, 0.3, p.inv_pt, p.s},
                      SigmaPair{p.witness->sigma1, p.witness->sigma2})
              .feasible);
  }
  CHECK(local > 0);
}

TEST_CASE("application vertices") {
  const auto v = application_vertices({1.5, 3});
  CHECK(v.A.first == doctest::Approx(0.25));
  CHECK(v.A.second == 0.5);
  CHECK(v.C.first == doctest::Approx(3.0 / 8.0));
  CHECK(v.B.first == doctest::Approx(3.0 / 4.5 - 3.0 / 8.0));
  CHECK(v.D.first == 0.5);
  CHECK_THROWS_AS(application_vertices({2.0, 3}), InvalidArgument);
}

TEST_CASE("neighbourhood search near a = 2") {
  CorollarySearchOptions opts;
  opts.delta_max = 0.1;
  const auto r = corollary_delta_search(3, 0.01, opts);
  CHECK(r.delta >= 0.02);
  CHECK_FALSE(r.witnesses.empty());
  CHECK(r.mu_at_two == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(r.dq_da - 2.0 / 3.0) < 1e-6);
  for (const auto& w : r.witnesses) {
    const DispersionSetup s{w.a, 3};
    CHECK(evaluate_witness(s, corollary_tuple(3, w.a, w.q), Mode::nonsharp,
                           {w.witness.sigma1, w.witness.sigma2})
              .feasible);
  }
  CHECK_THROWS_AS(corollary_delta_search(2, 0.01), InvalidArgument);
}
