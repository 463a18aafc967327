#include <algorithm>
#include <cmath>

#include "strichlab/decomp.hpp"
#include "strichlab/random.hpp"

namespace strichlab::decomp {

namespace {

// ||f||_{L^r} of a step function on equal cells of width 1/cells, restricted
// to cells [first, last). inv_r = 0 gives the maximum.
double step_norm(const std::vector<double>& f, std::int64_t first, std::int64_t last, double inv_r) {
  const double width = 1.0 / static_cast<double>(f.size());
  double top = 0.0;
  for (auto i = first; i < last; ++i) top = std::max(top, f[i]);
  if (inv_r == 0.0 || top == 0.0) return top;
  double s = 0.0;
  for (auto i = first; i < last; ++i) s += width * std::pow(f[i] / top, 1.0 / inv_r);
  return top * std::pow(s, inv_r);
}

double seq_norm(const std::vector<double>& a, double inv_p) {
  double top = 0.0;
  for (double v : a) top = std::max(top, v);
  if (inv_p == 0.0 || top == 0.0) return top;
  double s = 0.0;
  for (double v : a) s += std::pow(v / top, 1.0 / inv_p);
  return top * std::pow(s, inv_p);
}

// Random nonnegative values with occasional zeros and spikes.
std::vector<double> random_values(Rng& rng, std::size_t count) {
  std::vector<double> v(count);
  for (auto& x : v) {
    const double u = rng.uniform();
    x = u < 0.15 ? 0.0 : (u < 0.25 ? 10.0 * rng.uniform() : rng.uniform());
  }
  return v;
}

bool exceeds(double lhs, double rhs) { return lhs - rhs > kLemmaSlack * std::max(1.0, rhs); }

}  // namespace

std::vector<std::vector<WhitneySquare>> matching_classes(int level) {
  std::vector<std::vector<WhitneySquare>> classes(3);
  const std::int64_t cells = whitney_cells(level);
  for (const auto& q : whitney_decompose(1.0, 1.0 / static_cast<double>(cells), level)) {
    if (q.I.lambda != std::ldexp(1.0, -level)) continue;
    const auto gap = q.J.k - q.I.k;
    if (gap == 2) classes[q.I.k % 2 == 0 ? 0 : 1].push_back(q);
    else if (gap == 3) classes[2].push_back(q);
  }
  return classes;
}

SequenceLemmaReport verify_sequence_lemmas(int trials, std::uint64_t seed) {
  SequenceLemmaReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.max_slack = -INFINITY;
  Rng rng(seed);

  for (int t = 0; t < trials; ++t) {
    // Hoelder over Whitney squares of one scale.
    const int level = 2 + static_cast<int>(rng.below(5));
    const int refine = static_cast<int>(rng.below(3));
    const std::size_t cells = std::size_t{1} << (level + refine);
    const auto f = random_values(rng, cells);
    const auto g = random_values(rng, cells);
    const double inv_rt = rng.uniform();
    const double inv_r = rng.uniform(1.0 - inv_rt, 1.0);
    const double rhs = step_norm(f, 0, cells, inv_rt) * step_norm(g, 0, cells, inv_r);
    const std::int64_t per = std::int64_t{1} << refine;

    double family = 0.0;
    for (const auto& cls : matching_classes(level)) {
      double lhs = 0.0;
      for (const auto& q : cls)
        lhs += step_norm(f, q.I.k * per, (q.I.k + 1) * per, inv_rt) *
               step_norm(g, q.J.k * per, (q.J.k + 1) * per, inv_r);
      family += lhs;
      if (rhs > 0.0) rep.holder_max_ratio = std::max(rep.holder_max_ratio, lhs / rhs);
      rep.max_slack = std::max(rep.max_slack, lhs - rhs);
      if (exceeds(lhs, rhs)) ++rep.holder_violations;
    }
    if (rhs > 0.0) rep.holder_family_max_ratio = std::max(rep.holder_family_max_ratio, family / rhs);
    if (exceeds(family, 3.0 * rhs)) ++rep.holder_family_violations;

    // Young for sequences with 1/p + 1/q + 1/r >= 2.
    double ip, iq, ir;
    do {
      ip = rng.uniform();
      iq = rng.uniform();
      ir = rng.uniform();
    } while (ip + iq + ir < 2.0);
    const auto A = random_values(rng, 1 + rng.below(24));
    const auto B = random_values(rng, 1 + rng.below(24));
    const auto C = random_values(rng, 1 + rng.below(24));
    // sum over n, k with A_n B_k C_{n-k}; all sequences start at index 0.
    double lhs = 0.0;
    for (std::size_t n = 0; n < A.size(); ++n)
      for (std::size_t k = 0; k <= n && k < B.size(); ++k)
        if (n - k < C.size()) lhs += A[n] * B[k] * C[n - k];
    const double yr = seq_norm(A, ip) * seq_norm(B, iq) * seq_norm(C, ir);
    if (yr > 0.0) rep.young_max_ratio = std::max(rep.young_max_ratio, lhs / yr);
    rep.max_slack = std::max(rep.max_slack, lhs - yr);
    if (exceeds(lhs, yr)) ++rep.young_violations;
  }
  return rep;
}

}  // namespace strichlab::decomp
