#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "strichlab/decomp.hpp"
#include "strichlab/error.hpp"

namespace strichlab::decomp {

namespace {

// Smallest power of two lambda with lambda >= e, i.e. lambda/2 < e <= lambda.
double dyadic_ceiling(double e) {
  int ex = 0;
  const double frac = std::frexp(e, &ex);
  return frac == 0.5 ? e : std::ldexp(1.0, ex);
}

}  // namespace

double AtomicDecomposition::coefficient_norm() const {
  double top = 0.0;
  for (const auto& a : atoms) top = std::max(top, a.coefficient);
  if (inv_p == 0.0 || top == 0.0) return top;
  double s = 0.0;
  for (const auto& a : atoms) s += std::pow(a.coefficient / top, 1.0 / inv_p);
  return top * std::pow(s, inv_p);
}

double weighted_lp(const std::vector<double>& f, const std::vector<double>& measure, double p) {
  if (f.size() != measure.size()) throw InvalidArgument("values and measures differ in length");
  double top = 0.0;
  for (double v : f) top = std::max(top, std::abs(v));
  if (top == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += measure[i] * std::pow(std::abs(f[i]) / top, p);
  return top * std::pow(s, 1.0 / p);
}

AtomicDecomposition atomic_decompose(const std::vector<double>& f,
                                     const std::vector<double>& measure, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("atoms need 1 <= p < inf");
  if (f.size() != measure.size()) throw InvalidArgument("values and measures differ in length");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw InvalidArgument("function values must be finite");
    if (!(measure[i] > 0.0) || !std::isfinite(measure[i]))
      throw InvalidArgument("cell measures must be positive");
  }

  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(f[a]) > std::abs(f[b]); });

  AtomicDecomposition d;
  d.inv_p = 1.0 / p;
  d.cells = f.size();
  std::map<double, Atom> slices;
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    if (f[idx] == 0.0) break;  // the remaining cells carry nothing
    cumulative += measure[idx];
    const double lambda = dyadic_ceiling(cumulative);
    Atom& a = slices[lambda];
    a.lambda = lambda;
    a.support.push_back(idx);
    a.coefficient = std::max(a.coefficient, std::abs(f[idx]));
  }
  for (auto& [lambda, atom] : slices) {
    const double peak = atom.coefficient;
    atom.coefficient = std::pow(lambda, d.inv_p) * peak;
    for (std::size_t idx : atom.support) atom.values.push_back(f[idx] / atom.coefficient);
    d.atoms.push_back(std::move(atom));
  }
  return d;
}

std::vector<double> reconstruct(const AtomicDecomposition& d) {
  std::vector<double> f(d.cells, 0.0);
  for (const auto& a : d.atoms)
    for (std::size_t i = 0; i < a.support.size(); ++i)
      f[a.support[i]] += a.coefficient * a.values[i];
  return f;
}

AtomCheck check_atoms(const AtomicDecomposition& d, const std::vector<double>& f,
                      const std::vector<double>& measure) {
  AtomCheck c;
  std::vector<int> hits(d.cells, 0);
  for (const auto& a : d.atoms) {
    double mass = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < a.support.size(); ++i) {
      const std::size_t idx = a.support[i];
      if (idx >= d.cells || ++hits[idx] > 1) c.supports_disjoint = false;
      if (idx < measure.size()) mass += measure[idx];
      peak = std::max(peak, std::abs(a.values[i]));
    }
    if (mass > a.lambda * (1.0 + 1e-12)) c.support_measure_ok = false;
    if (peak > 2.0 * std::pow(a.lambda, -d.inv_p) * (1.0 + 1e-12)) c.sup_bound_ok = false;
  }
  const std::vector<double> r = reconstruct(d);
  for (std::size_t i = 0; i < f.size() && i < r.size(); ++i)
    c.reconstruction_error =
        std::max(c.reconstruction_error, std::abs(r[i] - f[i]) / std::max(1.0, std::abs(f[i])));
  if (r.size() != f.size()) c.reconstruction_error = INFINITY;
  return c;
}

}  // namespace strichlab::decomp
