#include "strichlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strichlab/error.hpp"

namespace strichlab::exponents {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

// Everything the sigma-dependent system needs at one pair.
struct PairEval {
  double numerator = 0.0;
  double denominator = 0.0;
};

PairEval pair_eval(const DispersionSetup& setup, const ExponentTuple& t, double sigma1,
                   double sigma2) {
  const DecayWindow w = decay_parameters(setup);
  const double a = setup.a;
  const double n = setup.n;
  PairEval e;
  e.numerator = 0.5 * a * (0.5 * (sigma1 + sigma2) - w.sigma);
  e.denominator = t.s - derivative_offset_r(setup) +
                  0.5 * ((a * sigma1 - n) * t.inv_p + (a * sigma2 - n) * t.inv_pt);
  return e;
}

struct SearchOutcome {
  std::optional<SigmaWitness> witness;
  SigmaPair best;
};

// Margin shifted so that "satisfied" is exactly "adjusted >= 0" (closed) or
// "adjusted > 0" (strict); the minimum over a system ranks candidate pairs.
double adjusted(const Constraint& c) {
  return c.strict ? c.margin() - kStrictMargin : c.margin() + kClosedSlack;
}

double score(const std::vector<Constraint>& cs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cs) best = std::min(best, adjusted(c));
  return best;
}

bool all_satisfied(const std::vector<Constraint>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const Constraint& c) { return c.satisfied(); });
}

SigmaWitness make_witness(const DispersionSetup& setup, const ExponentTuple& t, SigmaPair p) {
  const PairEval e = pair_eval(setup, t, p.sigma1, p.sigma2);
  SigmaWitness w;
  w.sigma1 = p.sigma1;
  w.sigma2 = p.sigma2;
  w.theta = e.denominator / e.numerator;
  w.mu = e.numerator / e.denominator;
  return w;
}

SearchOutcome run_search(const DispersionSetup& setup, const ExponentTuple& t, Mode mode) {
  const DecayWindow w = decay_parameters(setup);
  const double h = (w.sigma_ext - w.sigma) * kWindowInsetFraction;
  const double lo = w.sigma + h;
  const double hi = w.sigma_ext - h;

  double lo1 = lo, hi1 = hi, lo2 = lo, hi2 = hi;
  SearchOutcome out;
  out.best = {lo, lo};
  double best_score = -std::numeric_limits<double>::infinity();
  const int k = kSearchPointsPerAxis;

  for (int level = 0; level < kSearchLevels; ++level) {
    const double step1 = (hi1 - lo1) / (k - 1);
    const double step2 = (hi2 - lo2) / (k - 1);
    for (int i = 0; i < k; ++i) {
      const double s1 = (i == k - 1) ? hi1 : lo1 + i * step1;
      for (int j = 0; j < k; ++j) {
        const double s2 = (j == k - 1) ? hi2 : lo2 + j * step2;
        const auto cs = sigma_constraints(setup, t, mode, {s1, s2});
        if (all_satisfied(cs)) {
          out.best = {s1, s2};
          out.witness = make_witness(setup, t, out.best);
          return out;
        }
        const double sc = score(cs);
        if (sc > best_score) {
          best_score = sc;
          out.best = {s1, s2};
        }
      }
    }
    lo1 = std::max(lo, out.best.sigma1 - 2.0 * step1);
    hi1 = std::min(hi, out.best.sigma1 + 2.0 * step1);
    lo2 = std::max(lo, out.best.sigma2 - 2.0 * step2);
    hi2 = std::min(hi, out.best.sigma2 + 2.0 * step2);
  }
  return out;
}

void append_violations(const std::vector<Constraint>& cs, std::vector<Violation>& out) {
  for (const auto& c : cs)
    if (!c.satisfied()) out.push_back({std::string(c.id), c.lhs, c.rhs});
}

}  // namespace

void validate(const DispersionSetup& setup) {
  if (!std::isfinite(setup.a) || setup.a < 1.0)
    throw InvalidArgument("dispersion order a must be a finite number >= 1");
  if (setup.n < 1) throw InvalidArgument("dimension n must be >= 1");
}

DecayWindow decay_parameters(const DispersionSetup& setup) {
  validate(setup);
  const double n = setup.n;
  DecayWindow w;
  if (setup.a == 1.0) {
    w.sigma = (n - 1.0) / 2.0;
    w.sigma_ext = n - 1.0;
  } else {
    w.sigma = n / 2.0;
    w.sigma_ext = (2.0 * n - 1.0) / 2.0;
  }
  if (!(w.sigma < w.sigma_ext))
    throw UnsupportedSetup("decay window (sigma, sigma') is empty for n = 1");
  return w;
}

double derivative_offset_r(const DispersionSetup& setup) {
  const DecayWindow w = decay_parameters(setup);
  return (setup.a * w.sigma - setup.n) / 2.0;
}

bool radial_instance_valid(const DispersionSetup& setup) {
  validate(setup);
  return setup.a > 1.0 ? setup.n >= 2 : setup.n >= 3;
}

bool averaged_instance_valid(const DispersionSetup& setup) {
  validate(setup);
  return setup.n >= 3;
}

double reciprocal(double exponent) {
  if (std::isinf(exponent) && exponent > 0) return 0.0;
  if (!(exponent >= 1.0)) throw InvalidArgument("exponent must be >= 1 or +inf");
  return 1.0 / exponent;
}

ExponentTuple ExponentTuple::from_exponents(double q, double p, double qt, double pt, double s) {
  ExponentTuple t{reciprocal(q), reciprocal(p), reciprocal(qt), reciprocal(pt), s};
  validate(t);
  return t;
}

void validate(const ExponentTuple& t) {
  if (!in_unit(t.inv_q) || !in_unit(t.inv_p) || !in_unit(t.inv_qt) || !in_unit(t.inv_pt))
    throw InvalidArgument("reciprocal exponents must lie in [0, 1]");
  if (!std::isfinite(t.s)) throw InvalidArgument("derivative parameter s must be finite");
}

double scaling_beta(const DispersionSetup& setup, const ExponentTuple& t) {
  const double a = setup.a;
  const double n = setup.n;
  return t.inv_q + t.inv_qt - (n / a) * (1.0 - t.inv_p - t.inv_pt) - 2.0 * t.s / a;
}

double scaling_s(const DispersionSetup& setup, const ExponentTuple& t) {
  const double a = setup.a;
  const double n = setup.n;
  return 0.5 * a * (t.inv_q + t.inv_qt) - 0.5 * n * (1.0 - t.inv_p - t.inv_pt);
}

std::optional<HomogeneousPoint> homogeneous_admissible(const DispersionSetup& setup, double inv_q,
                                                       double inv_p) {
  if (!(inv_q >= 0.0 && inv_q <= 0.5 && inv_p >= 0.0 && inv_p <= 0.5))
    throw InvalidArgument("homogeneous admissibility needs q, p >= 2");
  const DecayWindow w = decay_parameters(setup);
  const double gap = 0.5 - inv_p;
  if (gap <= 0.0) return std::nullopt;
  const double tau = inv_q / gap;
  if (!(tau > w.sigma && tau < w.sigma_ext)) return std::nullopt;
  return HomogeneousPoint{tau, -0.5 * setup.n + setup.n * inv_p + setup.a * inv_q};
}

std::optional<double> mu_value(const DispersionSetup& setup, const ExponentTuple& tuple,
                               double sigma1, double sigma2) {
  const PairEval e = pair_eval(setup, tuple, sigma1, sigma2);
  if (!(e.denominator > 0.0)) return std::nullopt;
  return e.numerator / e.denominator;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::local: return "local";
    case Mode::nonsharp: return "nonsharp";
    case Mode::sharp: return "sharp";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "local") return Mode::local;
  if (text == "nonsharp") return Mode::nonsharp;
  if (text == "sharp") return Mode::sharp;
  throw InvalidArgument("unknown mode '" + std::string(text) + "'");
}

std::vector<Constraint> tuple_constraints(const DispersionSetup& setup, const ExponentTuple& t,
                                          Mode mode) {
  const DecayWindow w = decay_parameters(setup);
  std::vector<Constraint> cs;
  cs.push_back({"decay-floor", 1.0, w.sigma, false});
  if (mode == Mode::local) return cs;

  const double beta = std::abs(scaling_beta(setup, t));
  cs.push_back({"scaling", beta, kScalingTolerance, false});
  const double sum = t.inv_q + t.inv_qt;
  if (mode == Mode::nonsharp) {
    cs.push_back({"nonsharp-time-sum", sum, 1.0, true});
    cs.push_back({"q-finite", 0.0, t.inv_q, true});
    cs.push_back({"qt-finite", 0.0, t.inv_qt, true});
  } else {
    cs.push_back({"sharp-time-sum", std::abs(sum - 1.0), kScalingTolerance, false});
    cs.push_back({"p-range", 0.0, t.inv_p, true});
    cs.push_back({"p-range", t.inv_p, 0.5, true});
    cs.push_back({"pt-range", 0.0, t.inv_pt, true});
    cs.push_back({"pt-range", t.inv_pt, 0.5, true});
    cs.push_back({"p-q-order", t.inv_p, t.inv_q, false});
    cs.push_back({"pt-qt-order", t.inv_pt, t.inv_qt, false});
  }
  return cs;
}

// In terms of theta = 1/mu every bound on mu becomes linear in the reciprocal
// exponents, which is how each constraint is stated below.
std::vector<Constraint> sigma_constraints(const DispersionSetup& setup, const ExponentTuple& t,
                                          Mode mode, SigmaPair pair) {
  const DecayWindow w = decay_parameters(setup);
  std::vector<Constraint> cs;
  cs.push_back({"sigma-window", w.sigma, std::min(pair.sigma1, pair.sigma2), true});
  cs.push_back({"sigma-window", std::max(pair.sigma1, pair.sigma2), w.sigma_ext, true});

  const PairEval e = pair_eval(setup, t, pair.sigma1, pair.sigma2);
  cs.push_back({"theta-range", 0.0, e.denominator, true});
  if (!(e.denominator > 0.0) || !(e.numerator > 0.0)) return cs;

  const double theta = e.denominator / e.numerator;
  const bool sharp = mode == Mode::sharp;
  const bool time_strict = mode != Mode::local;
  const double s1 = pair.sigma1;
  const double s2 = pair.sigma2;

  cs.push_back({"mu-lower", theta, 1.0, sharp});
  cs.push_back({"p-upper", t.inv_p, 0.5 * theta, sharp});
  cs.push_back({"p-lower", (s1 - 1.0) / s1 * 0.5 * theta, t.inv_p, sharp});
  cs.push_back({"pt-upper", t.inv_pt, 0.5 * theta, sharp});
  cs.push_back({"pt-lower", (s2 - 1.0) / s2 * 0.5 * theta, t.inv_pt, sharp});
  cs.push_back({"q-time", 0.5 * s1 * theta, t.inv_q + s1 * t.inv_p, time_strict});
  cs.push_back({"qt-time", 0.5 * s2 * theta, t.inv_qt + s2 * t.inv_pt, time_strict});
  return cs;
}

AdmissibilityVerdict evaluate_witness(const DispersionSetup& setup, const ExponentTuple& tuple,
                                      Mode mode, SigmaPair pair) {
  validate(tuple);
  AdmissibilityVerdict v;
  append_violations(tuple_constraints(setup, tuple, mode), v.violations);
  append_violations(sigma_constraints(setup, tuple, mode, pair), v.violations);
  v.feasible = v.violations.empty();
  if (v.feasible) v.witness = make_witness(setup, tuple, pair);
  return v;
}

AdmissibilityVerdict check(const DispersionSetup& setup, const ExponentTuple& tuple, Mode mode) {
  validate(tuple);
  AdmissibilityVerdict v;
  append_violations(tuple_constraints(setup, tuple, mode), v.violations);
  if (!v.violations.empty()) return v;

  const SearchOutcome found = run_search(setup, tuple, mode);
  if (found.witness) {
    v.feasible = true;
    v.witness = found.witness;
    return v;
  }
  // Report what fails at the closest candidate.
  append_violations(sigma_constraints(setup, tuple, mode, found.best), v.violations);
  if (v.violations.empty()) v.violations.push_back({"sigma-search", 0.0, 0.0});
  return v;
}

AdmissibilityVerdict check_local(const DispersionSetup& setup, const ExponentTuple& tuple,
                                 std::optional<SigmaPair> pair) {
  if (pair) return evaluate_witness(setup, tuple, Mode::local, *pair);
  return check(setup, tuple, Mode::local);
}

AdmissibilityVerdict check_global_nonsharp(const DispersionSetup& setup,
                                           const ExponentTuple& tuple) {
  return check(setup, tuple, Mode::nonsharp);
}

AdmissibilityVerdict check_global_sharp(const DispersionSetup& setup, const ExponentTuple& tuple) {
  return check(setup, tuple, Mode::sharp);
}

std::optional<SigmaWitness> sigma_feasibility_search(const DispersionSetup& setup,
                                                     const ExponentTuple& tuple, Mode mode) {
  validate(tuple);
  if (!all_satisfied(tuple_constraints(setup, tuple, mode))) return std::nullopt;
  return run_search(setup, tuple, mode).witness;
}

}  // namespace strichlab::exponents
