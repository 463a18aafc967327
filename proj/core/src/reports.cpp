#include <cmath>

#include "json.hpp"
#include "strichlab/runner.hpp"

namespace strichlab::runner {

using nlohmann::json;

namespace {

json witness_json(const exponents::SigmaWitness& w) {
  return {{"sigma1", w.sigma1}, {"sigma2", w.sigma2}, {"mu", w.mu}, {"theta", w.theta}};
}

// JSON has no infinity; large-but-finite values pass through unchanged.
json number(double v) { return std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "-inf"); }

}  // namespace

std::string corollary_json(const exponents::CorollaryResult& r, int n, double epsilon) {
  json j;
  j["n"] = n;
  j["epsilon"] = epsilon;
  j["delta"] = r.delta;
  j["mu_at_two"] = r.mu_at_two;
  j["q_at_two"] = r.q_at_two;
  j["dq_da"] = r.dq_da;
  j["witnesses"] = json::array();
  for (const auto& w : r.witnesses) {
    json e = witness_json(w.witness);
    e["a"] = w.a;
    e["q"] = w.q;
    e["qt"] = w.qt;
    j["witnesses"].push_back(e);
  }
  return j.dump(2);
}

std::string verdict_json(const exponents::AdmissibilityVerdict& v, exponents::Mode mode) {
  json j;
  j["mode"] = std::string(exponents::to_string(mode));
  j["feasible"] = v.feasible;
  j["witness"] = v.witness ? witness_json(*v.witness) : json(nullptr);
  j["violations"] = json::array();
  for (const auto& x : v.violations)
    j["violations"].push_back({{"id", x.id}, {"lhs", number(x.lhs)}, {"rhs", number(x.rhs)}});
  return j.dump(2);
}

std::string atoms_json(const decomp::AtomicDecomposition& d, const decomp::AtomCheck& check, double f_norm) {
  json j;
  j["p"] = 1.0 / d.inv_p;
  j["cells"] = d.cells;
  j["coefficient_norm"] = d.coefficient_norm();
  j["f_norm"] = f_norm;
  j["norm_ratio"] = f_norm > 0.0 ? d.coefficient_norm() / f_norm : 0.0;
  j["supports_disjoint"] = check.supports_disjoint;
  j["support_measure_ok"] = check.support_measure_ok;
  j["sup_bound_ok"] = check.sup_bound_ok;
  j["reconstruction_error"] = check.reconstruction_error;
  j["atoms"] = json::array();
  for (const auto& a : d.atoms) {
    double peak = 0.0;
    for (double v : a.values) peak = std::max(peak, std::abs(v));
    j["atoms"].push_back({{"lambda", a.lambda},
                          {"coefficient", a.coefficient},
                          {"support", a.support},
                          {"sup", peak}});
  }
  return j.dump(2);
}

std::string lemmas_json(const decomp::SequenceLemmaReport& r) {
  json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  j["holder"] = {{"max_ratio", r.holder_max_ratio}, {"violations", r.holder_violations}};
  j["holder_family"] = {{"constant", 3}, {"max_ratio", r.holder_family_max_ratio}, {"violations", r.holder_family_violations}};
  j["young"] = {{"max_ratio", r.young_max_ratio}, {"violations", r.young_violations}};
  j["max_slack"] = number(r.max_slack);
  j["slack_tolerance"] = decomp::kLemmaSlack;
  return j.dump(2);
}

}  // namespace strichlab::runner
