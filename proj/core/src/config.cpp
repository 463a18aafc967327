#include <cmath>
#include <set>

#include "json.hpp"
#include "strichlab/runner.hpp"

namespace strichlab::runner {

using nlohmann::json;

namespace {

const std::set<std::string> kExperiments = {
    "check",   "search",        "region", "corollary", "decay",  "homogeneous",
    "inhomogeneous", "knapp", "picard", "whitney",   "atoms", "lemmas"};

// Reads `key` into `out` when present; type mismatches surface as InvalidArgument.
template <typename T>
void read(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("config section '" + where + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw InvalidArgument("unknown config key '" + where + key + "'");
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  const auto it = j.find(key);
  return it == j.end() ? empty : *it;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view to_string(DataFamily v) {
  switch (v) {
    case DataFamily::gaussian: return "gaussian";
    case DataFamily::annulus: return "annulus";
    case DataFamily::knapp: return "knapp";
    case DataFamily::random_bandlimited: return "random_bandlimited";
  }
  return "gaussian";
}

std::string_view to_string(BoxScaling v) { return v == BoxScaling::fixed ? "fixed" : "covariant"; }

std::string_view to_string(EstimateNorm v) { return v == EstimateNorm::z_spq ? "z_spq" : "besov_mixed"; }

DataFamily parse_data_family(std::string_view t) {
  if (t == "gaussian") return DataFamily::gaussian;
  if (t == "annulus") return DataFamily::annulus;
  if (t == "knapp") return DataFamily::knapp;
  if (t == "random_bandlimited") return DataFamily::random_bandlimited;
  throw InvalidArgument("unknown data family '" + std::string(t) + "'");
}

BoxScaling parse_box_scaling(std::string_view t) {
  if (t == "fixed") return BoxScaling::fixed;
  if (t == "covariant") return BoxScaling::covariant;
  throw InvalidArgument("unknown box scaling '" + std::string(t) + "'");
}

EstimateNorm parse_estimate_norm(std::string_view t) {
  if (t == "z_spq") return EstimateNorm::z_spq;
  if (t == "besov_mixed") return EstimateNorm::besov_mixed;
  throw InvalidArgument("unknown estimate norm '" + std::string(t) + "'");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  reject_unknown(j,
                 {"experiment", "setup", "tuples", "mode", "grid", "window", "N", "ecc", "data", "seed",
                  "box_scaling", "estimate_norm", "range", "max_boundary_mass", "max_nyquist_mass", "region",
                  "corollary", "decay", "potential", "T", "levels", "trials", "atom_p", "output"},
                 "");

  ExperimentConfig c;
  read(j, "experiment", c.experiment);

  const json& setup = section(j, "setup");
  reject_unknown(setup, {"a", "n"}, "setup.");
  read(setup, "a", c.setup.a);
  read(setup, "n", c.setup.n);

  if (const auto it = j.find("tuples"); it != j.end()) {
    if (!it->is_array()) throw InvalidArgument("'tuples' must be an array");
    for (const auto& t : *it) {
      reject_unknown(t, {"inv_q", "inv_p", "inv_qt", "inv_pt", "s"}, "tuples[].");
      exponents::ExponentTuple e;
      read(t, "inv_q", e.inv_q);
      read(t, "inv_p", e.inv_p);
      read(t, "inv_qt", e.inv_qt);
      read(t, "inv_pt", e.inv_pt);
      read(t, "s", e.s);
      c.tuples.push_back(e);
    }
  }

  std::string text;
  if (j.contains("mode")) {
    read(j, "mode", text);
    c.mode = exponents::parse_mode(text);
  }

  const json& grid = section(j, "grid");
  reject_unknown(grid, {"m", "L"}, "grid.");
  read(grid, "m", c.grid.m);
  read(grid, "L", c.grid.L);
  c.grid.n = c.setup.n;

  const json& window = section(j, "window");
  reject_unknown(window, {"t0", "duration", "samples"}, "window.");
  read(window, "t0", c.window.t0);
  read(window, "duration", c.window.duration);
  read(window, "samples", c.window.samples);

  read(j, "N", c.N);
  read(j, "ecc", c.ecc);
  if (j.contains("data")) {
    read(j, "data", text);
    c.data = parse_data_family(text);
  }
  read(j, "seed", c.seed);
  if (j.contains("box_scaling")) {
    read(j, "box_scaling", text);
    c.box_scaling = parse_box_scaling(text);
  }
  if (j.contains("estimate_norm")) {
    read(j, "estimate_norm", text);
    c.estimate_norm = parse_estimate_norm(text);
  }
  if (j.contains("range")) {
    read(j, "range", text);
    c.range = mixednorm::parse_range_space(text);
  }
  read(j, "max_boundary_mass", c.max_boundary_mass);
  read(j, "max_nyquist_mass", c.max_nyquist_mass);

  const json& region = section(j, "region");
  reject_unknown(region, {"inv_q", "inv_qt", "s", "solve_s", "resolution"}, "region.");
  read(region, "inv_q", c.region.inv_q);
  read(region, "inv_qt", c.region.inv_qt);
  read(region, "s", c.region.s);
  read(region, "solve_s", c.region.solve_s);
  read(region, "resolution", c.region.resolution);

  const json& cor = section(j, "corollary");
  reject_unknown(cor, {"epsilon", "delta_step", "a_step"}, "corollary.");
  read(cor, "epsilon", c.corollary.epsilon);
  read(cor, "delta_step", c.corollary.delta_step);
  read(cor, "a_step", c.corollary.a_step);

  const json& decay = section(j, "decay");
  reject_unknown(decay, {"t_min", "t_max", "samples", "separable", "localize_N"}, "decay.");
  read(decay, "t_min", c.decay.t_min);
  read(decay, "t_max", c.decay.t_max);
  read(decay, "samples", c.decay.samples);
  read(decay, "separable", c.decay.separable);
  read(decay, "localize_N", c.decay.localize_N);

  const json& pot = section(j, "potential");
  reject_unknown(pot, {"amplitude", "width", "angular_alpha", "windows", "max_iter", "tol"}, "potential.");
  read(pot, "amplitude", c.potential.amplitude);
  read(pot, "width", c.potential.width);
  read(pot, "angular_alpha", c.potential.angular_alpha);
  read(pot, "windows", c.potential.windows);
  read(pot, "max_iter", c.potential.max_iter);
  read(pot, "tol", c.potential.tol);

  read(j, "T", c.T);
  read(j, "levels", c.levels);
  read(j, "trials", c.trials);
  read(j, "atom_p", c.atom_p);
  read(j, "output", c.output);

  validate(c);
  return c;
}

std::string dump_config(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["setup"] = {{"a", c.setup.a}, {"n", c.setup.n}};
  j["tuples"] = json::array();
  for (const auto& t : c.tuples)
    j["tuples"].push_back({{"inv_q", t.inv_q}, {"inv_p", t.inv_p}, {"inv_qt", t.inv_qt}, {"inv_pt", t.inv_pt}, {"s", t.s}});
  j["mode"] = std::string(exponents::to_string(c.mode));
  j["grid"] = {{"m", c.grid.m}, {"L", c.grid.L}};
  j["window"] = {{"t0", c.window.t0}, {"duration", c.window.duration}, {"samples", c.window.samples}};
  j["N"] = c.N;
  j["ecc"] = c.ecc;
  j["data"] = std::string(to_string(c.data));
  j["seed"] = c.seed;
  j["box_scaling"] = std::string(to_string(c.box_scaling));
  j["estimate_norm"] = std::string(to_string(c.estimate_norm));
  j["range"] = std::string(mixednorm::to_string(c.range));
  j["max_boundary_mass"] = c.max_boundary_mass;
  j["max_nyquist_mass"] = c.max_nyquist_mass;
  j["region"] = {{"inv_q", c.region.inv_q},
                 {"inv_qt", c.region.inv_qt},
                 {"s", c.region.s},
                 {"solve_s", c.region.solve_s},
                 {"resolution", c.region.resolution}};
  j["corollary"] = {{"epsilon", c.corollary.epsilon}, {"delta_step", c.corollary.delta_step}, {"a_step", c.corollary.a_step}};
  j["decay"] = {{"t_min", c.decay.t_min},
                {"t_max", c.decay.t_max},
                {"samples", c.decay.samples},
                {"separable", c.decay.separable},
                {"localize_N", c.decay.localize_N}};
  j["potential"] = {{"amplitude", c.potential.amplitude}, {"width", c.potential.width},
                    {"angular_alpha", c.potential.angular_alpha}, {"windows", c.potential.windows},
                    {"max_iter", c.potential.max_iter}, {"tol", c.potential.tol}};
  j["T"] = c.T;
  j["levels"] = c.levels;
  j["trials"] = c.trials;
  j["atom_p"] = c.atom_p;
  j["output"] = c.output;
  return j.dump(2);
}

void validate(const ExperimentConfig& c) {
  if (!kExperiments.count(c.experiment)) throw InvalidArgument("unknown experiment '" + c.experiment + "'");
  exponents::validate(c.setup);
  if (c.grid.n != c.setup.n) throw InvalidArgument("grid dimension differs from the setup dimension");
  spectral::make_grid(c.grid.n, c.grid.m, c.grid.L);
  for (const auto& t : c.tuples) exponents::validate(t);

  const bool needs_window = c.experiment == "region" || c.experiment == "check" || c.experiment == "search" ||
                            c.experiment == "homogeneous" || c.experiment == "inhomogeneous" ||
                            c.experiment == "knapp";
  // Throws UnsupportedSetup when the decay window is empty.
  if (needs_window) exponents::decay_parameters(c.setup);
  if ((c.experiment == "check" || c.experiment == "search" || c.experiment == "homogeneous" ||
       c.experiment == "inhomogeneous" || c.experiment == "knapp") &&
      c.tuples.empty())
    throw InvalidArgument("experiment '" + c.experiment + "' needs at least one exponent tuple");

  if (!(finite(c.window.t0) && c.window.t0 >= 0.0)) throw InvalidArgument("window start must be >= 0");
  if (!(finite(c.window.duration) && c.window.duration > 0.0)) throw InvalidArgument("window duration must be positive");
  if (c.window.samples < 2) throw InvalidArgument("window needs at least two samples");
  if (c.N.empty() || c.ecc.empty()) throw InvalidArgument("N and ecc lists must be nonempty");
  for (double N : c.N)
    if (!spectral::is_dyadic(N)) throw InvalidArgument("frequency scales must be powers of two");
  for (double e : c.ecc)
    if (!(finite(e) && e >= 1.0)) throw InvalidArgument("eccentricities must be >= 1");
  if (!(c.max_boundary_mass >= 0.0) || !(c.max_nyquist_mass >= 0.0))
    throw InvalidArgument("diagnostic thresholds must be nonnegative");

  if (c.region.resolution < 8 || c.region.resolution > 4096) throw InvalidArgument("region resolution must lie in [8, 4096]");
  if (!(c.region.inv_q >= 0.0 && c.region.inv_q <= 1.0 && c.region.inv_qt >= 0.0 && c.region.inv_qt <= 1.0))
    throw InvalidArgument("region reciprocals must lie in [0, 1]");
  if (!finite(c.region.s)) throw InvalidArgument("region s must be finite");

  if (!(finite(c.corollary.epsilon) && c.corollary.epsilon >= 0.0 && c.corollary.epsilon < 1.0))
    throw InvalidArgument("corollary epsilon must lie in [0, 1)");
  if (!(c.corollary.delta_step > 0.0) || !(c.corollary.a_step > 0.0))
    throw InvalidArgument("corollary steps must be positive");

  if (!(c.decay.t_min > 0.0 && c.decay.t_max > c.decay.t_min && finite(c.decay.t_max)))
    throw InvalidArgument("decay times must satisfy 0 < t_min < t_max");
  if (c.decay.samples < 2) throw InvalidArgument("decay fit needs at least two samples");
  if (c.decay.separable && c.setup.a != 2.0) throw InvalidArgument("the separable path needs a = 2");
  if (c.decay.separable && c.decay.localize_N != 0.0)
    throw InvalidArgument("the separable path cannot apply a radial projector");
  if (c.decay.localize_N != 0.0 && !spectral::is_dyadic(c.decay.localize_N))
    throw InvalidArgument("decay localization scale must be a power of two");

  const auto& p = c.potential;
  if (!finite(p.amplitude) || !(p.width > 0.0) || !finite(p.width)) throw InvalidArgument("potential needs finite amplitude and positive width");
  if (!finite(p.angular_alpha) || p.angular_alpha < 0.0) throw InvalidArgument("angular exponent must be >= 0");
  if (p.angular_alpha != 0.0 && c.setup.n != 2) throw InvalidArgument("angular weights need n = 2");
  if (p.windows < 1 || p.max_iter < 1 || !(p.tol > 0.0)) throw InvalidArgument("invalid Picard iteration parameters");

  if (!(finite(c.T) && c.T > 0.0)) throw InvalidArgument("T must be positive");
  if (c.levels < 0 || c.levels > 24) throw InvalidArgument("levels must lie in [0, 24]");
  if (c.trials < 1) throw InvalidArgument("trials must be positive");
  if (!(finite(c.atom_p) && c.atom_p >= 1.0)) throw InvalidArgument("atom exponent must be >= 1");
}

}  // namespace strichlab::runner
