// strichlab: command line front end for the runner.
//
//   strichlab admissible check|search|region|corollary
//   strichlab simulate decay|homogeneous|inhomogeneous|knapp|picard
//   strichlab decomp whitney|atoms|lemmas
//
// Exit codes: 0 all checks passed, 1 feasibility or estimate failure, 2 invalid input.

#include <cmath>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "strichlab/decomp.hpp"
#include "strichlab/io.hpp"
#include "strichlab/random.hpp"
#include "strichlab/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace strichlab;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInvalid = 2;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool force = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Config from --config (or defaults), with the experiment id forced to the
// subcommand and --seed applied on top.
runner::ExperimentConfig load(const Options& opt, const std::string& experiment) {
  json doc = json::object();
  if (!opt.config_path.empty()) {
    try {
      doc = json::parse(read_file(opt.config_path));
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
    if (doc.contains("experiment") && doc["experiment"] != experiment)
      throw InvalidArgument("config is for experiment '" + doc["experiment"].dump() +
                            "', not '" + experiment + "'");
  }
  doc["experiment"] = experiment;
  if (opt.seed) doc["seed"] = *opt.seed;
  return runner::parse_config(doc.dump());
}

fs::path output_path(const Options& opt, const runner::ExperimentConfig& c, const std::string& name) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  return dir / (c.output.empty() ? name : c.output);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << text;
  std::cout << "wrote " << path.string() << '\n';
}

std::string fmt_num(double v) { return io::format_number(v); }

// admissible ------------------------------------------------------------------

int cmd_check(const Options& opt) {
  const auto c = load(opt, "check");
  json out = json::array();
  bool all = true;
  for (const auto& t : c.tuples) {
    const auto v = exponents::check(c.setup, t, c.mode);
    all = all && v.feasible;
    out.push_back(json::parse(runner::verdict_json(v, c.mode)));
    std::cout << (v.feasible ? "feasible" : "infeasible") << "  1/q=" << fmt_num(t.inv_q)
              << " 1/p=" << fmt_num(t.inv_p) << " 1/q~=" << fmt_num(t.inv_qt)
              << " 1/p~=" << fmt_num(t.inv_pt) << " s=" << fmt_num(t.s) << '\n';
    for (const auto& viol : v.violations)
      std::cout << "  violated " << viol.id << ": " << fmt_num(viol.lhs) << " vs " << fmt_num(viol.rhs) << '\n';
  }
  write_text(output_path(opt, c, "check.json"), out.dump(2) + "\n");
  return all ? kPass : kFail;
}

int cmd_search(const Options& opt) {
  const auto c = load(opt, "search");
  json out = json::array();
  bool all = true;
  for (const auto& t : c.tuples) {
    const auto w = exponents::sigma_feasibility_search(c.setup, t, c.mode);
    json row = {{"inv_q", t.inv_q}, {"inv_p", t.inv_p}, {"inv_qt", t.inv_qt}, {"inv_pt", t.inv_pt},
                {"s", t.s}, {"mode", exponents::to_string(c.mode)}, {"found", w.has_value()}};
    if (w) {
      row["witness"] = {{"sigma1", w->sigma1}, {"sigma2", w->sigma2}, {"mu", w->mu}, {"theta", w->theta}};
      std::cout << "witness sigma1=" << fmt_num(w->sigma1) << " sigma2=" << fmt_num(w->sigma2)
                << " mu=" << fmt_num(w->mu) << '\n';
    } else {
      all = false;
      std::cout << "no witness\n";
    }
    out.push_back(row);
  }
  write_text(output_path(opt, c, "search.json"), out.dump(2) + "\n");
  return all ? kPass : kFail;
}

int cmd_region(const Options& opt) {
  const auto c = load(opt, "region");
  const auto run = runner::run_region(c);
  const fs::path csv = output_path(opt, c, "region.csv");
  write_text(csv, run.csv);
  fs::path meta = csv;
  meta.replace_extension(".json");
  write_text(meta, run.metadata_json);
  int feasible = 0;
  for (const auto& p : run.mask.points) feasible += (p.code & exponents::kNonsharpBit) ? 1 : 0;
  std::cout << "nonsharp feasible points: " << feasible << " of " << run.mask.points.size() << '\n';
  return kPass;
}

int cmd_corollary(const Options& opt) {
  const auto c = load(opt, "corollary");
  exponents::CorollarySearchOptions o;
  o.delta_step = c.corollary.delta_step;
  o.a_step = c.corollary.a_step;
  const auto r = exponents::corollary_delta_search(c.setup.n, c.corollary.epsilon, o);
  bool revalidated = true;
  for (const auto& w : r.witnesses) {
    const auto t = exponents::corollary_tuple(c.setup.n, w.a, w.q);
    revalidated = revalidated && exponents::check_global_nonsharp({w.a, c.setup.n}, t).feasible;
  }
  write_text(output_path(opt, c, "corollary.json"), runner::corollary_json(r, c.setup.n, c.corollary.epsilon));
  std::cout << "delta=" << fmt_num(r.delta) << " witnesses=" << r.witnesses.size()
            << (revalidated ? "" : " (some witnesses fail re-validation)") << '\n';
  return r.delta > 0.0 && revalidated ? kPass : kFail;
}

// simulate --------------------------------------------------------------------

int cmd_decay(const Options& opt) {
  const auto c = load(opt, "decay");
  const auto r = runner::run_decay(c);
  write_text(output_path(opt, c, "decay.csv"), r.csv);
  // a = 2 carries an exact oracle, other orders only the frequency-localized rate.
  const double tol = c.setup.a == 2.0 ? 0.02 : 0.10;
  const double rel = std::abs(r.fit.slope / r.expected_slope - 1.0);
  std::cout << "slope=" << fmt_num(r.fit.slope) << " expected=" << fmt_num(r.expected_slope);
  if (r.oracle_slope) std::cout << " oracle=" << fmt_num(*r.oracle_slope);
  std::cout << " boundary_mass=" << fmt_num(r.fit.boundary_mass) << '\n';
  return rel <= tol ? kPass : kFail;
}

int cmd_sweep(const Options& opt, const std::string& experiment) {
  const auto c = load(opt, experiment);
  runner::RatioReport rep;
  try {
    rep = runner::run_estimate_sweep(c, opt.force);
  } catch (const runner::RejectedTuple& e) {
    std::cerr << "rejected: " << e.what() << " (use --force to run anyway)\n";
    return kFail;
  }
  write_text(output_path(opt, c, experiment + ".csv"), runner::ratio_csv(rep));
  std::cout << "spread=" << fmt_num(rep.spread());
  if (rep.rows.size() > 1 && rep.rows.front().ratio > 0.0)
    std::cout << " last/first=" << fmt_num(rep.rows.back().ratio / rep.rows.front().ratio);
  std::cout << '\n';
  if (!rep.all_valid()) {
    std::cerr << "grid diagnostics over threshold in:";
    for (const auto& r : rep.rows)
      if (!r.valid)
        std::cerr << ' ' << rep.parameter_name << '=' << fmt_num(r.parameter) << " (boundary "
                  << fmt_num(r.boundary_mass) << ", nyquist " << fmt_num(r.nyquist_mass) << ')';
    std::cerr << '\n';
    return kFail;
  }
  return kPass;
}

int cmd_picard(const Options& opt) {
  const auto c = load(opt, "picard");
  const auto r = runner::run_picard(c);
  write_text(output_path(opt, c, "picard.json"), r.json);
  std::cout << "iterations=" << r.iterations << " factor=" << fmt_num(r.contraction_factor)
            << " residual=" << fmt_num(r.fixed_point_residual) << (r.diverged ? " DIVERGED" : "") << '\n';
  return r.converged && !r.diverged ? kPass : kFail;
}

// decomp ----------------------------------------------------------------------

spectral::Field random_field(const spectral::Grid& g, Rng& rng) {
  std::vector<std::array<double, 5>> waves(6);
  for (auto& w : waves)
    for (double& x : w) x = rng.uniform(-1.0, 1.0);
  const double width = 0.1 * g.L;
  return spectral::sample(g, [&](const spectral::Point& x) {
    double r2 = 0.0;
    for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
    spectral::cplx v = 0.0;
    for (const auto& w : waves) {
      double phase = 0.0;
      for (int d = 0; d < g.n; ++d) phase += 2.0 * w[d] * x[d];
      v += spectral::cplx(w[3], w[4]) * std::polar(1.0, phase);
    }
    return v * std::exp(-r2 / (2.0 * width * width));
  });
}

int cmd_whitney(const Options& opt) {
  const auto c = load(opt, "whitney");
  const std::int64_t cells = decomp::whitney_cells(c.levels);
  const double dt = c.T / static_cast<double>(cells);
  const auto squares = decomp::whitney_decompose(c.T, dt, c.levels);
  std::ostringstream csv;
  io::write_whitney_csv(csv, squares);
  write_text(output_path(opt, c, "whitney.csv"), csv.str());

  // Every ordered pair of distinct cells must be covered exactly once.
  std::vector<int> cover(static_cast<std::size_t>(cells * cells), 0);
  for (const auto& q : squares)
    for (auto i = q.I.first_cell; i < q.I.last_cell; ++i)
      for (auto j = q.J.first_cell; j < q.J.last_cell; ++j) ++cover[i * cells + j];
  bool tiled = true;
  for (std::int64_t i = 0; i < cells; ++i)
    for (std::int64_t j = 0; j < cells; ++j) tiled = tiled && cover[i * cells + j] == (j > i ? 1 : 0);

  // Bilinear exactness on one random slab when the grid is small enough.
  bool exact = true;
  if (cells <= 256 && std::pow(c.grid.m, c.grid.n) <= 65536.0) {
    Rng rng(c.seed);
    const auto g = spectral::make_grid(c.grid.n, c.grid.m, c.grid.L);
    spectral::TimeSlab F{0.0, dt, {}}, G{0.0, dt, {}};
    for (std::int64_t k = 0; k < cells; ++k) {
      F.fields.push_back(random_field(g, rng));
      G.fields.push_back(random_field(g, rng));
    }
    const auto B = decomp::bilinear_B(c.setup, F, G);
    const auto S = decomp::bilinear_sum(c.setup, F, G, squares);
    const double err = std::abs(B - S) / std::max(std::abs(B), 1e-300);
    exact = err <= 1e-10;
    std::cout << "bilinear relative error " << fmt_num(err) << '\n';
  }
  std::cout << squares.size() << " squares, tiling " << (tiled ? "exact" : "BROKEN") << '\n';
  return tiled && exact ? kPass : kFail;
}

int cmd_atoms(const Options& opt) {
  const auto c = load(opt, "atoms");
  const std::size_t cells = std::size_t{1} << c.levels;
  Rng rng(c.seed);
  std::vector<double> f(cells), mu(cells);
  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    f[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform(-4.0, 4.0);
    mu[i] = rng.uniform(0.5, 1.5);
    total += mu[i];
  }
  for (double& m : mu) m /= total;
  const auto d = decomp::atomic_decompose(f, mu, c.atom_p);
  const auto check = decomp::check_atoms(d, f, mu);
  const double fn = decomp::weighted_lp(f, mu, c.atom_p);
  write_text(output_path(opt, c, "atoms.json"), runner::atoms_json(d, check, fn));
  const double ratio = fn > 0.0 ? d.coefficient_norm() / fn : 1.0;
  std::cout << d.atoms.size() << " atoms, coefficient/function norm ratio " << fmt_num(ratio) << '\n';
  const bool ok = check.supports_disjoint && check.support_measure_ok && check.sup_bound_ok &&
                  check.reconstruction_error <= 1e-12 && ratio >= 0.25 && ratio <= 4.0;
  return ok ? kPass : kFail;
}

int cmd_lemmas(const Options& opt) {
  const auto c = load(opt, "lemmas");
  const auto r = decomp::verify_sequence_lemmas(c.trials, c.seed);
  write_text(output_path(opt, c, "lemmas.json"), runner::lemmas_json(r));
  std::cout << "holder violations " << r.holder_violations << ", family violations "
            << r.holder_family_violations << ", young violations " << r.young_violations << '\n';
  return r.passed() ? kPass : kFail;
}

const char* kColumns = R"(Outputs (written to --out, file name from the config's "output" when set):
  admissible check      check.json      verdict per tuple
  admissible search     search.json     sigma witness per tuple
  admissible region     region.csv      inv_p,inv_pt,local,nonsharp,sharp,mu,sigma1,sigma2
                        region.json     setup, feasible counts, application vertices
  admissible corollary  corollary.json  delta, witnesses, closed forms at a = 2
  simulate decay        decay.csv       t,sup_norm
  simulate homogeneous|inhomogeneous|knapp
                        <name>.csv      <N|ecc>,lhs,rhs,ratio,boundary_mass,nyquist_mass,valid
  simulate picard       picard.json     residual history, contraction factor, norms
  decomp whitney        whitney.csv     lambda,i_start,j_start
  decomp atoms          atoms.json      atoms with lambda, coefficient, support
  decomp lemmas         lemmas.json     violation counts and worst ratios
Exit codes: 0 all checks passed, 1 feasibility/estimate failure, 2 invalid input.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Strichartz estimate laboratory"};
  app.footer(kColumns);
  app.require_subcommand(1);
  Options opt;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_flag("--force", opt.force, "run sweeps on tuples the checker rejects");
    sub->footer(kColumns);
  };

  int (*action)(const Options&) = nullptr;
  std::string sweep;
  struct Entry {
    const char* group;
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Entry entries[] = {
      {"admissible", "check", "run the exponents checker on every tuple", cmd_check},
      {"admissible", "search", "search a sigma witness for every tuple", cmd_search},
      {"admissible", "region", "sample the feasible (1/p, 1/p~) region", cmd_region},
      {"admissible", "corollary", "neighbourhood search around a = 2", cmd_corollary},
      {"simulate", "decay", "fit the dispersive decay rate", cmd_decay},
      {"simulate", "homogeneous", "homogeneous estimate ratio sweep over N", nullptr},
      {"simulate", "inhomogeneous", "inhomogeneous estimate ratio sweep over N", nullptr},
      {"simulate", "knapp", "Knapp ratio sweep over eccentricity", nullptr},
      {"simulate", "picard", "Picard iteration with a potential", cmd_picard},
      {"decomp", "whitney", "Whitney squares and bilinear exactness", cmd_whitney},
      {"decomp", "atoms", "atomic decomposition of a random step function", cmd_atoms},
      {"decomp", "lemmas", "randomized sequence inequality checks", cmd_lemmas},
  };
  std::map<std::string, CLI::App*> groups;
  groups["admissible"] = app.add_subcommand("admissible", "exponent feasibility");
  groups["simulate"] = app.add_subcommand("simulate", "numerical experiments");
  groups["decomp"] = app.add_subcommand("decomp", "time decompositions and sequence lemmas");
  for (auto& [name, g] : groups) g->require_subcommand(1);
  for (const auto& e : entries) {
    CLI::App* sub = groups[e.group]->add_subcommand(e.name, e.help);
    add_globals(sub);
    sub->callback([&, e] {
      action = e.fn;
      if (e.fn == nullptr) sweep = e.name;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInvalid;
  }

  try {
    return action ? action(opt) : cmd_sweep(opt, sweep);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const UnsupportedSetup& e) {
    std::cerr << "unsupported setup: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}
