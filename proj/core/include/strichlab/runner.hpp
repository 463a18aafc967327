#pragma once

// Experiment orchestration: estimate-ratio sweeps, region exports, neighbourhood
// verification, decay fits and the potential iteration, all driven by one JSON
// config document.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "strichlab/decomp.hpp"
#include "strichlab/error.hpp"
#include "strichlab/exponents.hpp"
#include "strichlab/mixednorm.hpp"
#include "strichlab/spectral.hpp"

namespace strichlab::runner {

enum class DataFamily { gaussian, annulus, knapp, random_bandlimited };

/// How the periodic box follows the frequency scale in a sweep: `fixed` keeps
/// one box for every N, `covariant` uses L / N so all runs share lattice units.
enum class BoxScaling { fixed, covariant };

/// Left side of the inhomogeneous estimate: the square-function Z^s_{p,q} form
/// or L_t^q of the Besov norm.
enum class EstimateNorm { z_spq, besov_mixed };

std::string_view to_string(DataFamily v);
std::string_view to_string(BoxScaling v);
std::string_view to_string(EstimateNorm v);
DataFamily parse_data_family(std::string_view text);
BoxScaling parse_box_scaling(std::string_view text);
EstimateNorm parse_estimate_norm(std::string_view text);

struct GridConfig {
  int n = 2;
  int m = 256;
  double L = 64.0;
};

struct TimeWindow {
  double t0 = 0.0;
  /// Window length at N = 1; a sweep at scale N uses duration / N^a.
  double duration = 1.0;
  int samples = 33;
};

struct PotentialConfig {
  double amplitude = 0.05;
  double width = 2.0;
  /// Angular regularity exponent applied to V (n = 2 only).
  double angular_alpha = 0.0;
  int windows = 1;
  int max_iter = 20;
  double tol = 1e-10;
};

struct RegionConfig {
  double inv_q = 0.25;
  double inv_qt = 0.25;
  double s = 0.0;
  bool solve_s = true;
  int resolution = 64;
};

struct CorollaryConfig {
  double epsilon = 0.01;
  double delta_step = 0.01;
  double a_step = 0.005;
};

struct DecayConfig {
  double t_min = 10.0;
  double t_max = 100.0;
  int samples = 10;
  /// Use the tensor-product path (Gaussian data, a = 2 only).
  bool separable = false;
  /// Frequency localization applied to the data before the fit (0 = none).
  double localize_N = 0.0;
};

struct ExperimentConfig {
  /// check | search | region | corollary | decay | homogeneous | inhomogeneous
  /// | knapp | picard | whitney | atoms | lemmas
  std::string experiment = "homogeneous";
  exponents::DispersionSetup setup{2.0, 2};
  /// Tuples as (inv_q, inv_p, inv_qt, inv_pt, s); homogeneous runs use q, p only.
  std::vector<exponents::ExponentTuple> tuples;
  exponents::Mode mode = exponents::Mode::nonsharp;
  GridConfig grid;
  TimeWindow window;
  std::vector<double> N = {1.0};
  std::vector<double> ecc = {1.0};
  DataFamily data = DataFamily::gaussian;
  std::uint64_t seed = 1;
  BoxScaling box_scaling = BoxScaling::fixed;
  EstimateNorm estimate_norm = EstimateNorm::z_spq;
  mixednorm::RangeSpace range = mixednorm::RangeSpace::lebesgue;
  /// Diagnostics above these thresholds invalidate a report row.
  double max_boundary_mass = 1e-6;
  double max_nyquist_mass = 1e-6;
  RegionConfig region;
  CorollaryConfig corollary;
  DecayConfig decay;
  PotentialConfig potential;
  /// Whitney / atom / lemma parameters.
  double T = 1.0;
  int levels = 4;
  int trials = 1000;
  double atom_p = 2.0;
  std::string output;
};

/// Parses a JSON document; missing keys keep their defaults. Throws
/// InvalidArgument on malformed input or invalid parameters.
ExperimentConfig parse_config(const std::string& json_text);
std::string dump_config(const ExperimentConfig& config);
/// Cross-field validation (dispersion window, grid, dyadic scales, ...).
void validate(const ExperimentConfig& config);

struct RatioRow {
  double parameter = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double boundary_mass = 0.0;
  double nyquist_mass = 0.0;
  bool valid = true;
};

struct RatioReport {
  std::string experiment;
  std::string parameter_name;
  std::vector<RatioRow> rows;

  /// max / min ratio over valid rows (0 if fewer than one valid row).
  [[nodiscard]] double spread() const;
  [[nodiscard]] bool all_valid() const;
};

/// Raised when a tuple fails the exponents check and the run was not forced.
class RejectedTuple : public Error {
 public:
  using Error::Error;
};

RatioReport run_estimate_sweep(const ExperimentConfig& config, bool force = false);

std::string ratio_csv(const RatioReport& report);

struct RegionRun {
  exponents::RegionMask mask;
  std::optional<exponents::ApplicationVertices> vertices;
  std::string csv;
  /// Metadata document (setup, feasible counts, vertices).
  std::string metadata_json;
};
RegionRun run_region(const ExperimentConfig& config);

struct PicardReport {
  std::vector<double> residuals;
  double contraction_factor = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  double fixed_point_residual = 0.0;
  /// y_norm and besov_z_norm of the solution at the first and last node.
  double y_norm_start = 0.0, y_norm_end = 0.0;
  double besov_start = 0.0, besov_end = 0.0;
  /// Per-window results when the window is split.
  std::vector<double> window_factors;
  std::string json;
};
PicardReport run_picard(const ExperimentConfig& config);

struct DecayReport {
  spectral::DecayFit fit;
  double expected_slope = 0.0;
  /// Slope of the closed-form Gaussian amplitude on the same times (a = 2).
  std::optional<double> oracle_slope;
  std::string csv;
};
DecayReport run_decay(const ExperimentConfig& config);

std::string corollary_json(const exponents::CorollaryResult& r, int n, double epsilon);
std::string verdict_json(const exponents::AdmissibilityVerdict& v, exponents::Mode mode);
std::string atoms_json(const decomp::AtomicDecomposition& d, const decomp::AtomCheck& check,
                       double f_norm);
std::string lemmas_json(const decomp::SequenceLemmaReport& r);

/// Data for sweeps: the profile evaluated at scale N on the grid, i.e.
/// P_N[g(N .)] for the radial families and the Knapp field for `knapp`.
spectral::Field make_data(const ExperimentConfig& config, const spectral::Grid& grid, double N,
                          double ecc);

}  // namespace strichlab::runner
