#pragma once

// Exponent admissibility for generalized inhomogeneous Strichartz estimates of
// the group exp(i t D^a) on R^n.
//
// All exponents are carried as reciprocals in [0, 1]; the value 0 encodes an
// infinite exponent exactly, so every inequality below is written on the
// reciprocal side and never touches infinity arithmetic.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace strichlab::exponents {

/// Dispersion order a (symbol |xi|^a) and spatial dimension n.
struct DispersionSetup {
  double a = 2.0;
  int n = 3;
};

/// Throws InvalidArgument unless a >= 1 (finite) and n >= 1.
void validate(const DispersionSetup& setup);

/// Classical decay rate sigma and the extended rate sigma' available under
/// spherical symmetry or spherical averaging.
struct DecayWindow {
  double sigma = 0.0;
  double sigma_ext = 0.0;
};

/// Throws UnsupportedSetup when the window (sigma, sigma') is empty (n = 1).
DecayWindow decay_parameters(const DispersionSetup& setup);

/// r = (a sigma - n) / 2, the derivative offset of the dispersive vertex.
double derivative_offset_r(const DispersionSetup& setup);

/// Radial instance needs n >= 2 (a > 1) or n >= 3 (a = 1).
bool radial_instance_valid(const DispersionSetup& setup);
/// Spherically averaged instance needs n >= 3.
bool averaged_instance_valid(const DispersionSetup& setup);

/// 1/exponent, mapping +inf to 0. Throws for exponents below 1.
double reciprocal(double exponent);

struct ExponentTuple {
  double inv_q = 0.0;
  double inv_p = 0.0;
  double inv_qt = 0.0;
  double inv_pt = 0.0;
  /// Half of the total derivative count; the estimate carries D^{-2s}.
  double s = 0.0;

  static ExponentTuple from_exponents(double q, double p, double qt, double pt, double s);
};

/// Throws InvalidArgument unless every reciprocal lies in [0, 1] and s is finite.
void validate(const ExponentTuple& tuple);

/// beta_a = 1/q + 1/q~ - (n/a)(1 - 1/p - 1/p~) - 2s/a.
double scaling_beta(const DispersionSetup& setup, const ExponentTuple& tuple);

/// The derivative parameter s for which scaling_beta vanishes.
double scaling_s(const DispersionSetup& setup, const ExponentTuple& tuple);

inline constexpr double kScalingTolerance = 1e-9;
inline constexpr double kStrictMargin = 1e-9;
inline constexpr double kClosedSlack = 1e-12;
inline constexpr int kSearchLevels = 3;
inline constexpr int kSearchPointsPerAxis = 33;
inline constexpr double kWindowInsetFraction = 1.0 / 1024.0;

struct HomogeneousPoint {
  double tau = 0.0;
  double s = 0.0;
};

/// Generalized homogeneous admissibility of (q, p): 1/q = tau (1/2 - 1/p) with
/// tau in the open window. Requires inv_q, inv_p in [0, 1/2].
std::optional<HomogeneousPoint> homogeneous_admissible(const DispersionSetup& setup, double inv_q,
                                                       double inv_p);

/// mu(sigma1, sigma2); empty when the denominator is not positive (theta would
/// leave (0, 1]).
std::optional<double> mu_value(const DispersionSetup& setup, const ExponentTuple& tuple,
                               double sigma1, double sigma2);

enum class Mode { local, nonsharp, sharp };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct SigmaPair {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

struct SigmaWitness {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double mu = 0.0;
  double theta = 0.0;
};

/// A violated constraint `lhs (<|<=) rhs`, evaluated on the reciprocal side.
struct Violation {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AdmissibilityVerdict {
  bool feasible = false;
  std::optional<SigmaWitness> witness;
  std::vector<Violation> violations;
};

/// One inequality of a system, `lhs < rhs` when strict, else `lhs <= rhs`.
struct Constraint {
  std::string_view id;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict = false;

  [[nodiscard]] double margin() const { return rhs - lhs; }
  [[nodiscard]] bool satisfied() const {
    return strict ? margin() > kStrictMargin : margin() >= -kClosedSlack;
  }
};

/// Constraints that do not depend on (sigma1, sigma2) for the given mode.
std::vector<Constraint> tuple_constraints(const DispersionSetup& setup, const ExponentTuple& tuple,
                                          Mode mode);

/// Constraints of the sigma-dependent system at a fixed pair (window membership
/// included).
std::vector<Constraint> sigma_constraints(const DispersionSetup& setup, const ExponentTuple& tuple,
                                          Mode mode, SigmaPair pair);

/// Evaluates the complete system of `mode` at a fixed pair.
AdmissibilityVerdict evaluate_witness(const DispersionSetup& setup, const ExponentTuple& tuple,
                                      Mode mode, SigmaPair pair);

AdmissibilityVerdict check_local(const DispersionSetup& setup, const ExponentTuple& tuple,
                                 std::optional<SigmaPair> pair = std::nullopt);
AdmissibilityVerdict check_global_nonsharp(const DispersionSetup& setup,
                                           const ExponentTuple& tuple);
AdmissibilityVerdict check_global_sharp(const DispersionSetup& setup, const ExponentTuple& tuple);
AdmissibilityVerdict check(const DispersionSetup& setup, const ExponentTuple& tuple, Mode mode);

/// Deterministic three-level coarse-to-fine grid search over the open window
/// squared. Returns the first pair (in scan order) satisfying the system of
/// `mode`, refining around the best-margin point when a level has none.
std::optional<SigmaWitness> sigma_feasibility_search(const DispersionSetup& setup,
                                                     const ExponentTuple& tuple, Mode mode);

// Region sampling ----------------------------------------------------------

enum RegionBits : std::uint8_t { kLocalBit = 1, kNonsharpBit = 2, kSharpBit = 4 };

struct RegionPoint {
  double inv_p = 0.0;
  double inv_pt = 0.0;
  double s = 0.0;
  std::uint8_t code = 0;
  /// The dispersive vertex (all spatial/time reciprocals zero, s = r): theta
  /// would vanish there, so it is reported as a boundary point, not feasible.
  bool dispersive_vertex = false;
  std::optional<SigmaWitness> witness;
};

struct RegionMask {
  int resolution = 0;
  double inv_q = 0.0;
  double inv_qt = 0.0;
  /// Row-major, inv_p varies slowest.
  std::vector<RegionPoint> points;

  [[nodiscard]] const RegionPoint& at(int i_p, int i_pt) const {
    return points[static_cast<std::size_t>(i_p) * resolution + i_pt];
  }
};

/// Samples (1/p, 1/p~) on a resolution x resolution grid of [0, 1/2]^2. When
/// `solve_s` is set the derivative parameter is recomputed from beta_a = 0 at
/// every point, otherwise `s` is used as given.
RegionMask region_sample(const DispersionSetup& setup, double inv_q, double inv_qt, double s,
                         int resolution, bool solve_s);

/// Vertices A, B, C, D of the application diagram in (1/p, 1/q) coordinates,
/// valid for 1 < a < 2.
struct ApplicationVertices {
  std::pair<double, double> A, B, C, D;
};
ApplicationVertices application_vertices(const DispersionSetup& setup);

// Neighbourhood search near a = 2 ----------------------------------------

struct CorollarySample {
  double a = 0.0;
  double q = 0.0;
  double qt = 0.0;
  SigmaWitness witness;
};

struct CorollaryResult {
  double delta = 0.0;
  std::vector<CorollarySample> witnesses;
  /// mu at a = 2 on the diagonal tuple, evaluated at the window midpoint.
  double mu_at_two = 0.0;
  double q_at_two = 0.0;
  /// Central difference of q(a) = 2(n+a)/n at a = 2.
  double dq_da = 0.0;
};

/// Diagonal tuple p = q, p~ = q~, s = 0 with 1/q + 1/q~ = n/(n+a).
ExponentTuple corollary_tuple(int n, double a, double q);

struct CorollarySearchOptions {
  double delta_step = 0.01;
  double delta_max = 1.0;
  double a_step = 0.005;
  /// Relative offsets of q around 2(n+a)/n, in units of epsilon.
  std::vector<double> q_offsets = {-1.0, -0.5, 0.0, 0.5, 1.0};
};

/// Largest delta on the grid k * delta_step such that every sampled a in
/// [2 - delta, 2) passes check_global_nonsharp for all q in the relative
/// neighbourhood of radius `epsilon` around 2(n+a)/n.
CorollaryResult corollary_delta_search(int n, double epsilon,
                                       const CorollarySearchOptions& options = {});

}  // namespace strichlab::exponents
