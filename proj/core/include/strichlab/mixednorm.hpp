#pragma once

// Space-time mixed norms, norms on spheres (radial L^p of angular L^2),
// Besov-like Z norms, Sobolev norms, the angular regularity weight and the
// l^1-over-scales norm used for the potential iteration.

#include <optional>
#include <string_view>
#include <vector>

#include "strichlab/spectral.hpp"

namespace strichlab::mixednorm {

using spectral::CutoffProfile;
using spectral::Field;
using spectral::Grid;
using spectral::TimeSlab;

struct NormSpec {
  double inv_q = 0.5;
  double inv_p = 0.5;
  /// Angular integrability used on spheres; only 2 is realized.
  double angular_exponent = 2.0;
  std::optional<double> s;
};

/// Throws InvalidArgument unless the reciprocals lie in [0, 1].
void validate(const NormSpec& spec);

/// (sum |f|^p h^n)^{1/p}; inv_p = 0 gives the grid maximum.
double lp_norm(const Field& u, double inv_p);
/// Product of the factor norms.
double lp_norm(const spectral::ProductField& u, double inv_p);

/// Combines per-node values g(t_k) into (trapezoid int g^q dt)^{1/q}, or the
/// maximum when inv_q = 0. A single node is treated as a point mass of weight dt.
double time_norm(const std::vector<double>& values, double dt, double inv_q);

/// L_t^q L_x^p over the slab's time window.
double mixed_norm(const TimeSlab& slab, const NormSpec& spec);

// Polar resampling -------------------------------------------------------------

struct PolarOptions {
  /// Gauss-Legendre nodes per radial panel of one grid spacing.
  int radial_nodes_per_cell = 4;
  /// Outer radius as a fraction of the box side.
  double radius_fraction = 0.45;
  /// n = 2: points on the circle (0 means 4m). n = 3: latitude nodes (0 means m),
  /// longitude uses twice as many.
  int angular_nodes = 0;
};

/// Quadrature on the ball of radius radius_fraction * L in polar coordinates,
/// with samples interpolated from the Cartesian grid by a 6-point tensor
/// Lagrange stencil per axis.
class PolarResampling {
 public:
  PolarResampling(const Grid& grid, const PolarOptions& options = {});

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& radii() const { return radii_; }
  /// Weights for int_0^R g(r) r^{n-1} dr.
  [[nodiscard]] const std::vector<double>& radial_weights() const { return radial_weights_; }
  /// Unit vectors on the sphere, three components each.
  [[nodiscard]] const std::vector<spectral::Point>& directions() const { return directions_; }
  [[nodiscard]] const std::vector<double>& angular_weights() const { return angular_weights_; }

  /// Values of u at every (radius, direction) pair, radius-major.
  [[nodiscard]] std::vector<spectral::cplx> resample(const Field& u) const;
  /// (int_{S^{n-1}} |u(r w)|^2 dw)^{1/2} for every radial node.
  [[nodiscard]] std::vector<double> angular_l2(const Field& u) const;

 private:
  Grid grid_;
  std::vector<double> radii_;
  std::vector<double> radial_weights_;
  std::vector<spectral::Point> directions_;
  std::vector<double> angular_weights_;
};

/// Interpolates u at an arbitrary point with the periodic 6-point stencil.
spectral::cplx interpolate(const Field& u, const spectral::Point& x);

/// ||u||_{L_r^p(r^{n-1}dr) L_w^2}.
double spherical_norm(const Field& u, double inv_p, const PolarResampling& polar);
/// L_t^q of spherical_norm. Requires n in {2, 3}.
double spherical_mixed_norm(const TimeSlab& slab, const NormSpec& spec,
                            const PolarResampling& polar);

/// Realization of the range space Z_p.
enum class RangeSpace { lebesgue, spherical };
std::string_view to_string(RangeSpace space);
RangeSpace parse_range_space(std::string_view text);

struct ZContext {
  RangeSpace space = RangeSpace::lebesgue;
  /// Required for RangeSpace::spherical.
  const PolarResampling* polar = nullptr;
  CutoffProfile profile{};
};

double z_norm(const Field& u, double inv_p, const ZContext& ctx);
double z_mixed_norm(const TimeSlab& slab, double inv_q, double inv_p, const ZContext& ctx);

/// (sum_N N^{2s} ||P_N u||_{Z_p}^2)^{1/2} over the grid's dyadic window.
double besov_z_norm(const Field& u, double s, double inv_p, const ZContext& ctx = {});
/// (sum_N N^{2s} ||P_N F||_{L_t^q Z_p}^2)^{1/2}.
double z_spq_norm(const TimeSlab& slab, double s, double inv_p, double inv_q,
                  const ZContext& ctx = {});
/// Mixed norm L_t^q of the Besov norm taken at each time.
double besov_mixed_norm(const TimeSlab& slab, double s, double inv_p, double inv_q,
                        const ZContext& ctx = {});

/// ||D^s u||_{L^2} (homogeneous) or ||(1 - Delta)^{s/2} u||_{L^2}.
double sobolev_norm(const Field& u, double s, bool homogeneous);

/// Multiplies the angular Fourier mode k of u by (1 + k^2)^{alpha/2} on every
/// circle inside the resampling ball; samples outside are left unchanged.
/// Only n = 2 is supported.
Field angular_weight(const Field& u, double alpha);

/// sum_N ||P_N F||_{L_t^q L_r^p L_w^2}.
double y_norm(const TimeSlab& slab, double inv_q, double inv_p, const PolarResampling& polar,
              const CutoffProfile& profile = {});

/// Range of sum_N chi(r/N)^2 over r > 0, measured on a fine logarithmic grid.
struct OverlapBounds {
  double lower = 0.0;
  double upper = 0.0;
};
OverlapBounds overlap_bounds(const CutoffProfile& profile = {});

/// Spatial Hoelder partner: 1/p' = 1 - 1/p.
inline double dual(double inv) { return 1.0 - inv; }

}  // namespace strichlab::mixednorm
