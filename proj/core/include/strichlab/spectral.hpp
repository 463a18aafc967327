#pragma once

// Periodic-grid realization of exp(i t D^a), Littlewood-Paley projectors,
// the Duhamel integral, Knapp data and the Picard iteration for
// i u_t + D^a u + V u = 0 written as u = e^{itD^a}u0 - i \int e^{i(t-s)D^a} V u.
//
// Fourier convention: fhat(xi) = \int f(x) e^{-i x.xi} dx. Samples sit at
// x_j = -L/2 + j h, h = L/m, frequencies on (2 pi / L) Z^n.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "strichlab/exponents.hpp"

namespace strichlab::spectral {

using cplx = std::complex<double>;
using exponents::DispersionSetup;

struct Grid {
  int n = 1;
  int m = 8;
  double L = 1.0;

  [[nodiscard]] double spacing() const { return L / m; }
  [[nodiscard]] std::size_t size() const;
  /// 2 pi / L.
  [[nodiscard]] double fundamental() const;
  /// pi / h, the largest resolvable |xi_j| per axis.
  [[nodiscard]] double nyquist() const;
  /// h^n.
  [[nodiscard]] double cell_volume() const;
  [[nodiscard]] double coordinate(int j) const { return -0.5 * L + j * spacing(); }
  /// Signed lattice frequency of index k on one axis; k = m/2 maps to -m/2.
  [[nodiscard]] double wavenumber(int k) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

Grid make_grid(int n, int m, double L);

/// Complex samples in row-major order (last axis fastest).
struct Field {
  Grid grid;
  std::vector<cplx> samples;
};

/// Continuous-convention transform sampled on the frequency lattice, stored in
/// FFT index order.
struct Spectrum {
  Grid grid;
  std::vector<cplx> coeffs;
};

using Point = std::array<double, 3>;

Field zeros(const Grid& grid);
Field sample(const Grid& grid, const std::function<cplx(const Point&)>& f);
Point position(const Grid& grid, std::size_t index);
Point frequency(const Grid& grid, std::size_t index);

Spectrum fourier_transform(const Field& u);
Field inverse_fourier_transform(const Spectrum& spec);

/// Applies a multiplier depending on the frequency vector.
Field apply_multiplier(const Field& u, const std::function<cplx(const Point&)>& symbol);
/// Applies a radial multiplier m(|xi|).
Field apply_radial_multiplier(const Field& u, const std::function<cplx(double)>& symbol);

/// <f, g> = \int f conj(g) dx as a grid sum.
cplx inner_product(const Field& f, const Field& g);
double l2_norm(const Field& u);
double sup_norm(const Field& u);

Field operator+(const Field& f, const Field& g);
Field operator-(const Field& f, const Field& g);
Field operator*(cplx c, const Field& f);
/// Pointwise product.
Field pointwise(const Field& f, const Field& g);

/// Fraction of L^2 mass with some |x_j| >= (1/2 - width_fraction) L; a proxy
/// for wrap-around contamination of the periodic surrogate.
double boundary_mass(const Field& u, double width_fraction = 0.05);
/// Fraction of spectral L^2 mass with some |xi_j| >= (1 - width_fraction) pi/h.
double nyquist_mass(const Field& u, double width_fraction = 0.1);

// Propagation ----------------------------------------------------------------

double dispersion_symbol(const DispersionSetup& setup, double xi_norm);

/// e^{i t D^a} u, exact at lattice frequencies.
Field propagate(const DispersionSetup& setup, double t, const Field& u);

/// Tensor product u(x) = prod_j f_j(x_j) of one-dimensional factors on a common
/// 1-d grid. For a = 2 the propagator factorizes, which makes n = 3 decay runs
/// on large boxes cheap.
struct ProductField {
  std::vector<Field> factors;
  [[nodiscard]] int dimension() const { return static_cast<int>(factors.size()); }
  [[nodiscard]] Field expand() const;
};

/// Only defined for a = 2; throws InvalidArgument otherwise.
ProductField propagate(const DispersionSetup& setup, double t, const ProductField& u);
double sup_norm(const ProductField& u);

// Littlewood-Paley ------------------------------------------------------------

/// Smooth radial cutoff: psi = 1 on [0, 1], 0 on [2, inf), nonincreasing,
/// built from exp(-1/x).
class CutoffProfile {
 public:
  [[nodiscard]] double psi(double r) const;
  /// chi(r) = psi(r) - psi(2r), supported in [1/2, 2].
  [[nodiscard]] double chi(double r) const;
  /// Sum of the three neighbouring bumps, equal to 1 on [1/2, 2].
  [[nodiscard]] double chi_fattened(double r) const;
};

/// Throws unless N is an integer power of two (negative exponents allowed).
void require_dyadic(double N);
bool is_dyadic(double N);

/// P_N: multiplier chi(|xi| / N).
Field project(double N, const Field& u, const CutoffProfile& profile = {});
/// P~_N = P_{N/2} + P_N + P_{2N}.
Field project_fattened(double N, const Field& u, const CutoffProfile& profile = {});

/// Dyadic N with N/2 >= 2 (2 pi / L) and 2N <= pi / h, in increasing order.
std::vector<double> dyadic_window(const Grid& grid);

// Time slabs and Duhamel -------------------------------------------------------

struct TimeSlab {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<Field> fields;

  [[nodiscard]] std::size_t count() const { return fields.size(); }
  [[nodiscard]] double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
  [[nodiscard]] double t_end() const { return time(fields.empty() ? 0 : fields.size() - 1); }
  [[nodiscard]] const Grid& grid() const;
};

/// Throws unless the slab is nonempty, dt > 0 and every field shares one grid.
void validate(const TimeSlab& slab);

TimeSlab make_slab(double t0, double dt, std::size_t count,
                   const std::function<Field(double)>& generator);
/// Free evolution e^{itD^a} u0 sampled at t0 + k dt.
TimeSlab free_evolution(const DispersionSetup& setup, const Field& u0, double t0, double dt,
                        std::size_t count);

/// \int_{t0}^{t} e^{i(t - tau)D^a} F(tau) dtau by the trapezoid rule in tau,
/// each mode propagated exactly. F is linearly interpolated on a partial last
/// interval.
Field duhamel(const DispersionSetup& setup, const TimeSlab& F, double t);
/// The same integral evaluated at every node of F.
TimeSlab duhamel_slab(const DispersionSetup& setup, const TimeSlab& F);

// Dispersive decay -------------------------------------------------------------

struct DecayFit {
  double slope = 0.0;
  std::vector<double> times;
  std::vector<double> sup_norms;
  /// Largest boundary mass observed over the sample times.
  double boundary_mass = 0.0;
};

/// Log-spaced sample times in [t_min, t_max].
std::vector<double> log_times(double t_min, double t_max, int samples);
/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

DecayFit dispersive_fit(const DispersionSetup& setup, const Field& u0, double t_min, double t_max,
                        int samples);
DecayFit dispersive_fit(const DispersionSetup& setup, const ProductField& u0, double t_min,
                        double t_max, int samples);

// Knapp data and rescaling -----------------------------------------------------

struct KnappSpec {
  double N = 1.0;
  double ecc = 1.0;
};

/// Unit-L^2 field whose transform is a box centred at (N, 0, ...) with side N/ecc
/// along axis 1 and sqrt(N)/ecc transversally, edges ramped over one lattice
/// cell.
Field knapp_data(const Grid& grid, const KnappSpec& spec);
/// The same tube as a tensor product of n factors on a 1-d grid; with
/// `propagate(ProductField)` this reaches boxes far beyond a full n-d grid.
ProductField knapp_product(const Grid& axis, int n, const KnappSpec& spec);

/// x -> u(lambda x) on the grid with box L / lambda (samples are unchanged).
Field rescale_field(const Field& u, double lambda);
ProductField rescale_field(const ProductField& u, double lambda);

// Picard iteration -------------------------------------------------------------

struct PicardOptions {
  int max_iter = 50;
  double tol = 1e-10;
  /// Number of consecutive residual increases treated as divergence.
  int divergence_run = 3;
};

struct PicardResult {
  TimeSlab u;
  std::vector<double> residuals;
  bool converged = false;
  bool diverged = false;
  /// max_t ||u - Phi(u)||_{L^2} of the returned iterate.
  double fixed_point_residual = 0.0;
};

/// Phi(u) = e^{itD^a}u0 - i duhamel(V u) on the nodes of V.
TimeSlab solution_map(const DispersionSetup& setup, const TimeSlab& V, const Field& u0,
                      const TimeSlab& u);
/// max over nodes of the L^2 distance.
double slab_distance(const TimeSlab& a, const TimeSlab& b);

PicardResult picard_solve(const DispersionSetup& setup, const TimeSlab& V, const Field& u0,
                          const PicardOptions& options = {});

struct WindowedPicardResult {
  TimeSlab u;
  std::vector<PicardResult> windows;
  bool converged = false;
};

/// Splits V into `windows` consecutive pieces sharing endpoints and restarts the
/// iteration from the endpoint of the previous window.
WindowedPicardResult picard_solve_windowed(const DispersionSetup& setup, const TimeSlab& V,
                                           const Field& u0, int windows,
                                           const PicardOptions& options = {});

}  // namespace strichlab::spectral
