#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "strichlab/error.hpp"
#include "spectral_internal.hpp"
#include "strichlab/spectral.hpp"

namespace strichlab::spectral {

namespace {

// FFTW planning is not thread-safe, execution of an existing plan on new arrays
// is. Plans are created once per (n, m, direction) and kept for the process.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int m, int sign, cplx* data) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n, m, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    int dims[3] = {m, m, m};
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    // FFTW_ESTIMATE never touches the arrays while planning.
    fftw_plan plan = fftw_plan_dft(n, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void fft_inplace(const Grid& grid, std::vector<cplx>& data, int sign) {
  if (data.size() != grid.size()) throw InvalidArgument("sample count does not match grid");
  fftw_plan plan = plan_cache().get(grid.n, grid.m, sign, data.data());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

int index_parity(const Grid& grid, std::size_t index) {
  int sum = 0;
  const auto m = static_cast<std::size_t>(grid.m);
  for (int d = 0; d < grid.n; ++d) {
    sum += static_cast<int>(index % m);
    index /= m;
  }
  return sum & 1;
}

// Calls fn(flat_index, |xi|^2) for every lattice mode, hoisting the per-axis
// squares out of the inner loop.
template <class Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  std::vector<double> k2(static_cast<std::size_t>(grid.m));
  for (int k = 0; k < grid.m; ++k) k2[k] = grid.wavenumber(k) * grid.wavenumber(k);
  const std::size_t m = grid.m;
  if (grid.n == 1) {
    for (std::size_t i = 0; i < m; ++i) fn(i, k2[i]);
  } else if (grid.n == 2) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) fn(i * m + j, k2[i] + k2[j]);
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < m; ++l) fn((i * m + j) * m + l, k2[i] + k2[j] + k2[l]);
  }
}

}  // namespace

Spectrum fourier_transform(const Field& u) {
  Spectrum s{u.grid, u.samples};
  fft_inplace(u.grid, s.coeffs, FFTW_FORWARD);
  const double w = u.grid.cell_volume();
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    s.coeffs[i] *= index_parity(u.grid, i) ? -w : w;
  return s;
}

Field inverse_fourier_transform(const Spectrum& spec) {
  Field u{spec.grid, spec.coeffs};
  const double w = 1.0 / std::pow(spec.grid.L, spec.grid.n);
  for (std::size_t i = 0; i < u.samples.size(); ++i)
    u.samples[i] *= index_parity(spec.grid, i) ? -w : w;
  fft_inplace(spec.grid, u.samples, FFTW_BACKWARD);
  return u;
}

Field apply_multiplier(const Field& u, const std::function<cplx(const Point&)>& symbol) {
  Field r = u;
  fft_inplace(u.grid, r.samples, FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(u.grid.size());
  for (std::size_t i = 0; i < r.samples.size(); ++i)
    r.samples[i] *= symbol(frequency(u.grid, i)) * inv;
  fft_inplace(u.grid, r.samples, FFTW_BACKWARD);
  return r;
}

Field apply_radial_multiplier(const Field& u, const std::function<cplx(double)>& symbol) {
  Field r = u;
  fft_inplace(u.grid, r.samples, FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(u.grid.size());
  for_each_mode(u.grid, [&](std::size_t i, double xi2) {
    r.samples[i] *= symbol(std::sqrt(xi2)) * inv;
  });
  fft_inplace(u.grid, r.samples, FFTW_BACKWARD);
  return r;
}

double nyquist_mass(const Field& u, double width_fraction) {
  std::vector<cplx> d = u.samples;
  fft_inplace(u.grid, d, FFTW_FORWARD);
  const double edge = (1.0 - width_fraction) * u.grid.nyquist();
  std::vector<char> outer_axis(static_cast<std::size_t>(u.grid.m));
  for (int k = 0; k < u.grid.m; ++k) outer_axis[k] = std::abs(u.grid.wavenumber(k)) >= edge;
  const auto m = static_cast<std::size_t>(u.grid.m);
  double outer = 0.0, total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = std::norm(d[i]);
    total += w;
    std::size_t idx = i;
    bool hit = false;
    for (int k = 0; k < u.grid.n && !hit; ++k, idx /= m) hit = outer_axis[idx % m];
    if (hit) outer += w;
  }
  return total > 0.0 ? outer / total : 0.0;
}

// Used by the propagator and Duhamel code; kept here next to the FFT plumbing.
void transform_modes(const Grid& grid, std::vector<cplx>& data, bool forward) {
  fft_inplace(grid, data, forward ? FFTW_FORWARD : FFTW_BACKWARD);
}

void visit_mode_norms(const Grid& grid, const std::function<void(std::size_t, double)>& fn) {
  for_each_mode(grid, [&](std::size_t i, double xi2) { fn(i, std::sqrt(xi2)); });
}

Field refine(const Field& u, int factor) {
  if (factor == 1) return u;
  const Grid& g = u.grid;
  const Spectrum coarse = fourier_transform(u);
  const Grid fine = make_grid(g.n, g.m * factor, g.L);
  Spectrum out{fine, std::vector<cplx>(fine.size())};
  const auto m = static_cast<std::size_t>(g.m);
  for (std::size_t i = 0; i < coarse.coeffs.size(); ++i) {
    std::size_t rest = i, target = 0, stride = 1;
    bool nyquist = false;
    for (int d = g.n - 1; d >= 0; --d) {
      const int k = static_cast<int>(rest % m);
      rest /= m;
      if (k == g.m / 2) nyquist = true;
      const int signed_k = k < g.m / 2 ? k : k - g.m;
      const int fk = signed_k >= 0 ? signed_k : signed_k + fine.m;
      target += static_cast<std::size_t>(fk) * stride;
      stride *= static_cast<std::size_t>(fine.m);
    }
    if (!nyquist) out.coeffs[target] = coarse.coeffs[i];
  }
  return inverse_fourier_transform(out);
}

}  // namespace strichlab::spectral
