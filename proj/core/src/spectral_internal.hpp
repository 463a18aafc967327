#pragma once

#include <functional>
#include <vector>

#include "strichlab/spectral.hpp"

namespace strichlab::spectral {

/// Unnormalized in-place DFT (forward: e^{-2 pi i jk/m}).
void transform_modes(const Grid& grid, std::vector<cplx>& data, bool forward);
/// fn(flat index, |xi|) over all lattice modes.
void visit_mode_norms(const Grid& grid, const std::function<void(std::size_t, double)>& fn);

/// |xi|^a for every lattice mode, in FFT order.
std::vector<double> mode_frequencies(const DispersionSetup& setup, const Grid& grid);

/// Trigonometric interpolant of u on a grid with factor-times more points per axis.
/// The Nyquist plane is dropped.
Field refine(const Field& u, int factor);

}  // namespace strichlab::spectral
