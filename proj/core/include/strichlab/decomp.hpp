#pragma once

// Whitney squares of {s < t}, the bilinear forms B, B_Q, B^N, disjoint-support
// atomic decompositions and randomized checks of the sequence inequalities.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "strichlab/spectral.hpp"

namespace strichlab::decomp {

using spectral::cplx;
using spectral::DispersionSetup;
using spectral::TimeSlab;

/// [k * lambda, (k + 1) * lambda); cells are measured in units of the finest
/// cell so everything stays integral.
struct DyadicInterval {
  double lambda = 0.0;
  std::int64_t k = 0;
  /// Cell index range [first_cell, last_cell).
  std::int64_t first_cell = 0;
  std::int64_t last_cell = 0;

  [[nodiscard]] double start() const { return static_cast<double>(k) * lambda; }
  [[nodiscard]] double end() const { return static_cast<double>(k + 1) * lambda; }
};

struct WhitneySquare {
  DyadicInterval I;
  DyadicInterval J;

  [[nodiscard]] double lambda() const { return I.lambda; }
  /// inf J - sup I.
  [[nodiscard]] double distance() const { return J.start() - I.end(); }
};

/// Squares down to scale T 2^{-levels}; they tile the cell pairs i < j at that
/// resolution exactly. Requires T/dt a power of two and levels <= log2(T/dt).
std::vector<WhitneySquare> whitney_decompose(double T, double dt, int levels);

/// Number of finest cells per side of the decomposition (2^levels).
std::int64_t whitney_cells(int levels);

/// dt^2 sum_{i<j} <U(-t_i) F_i, U(-t_j) G_j>, U(t) = e^{itD^a}.
cplx bilinear_B(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G);
/// The same sum restricted to slab cells i in I and j in J. Square cell
/// indices refer to the slab's nodes, so the decomposition must be built with
/// the slab's dt.
cplx bilinear_BQ(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G,
                 const WhitneySquare& Q);
/// B with P_N applied to F.
cplx bilinear_BN(const DispersionSetup& setup, double N, const TimeSlab& F, const TimeSlab& G,
                 const spectral::CutoffProfile& profile = {});
/// sum over all squares, sharing the transformed slabs.
cplx bilinear_sum(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G,
                  const std::vector<WhitneySquare>& squares);
/// dt^2 sum_i <U(-t_i) F_i, U(-t_i) G_i>.
cplx bilinear_diagonal(const DispersionSetup& setup, const TimeSlab& F, const TimeSlab& G);

// Atomic decomposition -----------------------------------------------------------

struct Atom {
  /// Dyadic support size.
  double lambda = 0.0;
  double coefficient = 0.0;
  /// Cell indices in the support, in rearrangement order.
  std::vector<std::size_t> support;
  /// Atom values on the support (same order).
  std::vector<double> values;
};

struct AtomicDecomposition {
  double inv_p = 1.0;
  std::size_t cells = 0;
  std::vector<Atom> atoms;

  [[nodiscard]] double coefficient_norm() const;
};

/// f sampled on cells of the given measures. Cells are sorted by |f|
/// (descending, ties by index); the cells whose cumulative measure ends in
/// (lambda/2, lambda] form the support of the size-lambda atom.
AtomicDecomposition atomic_decompose(const std::vector<double>& f,
                                     const std::vector<double>& measure, double p);
std::vector<double> reconstruct(const AtomicDecomposition& d);

struct AtomCheck {
  bool supports_disjoint = true;
  bool support_measure_ok = true;
  bool sup_bound_ok = true;
  double reconstruction_error = 0.0;
};
AtomCheck check_atoms(const AtomicDecomposition& d, const std::vector<double>& f,
                      const std::vector<double>& measure);

/// (sum |f|^p mu)^{1/p}.
double weighted_lp(const std::vector<double>& f, const std::vector<double>& measure, double p);

// Sequence inequalities ----------------------------------------------------------

struct SequenceLemmaReport {
  int trials = 0;
  std::uint64_t seed = 0;
  /// Hoelder: max of lhs/rhs over trials, per matching class of squares.
  double holder_max_ratio = 0.0;
  int holder_violations = 0;
  /// Same sum over every square of a scale with multiplicity constant 3.
  double holder_family_max_ratio = 0.0;
  int holder_family_violations = 0;
  /// Young: max of lhs/rhs over trials.
  double young_max_ratio = 0.0;
  int young_violations = 0;
  /// Largest lhs - rhs seen (negative when all checks hold).
  double max_slack = 0.0;

  [[nodiscard]] bool passed() const {
    return holder_violations == 0 && holder_family_violations == 0 && young_violations == 0;
  }
};

inline constexpr double kLemmaSlack = 1e-12;

/// Squares of one scale of the Whitney family on [0, 1) split into the three
/// matching classes: within a class every interval occurs at most once on each
/// side.
std::vector<std::vector<WhitneySquare>> matching_classes(int level);

SequenceLemmaReport verify_sequence_lemmas(int trials, std::uint64_t seed);

}  // namespace strichlab::decomp
