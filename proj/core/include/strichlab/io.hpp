#pragma once

// Flat binary containers for fields and time slabs, plus the CSV shapes the
// command line tool emits.

#include <iosfwd>
#include <string>
#include <vector>

#include "strichlab/decomp.hpp"
#include "strichlab/exponents.hpp"
#include "strichlab/spectral.hpp"

namespace strichlab::io {

/// Header: n, m as little-endian int64, L as little-endian float64; then
/// interleaved (re, im) float64 samples in row-major order.
void write_field(std::ostream& out, const spectral::Field& u);
spectral::Field read_field(std::istream& in);

/// Header: count as int64, dt and t0 as float64; then `count` field records.
void write_slab(std::ostream& out, const spectral::TimeSlab& slab);
spectral::TimeSlab read_slab(std::istream& in);

void save_field(const std::string& path, const spectral::Field& u);
spectral::Field load_field(const std::string& path);
void save_slab(const std::string& path, const spectral::TimeSlab& slab);
spectral::TimeSlab load_slab(const std::string& path);

/// Shortest round-trip formatting, so identical runs give identical files.
std::string format_number(double v);

/// inv_p,inv_pt,local,nonsharp,sharp,mu,sigma1,sigma2
void write_region_csv(std::ostream& out, const exponents::RegionMask& mask);

/// lambda,i_start,j_start (interval starts in time units)
void write_whitney_csv(std::ostream& out, const std::vector<decomp::WhitneySquare>& squares);

struct NormRow {
  std::string norm_id;
  double inv_q = 0.0;
  double inv_p = 0.0;
  double s = 0.0;
  double value = 0.0;
  double boundary_mass = 0.0;
};
/// norm_id,q,p,s,value,diag_boundary_mass; exponents are printed as q and p
/// ("inf" for a zero reciprocal).
void write_norm_csv(std::ostream& out, const std::vector<NormRow>& rows);

}  // namespace strichlab::io
