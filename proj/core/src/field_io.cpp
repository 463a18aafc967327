#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "strichlab/error.hpp"
#include "strichlab/io.hpp"

namespace strichlab::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

void put_i64(std::ostream& out, std::int64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::int64_t get_i64(std::istream& in) {
  std::int64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw InvalidArgument("truncated binary container");
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw InvalidArgument("truncated binary container");
  return v;
}

std::string exponent_text(double inv) { return inv == 0.0 ? "inf" : format_number(1.0 / inv); }

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

void write_field(std::ostream& out, const spectral::Field& u) {
  put_i64(out, u.grid.n);
  put_i64(out, u.grid.m);
  put_f64(out, u.grid.L);
  for (const auto& z : u.samples) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  if (!out) throw Error("failed to write field");
}

spectral::Field read_field(std::istream& in) {
  const auto n = get_i64(in);
  const auto m = get_i64(in);
  const double L = get_f64(in);
  if (n < 1 || n > 3 || m < 8 || m > (1 << 16)) throw InvalidArgument("bad field header");
  spectral::Field u = spectral::zeros(spectral::make_grid(static_cast<int>(n), static_cast<int>(m), L));
  for (auto& z : u.samples) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    z = {re, im};
  }
  return u;
}

void write_slab(std::ostream& out, const spectral::TimeSlab& slab) {
  spectral::validate(slab);
  put_i64(out, static_cast<std::int64_t>(slab.count()));
  put_f64(out, slab.dt);
  put_f64(out, slab.t0);
  for (const auto& f : slab.fields) write_field(out, f);
}

spectral::TimeSlab read_slab(std::istream& in) {
  const auto count = get_i64(in);
  if (count < 1) throw InvalidArgument("bad slab header");
  spectral::TimeSlab slab;
  slab.dt = get_f64(in);
  slab.t0 = get_f64(in);
  for (std::int64_t k = 0; k < count; ++k) slab.fields.push_back(read_field(in));
  spectral::validate(slab);
  return slab;
}

void save_field(const std::string& path, const spectral::Field& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  write_field(out, u);
}

spectral::Field load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_field(in);
}

void save_slab(const std::string& path, const spectral::TimeSlab& slab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  write_slab(out, slab);
}

spectral::TimeSlab load_slab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_slab(in);
}

void write_region_csv(std::ostream& out, const exponents::RegionMask& mask) {
  out << "inv_p,inv_pt,local,nonsharp,sharp,mu,sigma1,sigma2\n";
  for (const auto& p : mask.points) {
    out << format_number(p.inv_p) << ',' << format_number(p.inv_pt) << ','
        << ((p.code & exponents::kLocalBit) ? 1 : 0) << ','
        << ((p.code & exponents::kNonsharpBit) ? 1 : 0) << ','
        << ((p.code & exponents::kSharpBit) ? 1 : 0) << ',';
    if (p.witness) {
      out << format_number(p.witness->mu) << ',' << format_number(p.witness->sigma1) << ','
          << format_number(p.witness->sigma2);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_whitney_csv(std::ostream& out, const std::vector<decomp::WhitneySquare>& squares) {
  out << "lambda,i_start,j_start\n";
  for (const auto& q : squares)
    out << format_number(q.lambda()) << ',' << format_number(q.I.start()) << ','
        << format_number(q.J.start()) << '\n';
}

void write_norm_csv(std::ostream& out, const std::vector<NormRow>& rows) {
  out << "norm_id,q,p,s,value,diag_boundary_mass\n";
  for (const auto& r : rows)
    out << r.norm_id << ',' << exponent_text(r.inv_q) << ',' << exponent_text(r.inv_p) << ','
        << format_number(r.s) << ',' << format_number(r.value) << ','
        << format_number(r.boundary_mass) << '\n';
}

}  // namespace strichlab::io
