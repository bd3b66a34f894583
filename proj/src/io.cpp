#include "ldg/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ldg/errors.hpp"
#include "ldg/qtensor.hpp"

namespace ldg {
namespace {

constexpr char kMagic[4] = {'L', 'D', 'G', 'Q'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    std::array<unsigned char, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    bytes(b.data(), 4);
  }
  void f64(double v) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    std::array<unsigned char, 8> b;
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(u >> (8 * k));
    bytes(b.data(), 8);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  std::uint64_t offset() const { return off_; }
  void bytes(void* p, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError(std::string("truncated ") + what, off_ + in_.gcount());
    off_ += n;
  }
  std::uint8_t u8(const char* what) {
    std::uint8_t v;
    bytes(&v, 1, what);
    return v;
  }
  std::uint32_t u32(const char* what) {
    std::array<unsigned char, 4> b;
    bytes(b.data(), 4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
    return v;
  }
  double f64(const char* what) {
    std::array<unsigned char, 8> b;
    bytes(b.data(), 8, what);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return std::bit_cast<double>(v);
  }

 private:
  std::istream& in_;
  std::uint64_t off_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const FieldArray& field, double xi) {
  if (!field.grid) throw InvalidInput("field has no grid");
  const Grid& g = *field.grid;
  const GridSpec& s = g.spec();
  Writer w(out);
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(g.n_rho()));
  w.u32(static_cast<std::uint32_t>(g.n_z()));
  w.u8(s.half_plane ? 1 : 0);
  for (double v : {s.rho_max, s.z_max, s.grading, s.h_min, s.h_max, s.rho_focus_lo, s.rho_focus_hi, s.z_focus_lo,
                   s.z_focus_hi, xi})
    w.f64(v);
  for (NodeClass c : g.classes()) w.u8(static_cast<std::uint8_t>(c));
  for (const QComponents& q : field.q)
    for (double v : q.a) w.f64(v);
  if (!out) throw Error("checkpoint write failed");
}

void write_checkpoint(const std::string& path, const FieldArray& field, double xi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_checkpoint(out, field, xi);
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic", 0);
  const std::uint64_t version_at = r.offset();
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) throw UnsupportedVersion(version, version_at);

  const std::uint64_t dims_at = r.offset();
  const std::uint32_t n_rho = r.u32("dimensions");
  const std::uint32_t n_z = r.u32("dimensions");
  const std::uint8_t half = r.u8("header");
  if (n_rho < 2 || n_z < 2 || half > 1) throw FormatError("invalid grid dimensions", dims_at);

  GridSpec s;
  s.n_rho = static_cast<int>(n_rho);
  s.n_z = static_cast<int>(n_z);
  s.half_plane = half == 1;
  s.rho_max = r.f64("header");
  s.z_max = r.f64("header");
  s.grading = r.f64("header");
  s.h_min = r.f64("header");
  s.h_max = r.f64("header");
  s.rho_focus_lo = r.f64("header");
  s.rho_focus_hi = r.f64("header");
  s.z_focus_lo = r.f64("header");
  s.z_focus_hi = r.f64("header");
  const double xi = r.f64("header");
  const std::uint64_t classes_at = r.offset();

  GridPtr grid;
  try {
    grid = build_grid(s);
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("grid parameters rejected: ") + e.what(), dims_at);
  }
  if (grid->n_rho() != n_rho || grid->n_z() != n_z) throw FormatError("grid dimensions do not match parameters", dims_at);

  for (std::size_t p = 0; p < grid->size(); ++p) {
    const std::uint8_t c = r.u8("node classes");
    if (c != static_cast<std::uint8_t>(grid->cls(p)))
      throw FormatError("node class mismatch at node " + std::to_string(p), classes_at + p);
  }
  Checkpoint ck{FieldArray(grid), xi};
  for (QComponents& q : ck.field.q)
    for (double& v : q.a) v = r.f64("field data");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after field data", r.offset());
  return ck;
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_checkpoint(in);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_field_csv(std::ostream& out, const FieldArray& field) {
  const Grid& g = *field.grid;
  out << "rho,z,a0,a1,a2,a3,a4,f_value\n";
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (g.cls(p) == NodeClass::solid) continue;
    out << format_number(g.rho_at(p)) << ',' << format_number(g.z_at(p));
    for (double v : field[p].a) out << ',' << format_number(v);
    out << ',' << format_number(potential(field[p])) << '\n';
  }
}

void write_field_csv(const std::string& path, const FieldArray& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_field_csv(out, field);
}

}  // namespace ldg
