#pragma once

// Binary checkpoints and CSV field dumps.
//
// Checkpoint layout (all integers and doubles little-endian):
//   "LDGQ", u32 version, u32 n_rho, u32 n_z, u8 half_plane,
//   f64 rho_max, z_max, grading, h_min, h_max, rho_focus_lo, rho_focus_hi, z_focus_lo, z_focus_hi,
//   f64 xi, u8 class per node, 5 x f64 per node.
// Nodes are stored with z outer and rho inner.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ldg/grid.hpp"

namespace ldg {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  FieldArray field;
  double xi = 0.0;
};

void write_checkpoint(std::ostream& out, const FieldArray& field, double xi);
void write_checkpoint(const std::string& path, const FieldArray& field, double xi);

/// Throws FormatError (with byte offset) on a corrupt or truncated stream and
/// UnsupportedVersion when the version field is not understood.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::string& path);

/// Cross-section dump with columns rho,z,a0,a1,a2,a3,a4,f_value; solid nodes are skipped.
void write_field_csv(std::ostream& out, const FieldArray& field);
void write_field_csv(const std::string& path, const FieldArray& field);

/// CSV cell text with 12 significant digits.
std::string format_number(double v);

}  // namespace ldg
