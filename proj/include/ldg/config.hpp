#pragma once

// Flat "key = value" run configuration. One entry per line, '#' starts a comment.

#include <optional>
#include <string>
#include <vector>

#include "ldg/grid.hpp"
#include "ldg/seeds.hpp"
#include "ldg/solver.hpp"

namespace ldg {

enum class SeedKind { constant, hyperbolic, comparison, checkpoint };

struct SeedChoice {
  SeedKind kind = SeedKind::constant;
  std::string path;  // checkpoint seeds only
};

SeedChoice parse_seed(const std::string& s);
std::string to_string(const SeedChoice& s);

struct RunConfig {
  // Correlation length: a single value or a descending list.
  std::optional<double> xi;
  std::vector<double> xi_list;

  // Grid. Unset entries take branch-dependent defaults, see grid_for().
  double rho_max = 8.0;
  double z_max = 8.0;
  double grading = 1.1;
  double h_min_factor = 0.5;  // h_min = factor * xi unless h_min is set
  std::optional<double> h_min;
  double h_max = 0.25;
  std::optional<double> rho_focus_lo, rho_focus_hi, z_focus_lo, z_focus_hi;
  std::optional<bool> half_plane;

  // Seeds.
  SeedChoice seed;
  std::vector<SeedChoice> branches{{SeedKind::constant, {}}, {SeedKind::hyperbolic, {}}};
  HyperbolicAnsatz ansatz;

  // Defects.
  double eta = 0.05;

  // Solver.
  SolveOptions solver;

  // Phase comparison.
  std::vector<double> delta_list{0.05};
  double r_out = 4.0;
  int cells_per_delta = 8;

  std::string out_dir = ".";
  int threads = 0;  // 0 keeps the OpenMP default

  /// Correlation length for single runs; throws ConfigError when unset.
  double require_xi() const;
  /// Descending list for sweeps: xi_list, or {xi}. Throws ConfigError when empty or not descending.
  std::vector<double> require_xi_list() const;
  /// Grid specification for a seed at correlation length xi. The hyperbolic
  /// seed defaults to the full plane with a refined zone below the particle.
  GridSpec grid_for(SeedKind kind, double xi) const;
};

/// Throws ConfigError naming the line on unknown keys or malformed values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace ldg
