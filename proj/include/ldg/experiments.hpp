#pragma once

// Experiment orchestration shared by the command line tool and the acceptance suite.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ldg/config.hpp"
#include "ldg/defects.hpp"
#include "ldg/energy.hpp"
#include "ldg/phase.hpp"
#include "ldg/seeds.hpp"
#include "ldg/solver.hpp"

namespace ldg {

/// total - pi ln(1/xi) - pi ln ln(1/xi); NaN when xi >= 1/e.
double energy_remainder(double total, double xi);

struct BranchRecord {
  std::string branch;
  double xi = 0.0;
  EnergyBreakdown energy;
  double remainder = 0.0;
  std::vector<DefectCluster> clusters;  // heaviest first
  std::optional<int> tau;
  long steps = 0;
  double wall_s = 0.0;
};

struct BranchRun {
  BranchRecord record;
  FieldArray field;
  SolveReport report;
};

/// Energy, defects and ring charge (delta = 0.25, when the heaviest cluster is a ring) of a field.
BranchRecord analyze_field(const std::string& branch, const FieldArray& field, double xi, double eta);

/// Seed field for a branch at xi; checkpoint seeds are read from disk.
FieldArray make_seed(const RunConfig& cfg, const SeedChoice& seed, double xi);

/// Seed, relax and analyze one branch.
BranchRun run_branch(const RunConfig& cfg, const SeedChoice& seed, double xi);

/// Continuation over a descending list, one record per value. on_point sees each
/// finished run. Completed runs are stored in partial before an error propagates.
std::vector<BranchRun> run_sweep(const RunConfig& cfg, const SeedChoice& seed, const std::vector<double>& xi_list,
                                 const std::function<void(const BranchRun&)>& on_point = {},
                                 std::vector<BranchRun>* partial = nullptr);

inline constexpr const char* kResultsHeader =
    "branch,xi,e_total,e_grad,e_phi,e_pot,remainder,n_clusters,ring_rho,ring_z,orientable,tau,steps,wall_s";
std::string format_record(const BranchRecord& r);

struct UboundRow {
  double xi = 0.0;
  std::optional<ComparisonEnergy> result;
  std::string error;  // set when the row is invalid or the quadrature failed
};

inline constexpr const char* kUboundHeader =
    "xi,e_total,e_grad,e_phi,e_pot,remainder,error_estimate,e_d1,e_d2,e_d3,e_d4,e_d5,e_d6,status";
std::vector<UboundRow> run_ubound(const std::vector<double>& xi_list);
std::string format_ubound(const UboundRow& r);

struct PhaseRow {
  double delta = 0.0;
  double e_plus = 0.0, e_minus = 0.0;
  std::string error;
  double diff() const { return e_plus - e_minus; }
};

inline constexpr const char* kPhaseHeader = "delta,r_out,cells_per_delta,e_plus,e_minus,diff,status";
std::vector<PhaseRow> run_phase_compare(const std::vector<double>& delta_list, const PhaseOptions& opts);
std::string format_phase(const PhaseRow& r, const PhaseOptions& opts);

}  // namespace ldg
