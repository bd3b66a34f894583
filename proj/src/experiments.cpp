#include "ldg/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ldg/errors.hpp"
#include "ldg/io.hpp"

namespace ldg {
namespace {

std::string cell(double v) { return std::isfinite(v) ? format_number(v) : std::string(); }

std::string status_of(const std::string& error) { return error.empty() ? "ok" : error; }

// CSV-safe status text: no commas or newlines.
std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

double energy_remainder(double total, double xi) {
  if (!(xi > 0.0) || xi >= 1.0 / std::numbers::e) return std::numeric_limits<double>::quiet_NaN();
  const double l = std::log(1.0 / xi);
  return total - std::numbers::pi * l - std::numbers::pi * std::log(l);
}

BranchRecord analyze_field(const std::string& branch, const FieldArray& field, double xi, double eta) {
  BranchRecord r;
  r.branch = branch;
  r.xi = xi;
  r.energy = total_energy(field, xi);
  r.remainder = energy_remainder(r.energy.total, xi);
  LocateOptions lo;
  lo.eta = eta;
  lo.loop.eta = eta;
  r.clusters = locate_defects(field, xi, lo);
  if (!r.clusters.empty() && r.clusters.front().kind == DefectKind::ring) {
    try {
      r.tau = ring_charge(field, 0.25);
    } catch (const Error&) {
      r.tau.reset();
    }
  }
  return r;
}

FieldArray make_seed(const RunConfig& cfg, const SeedChoice& seed, double xi) {
  switch (seed.kind) {
    case SeedKind::constant:
      return constant_seed(build_grid(cfg.grid_for(seed.kind, xi)));
    case SeedKind::hyperbolic:
      return hyperbolic_seed(build_grid(cfg.grid_for(seed.kind, xi)), cfg.ansatz);
    case SeedKind::comparison:
      return comparison_seed(build_grid(cfg.grid_for(seed.kind, xi)), xi);
    case SeedKind::checkpoint:
      return read_checkpoint(seed.path).field;
  }
  throw InvalidInput("unknown seed kind");
}

BranchRun run_branch(const RunConfig& cfg, const SeedChoice& seed, double xi) {
  RelaxResult rr = relax(make_seed(cfg, seed, xi), xi, cfg.solver);
  BranchRun out;
  out.record = analyze_field(to_string(seed), rr.field, xi, cfg.eta);
  out.record.steps = rr.report.steps;
  out.record.wall_s = rr.report.wall_s;
  out.field = std::move(rr.field);
  out.report = std::move(rr.report);
  return out;
}

std::vector<BranchRun> run_sweep(const RunConfig& cfg, const SeedChoice& seed, const std::vector<double>& xi_list,
                                 const std::function<void(const BranchRun&)>& on_point,
                                 std::vector<BranchRun>* partial) {
  if (xi_list.empty()) throw InvalidInput("empty xi list");
  // Seed grid resolved for the smallest xi so every step of the continuation passes the preflight.
  const FieldArray seed_field = make_seed(cfg, seed, xi_list.back());
  std::vector<BranchRun> runs;
  auto record = [&](const SweepPoint& p) {
    BranchRun b;
    b.record = analyze_field(to_string(seed), p.field, p.xi, cfg.eta);
    b.record.steps = p.report.steps;
    b.record.wall_s = p.report.wall_s;
    b.field = p.field;
    b.report = p.report;
    if (on_point) on_point(b);
    runs.push_back(std::move(b));
  };
  try {
    continuation_sweep(xi_list, seed_field, xi_list.front(), cfg.solver, record);
  } catch (...) {
    if (partial) *partial = runs;
    throw;
  }
  return runs;
}

std::string format_record(const BranchRecord& r) {
  std::ostringstream os;
  os << r.branch << ',' << cell(r.xi) << ',' << cell(r.energy.total) << ',' << cell(r.energy.e_grad) << ','
     << cell(r.energy.e_phi) << ',' << cell(r.energy.e_pot) << ',' << cell(r.remainder) << ',' << r.clusters.size()
     << ',';
  if (!r.clusters.empty()) {
    const DefectCluster& c = r.clusters.front();
    os << cell(c.center[0]) << ',' << cell(c.center[1]) << ',' << to_string(c.orientability);
  } else {
    os << ",,";
  }
  os << ',' << (r.tau ? std::to_string(*r.tau) : std::string()) << ',' << r.steps << ',' << cell(r.wall_s);
  return os.str();
}

std::vector<UboundRow> run_ubound(const std::vector<double>& xi_list) {
  std::vector<UboundRow> rows;
  for (double xi : xi_list) {
    UboundRow row;
    row.xi = xi;
    try {
      row.result = comparison_energy(xi);
    } catch (const Error& e) {
      row.error = sanitize(e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_ubound(const UboundRow& r) {
  std::ostringstream os;
  os << cell(r.xi);
  if (r.result) {
    const ComparisonEnergy& c = *r.result;
    os << ',' << cell(c.breakdown.total) << ',' << cell(c.breakdown.e_grad) << ',' << cell(c.breakdown.e_phi) << ','
       << cell(c.breakdown.e_pot) << ',' << cell(c.remainder) << ',' << cell(c.error_estimate);
    for (const auto& b : c.by_region) os << ',' << cell(b.total);
  } else {
    os << std::string(12, ',');
  }
  os << ',' << status_of(r.error);
  return os.str();
}

std::vector<PhaseRow> run_phase_compare(const std::vector<double>& delta_list, const PhaseOptions& opts) {
  std::vector<PhaseRow> rows;
  for (double d : delta_list) {
    PhaseRow row;
    row.delta = d;
    try {
      row.e_plus = phase_minimize(d, 1, opts).energy;
      row.e_minus = phase_minimize(d, -1, opts).energy;
    } catch (const Error& e) {
      row.error = sanitize(e.what());
      row.e_plus = row.e_minus = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_phase(const PhaseRow& r, const PhaseOptions& opts) {
  std::ostringstream os;
  os << cell(r.delta) << ',' << cell(opts.r_out) << ',' << opts.cells_per_delta << ',' << cell(r.e_plus) << ','
     << cell(r.e_minus) << ',' << cell(r.diff()) << ',' << status_of(r.error);
  return os.str();
}

}  // namespace ldg
