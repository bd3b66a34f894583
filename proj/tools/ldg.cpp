// ldg: relaxation, sweeps and diagnostics for the axisymmetric Q-tensor model.
//
// Exit codes: 0 success, 2 solver failure, 3 configuration error, 4 file format error.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ldg/config.hpp"
#include "ldg/errors.hpp"
#include "ldg/experiments.hpp"
#include "ldg/io.hpp"

namespace fs = std::filesystem;
using namespace ldg;

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;
constexpr int kExitFormat = 4;

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  std::string seed_checkpoint;
};

std::string tag_for(const SeedChoice& seed, double xi) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%.6g", seed.kind == SeedKind::checkpoint ? "restart" : to_string(seed).c_str(), xi);
  return buf;
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  fs::path path(const std::string& name) const { return dir_ / name; }
  void ensure() const { fs::create_directories(dir_); }
  void store(const BranchRun& run, const SeedChoice& seed) const {
    const std::string tag = tag_for(seed, run.record.xi);
    write_checkpoint(path("checkpoint_" + tag + ".ldgq").string(), run.field, run.record.xi);
    write_field_csv(path("field_" + tag + ".csv").string(), run.field);
  }

 private:
  fs::path dir_;
};

RunConfig load(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  if (!c.seed_checkpoint.empty()) cfg.seed = {SeedKind::checkpoint, c.seed_checkpoint};
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

void print_clusters(const BranchRecord& r) {
  std::printf("%s xi=%.6g E=%.10g remainder=%.6g clusters=%zu", r.branch.c_str(), r.xi, r.energy.total, r.remainder,
              r.clusters.size());
  if (r.tau) std::printf(" tau=%+d", *r.tau);
  std::printf("\n");
  for (const auto& c : r.clusters)
    std::printf("  %s at (%.4f, %.4f) radius %.4f mass %.4g nodes %zu %s\n", to_string(c.kind), c.center[0],
                c.center[1], c.radius, c.mass, c.n_nodes, to_string(c.orientability));
}

SolveOptions with_progress(SolveOptions o, const Outputs& out, const SeedChoice& seed, double xi) {
  if (o.checkpoint_every > 0)
    o.on_checkpoint = [&out, seed, xi](const FieldArray& f, long) {
      write_checkpoint(out.path("checkpoint_" + tag_for(seed, xi) + ".ldgq").string(), f, xi);
    };
  return o;
}

int cmd_relax(const Common& common) {
  RunConfig cfg = load(common);
  const double xi = cfg.require_xi();
  const Outputs out(cfg.out_dir);
  out.ensure();
  cfg.solver = with_progress(cfg.solver, out, cfg.seed, xi);
  const BranchRun run = run_branch(cfg, cfg.seed, xi);
  out.store(run, cfg.seed);
  std::ofstream csv(out.path("results.csv"));
  csv << kResultsHeader << '\n' << format_record(run.record) << '\n';
  print_clusters(run.record);
  if (!run.report.converged) std::fprintf(stderr, "warning: max_steps reached, residual %.3e\n", run.report.residual);
  return 0;
}

int cmd_sweep(const Common& common) {
  RunConfig cfg = load(common);
  const std::vector<double> xi_list = cfg.require_xi_list();
  if (cfg.branches.empty()) throw ConfigError("branches must not be empty");
  const Outputs out(cfg.out_dir);
  out.ensure();
  std::ofstream csv(out.path("results.csv"));
  csv << kResultsHeader << '\n';
  for (const SeedChoice& seed : cfg.branches) {
    run_sweep(cfg, seed, xi_list, [&](const BranchRun& run) {
      out.store(run, seed);
      csv << format_record(run.record) << '\n' << std::flush;
      print_clusters(run.record);
    });
  }
  return 0;
}

int cmd_ubound(const Common& common) {
  const RunConfig cfg = load(common);
  const std::vector<double> xi_list = cfg.require_xi_list();
  const Outputs out(cfg.out_dir);
  out.ensure();
  std::ofstream csv(out.path("ubound.csv"));
  csv << kUboundHeader << '\n';
  for (const UboundRow& row : run_ubound(xi_list)) {
    csv << format_ubound(row) << '\n';
    if (row.result)
      std::printf("xi=%.6g E_D=%.8f R=%.6f\n", row.xi, row.result->breakdown.total, row.result->remainder);
    else
      std::printf("xi=%.6g invalid: %s\n", row.xi, row.error.c_str());
  }
  return 0;
}

int cmd_phase_compare(const Common& common) {
  const RunConfig cfg = load(common);
  if (cfg.delta_list.empty()) throw ConfigError("delta_list must not be empty");
  PhaseOptions po;
  po.r_out = cfg.r_out;
  po.cells_per_delta = cfg.cells_per_delta;
  const Outputs out(cfg.out_dir);
  out.ensure();
  std::ofstream csv(out.path("phase.csv"));
  csv << kPhaseHeader << '\n';
  for (const PhaseRow& row : run_phase_compare(cfg.delta_list, po)) {
    csv << format_phase(row, po) << '\n';
    std::printf("delta=%.6g E+=%.8f E-=%.8f diff=%.8f %s\n", row.delta, row.e_plus, row.e_minus, row.diff(),
                row.error.empty() ? "" : row.error.c_str());
  }
  return 0;
}

int cmd_analyze(const Common& common, const std::string& checkpoint) {
  const RunConfig cfg = load(common);
  const std::string path = !checkpoint.empty() ? checkpoint : cfg.seed.path;
  if (path.empty()) throw ConfigError("analyze needs a checkpoint (--checkpoint or --seed-checkpoint)");
  const Checkpoint ck = read_checkpoint(path);
  const BranchRecord r = analyze_field("analyze", ck.field, ck.xi, cfg.eta);
  const Outputs out(cfg.out_dir);
  out.ensure();
  std::ofstream csv(out.path("results.csv"));
  csv << kResultsHeader << '\n' << format_record(r) << '\n';
  print_clusters(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxation and defect analysis for nematic order around a spherical colloid"};
  app.require_subcommand(1);
  Common common;
  std::string checkpoint;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "key = value configuration file");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--threads", common.threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed-checkpoint", common.seed_checkpoint, "start from a checkpoint");
  };
  CLI::App* relax_cmd = app.add_subcommand("relax", "relax one seed at one correlation length");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "continuation over xi_list for each branch");
  CLI::App* ubound_cmd = app.add_subcommand("ubound", "energy of the comparison map over xi_list");
  CLI::App* phase_cmd = app.add_subcommand("phase-compare", "phase problem energies for both ring charges");
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "defect report for a checkpoint");
  for (CLI::App* sub : {relax_cmd, sweep_cmd, ubound_cmd, phase_cmd, analyze_cmd}) add_common(sub);
  analyze_cmd->add_option("--checkpoint", checkpoint, "checkpoint file to analyze");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*relax_cmd) return cmd_relax(common);
    if (*sweep_cmd) return cmd_sweep(common);
    if (*ubound_cmd) return cmd_ubound(common);
    if (*phase_cmd) return cmd_phase_compare(common);
    if (*analyze_cmd) return cmd_analyze(common, checkpoint);
  } catch (const SolverFailure& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitFormat;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
