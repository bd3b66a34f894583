#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ldg/errors.hpp"
#include "ldg/experiments.hpp"
#include "ldg/io.hpp"

using namespace ldg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ldg_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(LDG_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

// Comma separated cells with the trailing wall time dropped.
std::string without_wall_time(const std::string& row) { return row.substr(0, row.rfind(',')); }

const char* kSmallRun =
    "xi = 0.1\n"
    "rho_max = 3\n"
    "z_max = 3\n"
    "h_max = 0.2\n"
    "seed = constant\n";

}  // namespace

TEST(Remainder, Formula) {
  const double xi = 1.0 / 70, l = std::log(70.0);
  EXPECT_NEAR(energy_remainder(30.0, xi), 30.0 - std::numbers::pi * (l + std::log(l)), 1e-13);
  EXPECT_TRUE(std::isnan(energy_remainder(1.0, 0.5)));
}

TEST(ResultsCsv, GoldenRows) {
  EXPECT_STREQ(kResultsHeader,
               "branch,xi,e_total,e_grad,e_phi,e_pot,remainder,n_clusters,ring_rho,ring_z,orientable,tau,steps,wall_s");
  BranchRecord r;
  r.branch = "constant";
  r.xi = 0.02;
  r.energy = {10.5, 2.25, 1.0 / 3, 13.083333333333334};
  r.remainder = energy_remainder(r.energy.total, r.xi);
  r.steps = 42;
  r.wall_s = 1.5;
  EXPECT_EQ(format_record(r), "constant,0.02,13.0833333333,10.5,2.25,0.333333333333,-3.49195341497,0,,,,,42,1.5");
  DefectCluster c;
  c.center = {1.125, 0.0};
  c.orientability = Orientability::nonorientable;
  r.clusters.push_back(c);
  r.tau = 1;
  EXPECT_EQ(format_record(r), "constant,0.02,13.0833333333,10.5,2.25,0.333333333333,-3.49195341497,1,1.125,0,nonorientable,1,42,1.5");
  r.remainder = std::nan("");
  EXPECT_NE(format_record(r).find(",0.333333333333,,1,"), std::string::npos);
}

TEST(Ubound, InvalidRowsAreFlagged) {
  const auto rows = run_ubound({0.1, 1e-2});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].result);
  EXPECT_FALSE(rows[0].error.empty());
  ASSERT_TRUE(rows[1].result);
  EXPECT_EQ(rows[1].result->by_region[0].total, 0.0);
  const std::string bad = format_ubound(rows[0]);
  EXPECT_EQ(std::count(bad.begin(), bad.end(), ','), 13);
  EXPECT_EQ(bad.find("0.1,,,,,,,,,,,,,"), 0u);
  const std::string ok = format_ubound(rows[1]);
  EXPECT_EQ(std::count(ok.begin(), ok.end(), ','), 13);
  EXPECT_EQ(ok.substr(ok.size() - 3), ",ok");
}

TEST(PhaseCompare, RejectedDeltaIsFlagged) {
  PhaseOptions o;
  o.cells_per_delta = 4;
  o.h_max = 0.2;
  const auto rows = run_phase_compare({0.6, 0.05}, o);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(rows[1].error.empty());
  EXPECT_LT(rows[1].diff(), 0.0);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit_codes");
  fs::create_directories(dir);
  write_text(dir / "bad.cfg", "xi = 0.05\nno_such_key = 1\n");
  EXPECT_EQ(run_tool("relax --config " + (dir / "bad.cfg").string() + " --out " + (dir / "bad_out").string()), 3);
  EXPECT_FALSE(fs::exists(dir / "bad_out"));

  write_text(dir / "nolist.cfg", "branches = constant\n");
  EXPECT_EQ(run_tool("sweep --config " + (dir / "nolist.cfg").string() + " --out " + (dir / "s").string()), 3);
  EXPECT_EQ(run_tool("relax --no-such-flag"), 3);
  EXPECT_EQ(run_tool(""), 3);

  write_text(dir / "corrupt.ldgq", "LDGQ\x01");
  EXPECT_EQ(run_tool("analyze --checkpoint " + (dir / "corrupt.ldgq").string() + " --out " + dir.string()), 4);

  write_text(dir / "tight.cfg", std::string(kSmallRun) + "max_steps = 2\ndt_initial = 1e-9\ndt_growth = 1\n");
  EXPECT_EQ(run_tool("relax --config " + (dir / "tight.cfg").string() + " --out " + (dir / "tight").string()), 0);

  write_text(dir / "phase.cfg", "delta_list = 0.6\n");
  EXPECT_EQ(run_tool("phase-compare --config " + (dir / "phase.cfg").string() + " --out " + dir.string()), 0);
  const auto phase = read_lines(dir / "phase.csv");
  ASSERT_EQ(phase.size(), 2u);
  EXPECT_EQ(phase[0], kPhaseHeader);
  EXPECT_EQ(phase[1].find("0.6,4,8,,,,"), 0u);
}

TEST(Cli, RelaxRestartAndDeterminism) {
  const fs::path dir = scratch("relax");
  fs::create_directories(dir);
  write_text(dir / "run.cfg", kSmallRun);
  const std::string cfg = " --config " + (dir / "run.cfg").string();
  ASSERT_EQ(run_tool("relax" + cfg + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_tool("relax" + cfg + " --out " + (dir / "b").string() + " --threads 1"), 0);
  const auto a = read_lines(dir / "a" / "results.csv");
  const auto b = read_lines(dir / "b" / "results.csv");
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], kResultsHeader);
  EXPECT_EQ(without_wall_time(a[1]), without_wall_time(b[1]));
  EXPECT_TRUE(fs::exists(dir / "a" / "field_constant_0.1.csv"));

  const fs::path ck = dir / "a" / "checkpoint_constant_0.1.ldgq";
  ASSERT_TRUE(fs::exists(ck));
  ASSERT_EQ(run_tool("relax" + cfg + " --out " + (dir / "c").string() + " --seed-checkpoint " + ck.string()), 0);
  const auto c = read_lines(dir / "c" / "results.csv");
  ASSERT_EQ(c.size(), 2u);
  std::vector<std::string> ca, cc;
  std::stringstream sa(a[1]), sc(c[1]);
  for (std::string t; std::getline(sa, t, ',');) ca.push_back(t);
  for (std::string t; std::getline(sc, t, ',');) cc.push_back(t);
  ASSERT_EQ(ca.size(), 14u);
  ASSERT_EQ(cc.size(), 14u);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(ca[k], cc[k]) << "column " << k;
  EXPECT_EQ(cc[12], "0");

  ASSERT_EQ(run_tool("analyze --checkpoint " + ck.string() + " --out " + (dir / "d").string()), 0);
  const auto d = read_lines(dir / "d" / "results.csv");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[1].substr(0, 8), "analyze,");
}

TEST(Cli, UboundWritesTable) {
  const fs::path dir = scratch("ubound");
  fs::create_directories(dir);
  write_text(dir / "u.cfg", "xi_list = 0.1, 0.01\n");
  ASSERT_EQ(run_tool("ubound --config " + (dir / "u.cfg").string() + " --out " + dir.string()), 0);
  const auto rows = read_lines(dir / "ubound.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], kUboundHeader);
  EXPECT_NE(rows[1].substr(rows[1].size() - 3), ",ok");
  EXPECT_EQ(rows[2].substr(rows[2].size() - 3), ",ok");
}
