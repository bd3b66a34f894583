#include "ldg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ldg/errors.hpp"

namespace ldg {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& s) {
  // Accepts plain numbers and fractions such as 1/70.
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const double den = to_double(trim(s.substr(slash + 1)));
    if (den == 0.0) throw InvalidInput("zero denominator in '" + s + "'");
    return to_double(trim(s.substr(0, slash))) / den;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw InvalidInput("not a number: '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw InvalidInput("not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidInput("not a boolean: '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(item));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"xi", [](RunConfig& c, const std::string& v) { c.xi = to_double(v); }},
      {"xi_list", [](RunConfig& c, const std::string& v) { c.xi_list = to_doubles(v); }},
      {"rho_max", [](RunConfig& c, const std::string& v) { c.rho_max = to_double(v); }},
      {"z_max", [](RunConfig& c, const std::string& v) { c.z_max = to_double(v); }},
      {"grading", [](RunConfig& c, const std::string& v) { c.grading = to_double(v); }},
      {"h_min_factor", [](RunConfig& c, const std::string& v) { c.h_min_factor = to_double(v); }},
      {"h_min", [](RunConfig& c, const std::string& v) { c.h_min = to_double(v); }},
      {"h_max", [](RunConfig& c, const std::string& v) { c.h_max = to_double(v); }},
      {"rho_focus_lo", [](RunConfig& c, const std::string& v) { c.rho_focus_lo = to_double(v); }},
      {"rho_focus_hi", [](RunConfig& c, const std::string& v) { c.rho_focus_hi = to_double(v); }},
      {"z_focus_lo", [](RunConfig& c, const std::string& v) { c.z_focus_lo = to_double(v); }},
      {"z_focus_hi", [](RunConfig& c, const std::string& v) { c.z_focus_hi = to_double(v); }},
      {"half_plane", [](RunConfig& c, const std::string& v) { c.half_plane = to_bool(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_seed(v); }},
      {"branches",
       [](RunConfig& c, const std::string& v) {
         c.branches.clear();
         for (const auto& b : split_list(v)) c.branches.push_back(parse_seed(b));
       }},
      {"z0", [](RunConfig& c, const std::string& v) { c.ansatz.z0 = to_double(v); }},
      {"psi_convention", [](RunConfig& c, const std::string& v) { c.ansatz.convention = parse_psi_convention(v); }},
      {"eta", [](RunConfig& c, const std::string& v) { c.eta = to_double(v); }},
      {"scheme", [](RunConfig& c, const std::string& v) { c.solver.scheme = parse_scheme(v); }},
      {"preconditioner", [](RunConfig& c, const std::string& v) { c.solver.preconditioner = parse_preconditioner(v); }},
      {"dt_initial", [](RunConfig& c, const std::string& v) { c.solver.dt_initial = to_double(v); }},
      {"dt_max", [](RunConfig& c, const std::string& v) { c.solver.dt_max = to_double(v); }},
      {"dt_growth", [](RunConfig& c, const std::string& v) { c.solver.dt_growth = to_double(v); }},
      {"tol_residual", [](RunConfig& c, const std::string& v) { c.solver.tol_residual = to_double(v); }},
      {"max_steps", [](RunConfig& c, const std::string& v) { c.solver.max_steps = to_long(v); }},
      {"checkpoint_every", [](RunConfig& c, const std::string& v) { c.solver.checkpoint_every = to_long(v); }},
      {"cg_rel_tol", [](RunConfig& c, const std::string& v) { c.solver.cg_rel_tol = to_double(v); }},
      {"cg_max_iter", [](RunConfig& c, const std::string& v) { c.solver.cg_max_iter = static_cast<int>(to_long(v)); }},
      {"preflight", [](RunConfig& c, const std::string& v) { c.solver.preflight = to_bool(v); }},
      {"delta_list", [](RunConfig& c, const std::string& v) { c.delta_list = to_doubles(v); }},
      {"r_out", [](RunConfig& c, const std::string& v) { c.r_out = to_double(v); }},
      {"cells_per_delta", [](RunConfig& c, const std::string& v) { c.cells_per_delta = static_cast<int>(to_long(v)); }},
      {"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = static_cast<int>(to_long(v)); }},
  };
  return table;
}

}  // namespace

SeedChoice parse_seed(const std::string& s) {
  if (s == "constant") return {SeedKind::constant, {}};
  if (s == "hyperbolic") return {SeedKind::hyperbolic, {}};
  if (s == "comparison") return {SeedKind::comparison, {}};
  if (s.rfind("checkpoint:", 0) == 0 && s.size() > 11) return {SeedKind::checkpoint, s.substr(11)};
  throw InvalidInput("unknown seed '" + s + "'");
}

std::string to_string(const SeedChoice& s) {
  switch (s.kind) {
    case SeedKind::constant:
      return "constant";
    case SeedKind::hyperbolic:
      return "hyperbolic";
    case SeedKind::comparison:
      return "comparison";
    case SeedKind::checkpoint:
      return "checkpoint:" + s.path;
  }
  return "constant";
}

double RunConfig::require_xi() const {
  if (xi) return *xi;
  if (xi_list.size() == 1) return xi_list.front();
  throw ConfigError("xi is required");
}

std::vector<double> RunConfig::require_xi_list() const {
  std::vector<double> list = xi_list;
  if (list.empty() && xi) list.push_back(*xi);
  if (list.empty()) throw ConfigError("xi_list is required");
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (!(list[k] > 0.0)) throw ConfigError("xi values must be positive");
    if (k > 0 && !(list[k] < list[k - 1])) throw ConfigError("xi_list must be strictly descending");
  }
  return list;
}

GridSpec RunConfig::grid_for(SeedKind kind, double xi_value) const {
  GridSpec s;
  s.rho_max = rho_max;
  s.z_max = z_max;
  s.grading = grading;
  s.h_min = h_min.value_or(h_min_factor * xi_value);
  s.h_max = h_max;
  const bool dipole = kind == SeedKind::hyperbolic;
  s.half_plane = half_plane.value_or(!dipole);
  s.rho_focus_lo = rho_focus_lo.value_or(dipole ? 0.0 : 0.9);
  s.rho_focus_hi = rho_focus_hi.value_or(dipole ? 1.35 : 1.4);
  s.z_focus_lo = z_focus_lo.value_or(dipole ? -1.6 : -0.2);
  s.z_focus_hi = z_focus_hi.value_or(0.2);
  return s;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const InvalidInput& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ldg
