#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vpen/diagnostics.hpp"
#include "vpen/strategies.hpp"
#include "vpen/subsolver.hpp"

namespace vpen {

/**
 * Method section of a config. tau1 is either a list of dual coordinates or a
 * number c meaning c times the unit parameter; it is resolved against the
 * instance's cone when the run starts.
 *
 *   strategy   "geometric" | "adaptive" | "combined" | "periodic_combined"  (geometric)
 *   theta      10      delta   0.1     period  5
 *   scaling    "unit" | "inverse_violation"  (inverse_violation)      gamma  1
 *   tau1       1       eps_feas 1e-6   eps_phi 1e-8      max_iters 100
 */
struct MethodSpec {
  std::string strategy = "geometric";
  double theta = 10.0;
  double delta = 0.1;
  int period = 5;
  std::string scaling = "inverse_violation";
  double gamma = 1.0;
  std::optional<Eigen::VectorXd> tau1;
  double tau1_scale = 1.0;
  double eps_feas = 1e-6;
  double eps_phi = 1e-8;
  int max_iters = 100;
};

/**
 * Diagnostics section.
 *
 *   checks    list of check names                          (all checks)
 *   tau       parameter for the exactness checks: list or scalar multiple of
 *             the unit parameter                           (instance exact_tau)
 *   c_star    scalar threshold for the comparison check    (p_K(tau))
 *   radius    ball radius around the reference optimum     0.3
 *   samples   samples for error_bound and local_exactness  200
 *   seed      sampling seed                                7
 */
struct DiagnosticsSpec {
  std::vector<std::string> checks;
  std::optional<Eigen::VectorXd> tau;
  std::optional<double> tau_scale;
  std::optional<double> c_star;
  double radius = 0.3;
  int samples = 200;
  std::uint64_t seed = 7;
};

/**
 * A complete experiment document. Only "instance" is required; it names a
 * bundled instance or a path to an instance JSON file (relative paths resolve
 * against the config file's directory).
 *
 *   {"instance": ..., "method": {...}, "methods": [{...}, ...],
 *    "subsolver": {"grid_points_per_dim", "multistart_count", "local_iters",
 *                  "local_tol", "seed"},
 *    "diagnostics": {...}, "output": {"dir": "out"}}
 *
 * Each entry of "methods" (used by compare) overrides fields of "method".
 */
struct ExperimentConfig {
  std::string instance;
  std::filesystem::path base_dir = ".";
  MethodSpec method;
  std::vector<MethodSpec> methods;
  SubsolverConfig subsolver;
  DiagnosticsSpec diagnostics;
  std::filesystem::path out_dir = "out";
};

/// Throws ParseError with a JSON pointer for malformed or unknown fields.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Bundled name, or an instance file resolved against base_dir.
ProblemInstance resolve_instance(const std::string& ref, const std::filesystem::path& base_dir);

/// Materializes a MethodSpec for the instance's cone. `where` prefixes error messages.
MethodConfig make_method(const MethodSpec& spec, const ProblemInstance& inst,
                         const std::string& where = "method");

/// Writes <out>/trace.csv and <out>/summary.json. Returns the process exit code.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);
/// Writes <out>/comparison.csv and <out>/comparison.json.
int cmd_compare(const ExperimentConfig& cfg, std::ostream& log);
/// Writes <out>/diagnostics.json and <out>/diagnostics.txt.
int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log);

/// Runs the configured checks without writing anything.
DiagnosticsReport run_diagnostics(const ExperimentConfig& cfg);

/// Prints bundled instances; with `write_dir`, also writes one JSON file per instance.
void cmd_list_instances(std::ostream& out,
                        const std::optional<std::filesystem::path>& write_dir = std::nullopt);
void cmd_list_checks(std::ostream& out);

/**
 * Entry point shared by the executable and the tests: loads the config,
 * applies the --out and --seed overrides and dispatches. Library errors are
 * reported on `err` and mapped to exit code 1.
 */
int run_verb(const std::string& verb, const std::optional<std::filesystem::path>& config,
             const std::optional<std::filesystem::path>& out_dir,
             const std::optional<std::uint64_t>& seed, std::ostream& out, std::ostream& err);

}  // namespace vpen
