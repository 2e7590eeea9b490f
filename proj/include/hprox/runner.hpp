#pragma once

// Experiment runner behind the command-line tool: solve, verify, sweep, and
// the trace.csv / summary.json / verify.json artifacts.

#include "hprox/config.hpp"
#include "hprox/prox.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hprox {

/// Process exit codes; a stable contract.
enum ExitCode : int { kExitStationary = 0, kExitError = 1, kExitMaxIters = 2, kExitVerifyFailed = 3 };

int exit_code(Termination t);

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "HPROX_OUTPUT_ROOT";

struct PreparedRun {
  problems::Problem problem;
  Point start;
  double lipschitz_estimate = 0.0;
  double threshold = 0.0;
  double lambda = 0.0;
  ProxConfig prox;
  std::optional<Point> level_ref;
};

/// Builds the problem, estimates L̂ and picks lambda. Does not check lambda
/// against the threshold.
PreparedRun prepare(const RunConfig& cfg);

struct RunSummary {
  Termination termination = Termination::MaxIters;
  std::string error;
  int iterations = 0;
  std::vector<double> final_point;
  double final_f = 0.0;
  std::optional<double> final_residual;
  double wall_time_ms = 0.0;
  double lambda_used = 0.0;
  double lipschitz_estimate = 0.0;
  double prox_threshold = 0.0;
};

struct RunOutcome {
  RunSummary summary;
  std::optional<Trace> trace;
};

/// Runs the solver in memory. Configuration and parameter errors end up in
/// summary.error with Termination::Error.
RunOutcome execute(const RunConfig& cfg);

std::string trace_csv(const Trace& trace);
nlohmann::json summary_json(const RunSummary& summary, const RunConfig& cfg);

/// execute() plus trace.csv and summary.json under out_dir.
RunSummary run(const RunConfig& cfg, const std::filesystem::path& out_dir);

struct CheckResult {
  std::string name;
  bool passed = false;
  nlohmann::json detail;
};

struct VerifyReport {
  std::string problem;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::vector<std::string> failed() const;
  nlohmann::json to_json() const;
};

struct ProxGridReport {
  int subproblems = 0;
  double max_point_error = 0.0;
  double max_value_error = 0.0;
  bool passed(double point_tol = 1e-4, double value_tol = 1e-8) const {
    return max_point_error <= point_tol && max_value_error <= value_tol;
  }
};

/// prox_step against grid_minimize (1e5 interior nodes over the problem
/// region) on random subproblems: p_k drawn from the region and
/// lambda = lambda_floor (1 + 2u). Dimension-one problems only.
ProxGridReport compare_prox_with_grid(const problems::Problem& problem, double threshold,
                                      double lambda_floor, int count, std::uint64_t seed,
                                      const ProxConfig& cfg);

VerifyReport verify(const RunConfig& cfg);
/// verify() plus verify.json under out_dir.
VerifyReport run_verify(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// --out, else the config's output_dir (under $HPROX_OUTPUT_ROOT when
/// relative and set), else <root>/<config stem> with root defaulting to "runs".
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::string& cli_override,
                                         const std::filesystem::path& config_path);

struct SweepEntry {
  std::filesystem::path config;
  std::filesystem::path output_dir;
  int exit_code = kExitError;
  std::string message;
};

/// Runs every *.json under dir (sorted by name) concurrently, each into its
/// own output directory.
std::vector<SweepEntry> sweep(const std::filesystem::path& dir, unsigned jobs = 0);
int sweep_exit_code(const std::vector<SweepEntry>& entries);

} // namespace hprox
