// hprox: run, verify and sweep proximal point experiments.

#include "hprox/config.hpp"
#include "hprox/errors.hpp"
#include "hprox/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Proximal point method for max-of-smooth objectives on Hadamard manifolds"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "solve one configuration, write trace.csv and summary.json");
  run_cmd->add_option("--config", config_path, "path to a JSON run configuration")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides the config and HPROX_OUTPUT_ROOT)");

  auto* verify_cmd = app.add_subcommand("verify", "run the verification checks, write verify.json");
  verify_cmd->add_option("--config", config_path, "path to a JSON run configuration")->required();
  verify_cmd->add_option("--out", out_dir, "output directory");

  std::string sweep_dir;
  unsigned jobs = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every *.json config in a directory");
  sweep_cmd->add_option("--configs", sweep_dir, "directory of configs")->required();
  sweep_cmd->add_option("--jobs", jobs, "parallel runs (default: hardware threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hprox::kExitError;
  }

  try {
    if (*run_cmd) {
      const hprox::RunConfig cfg = hprox::load_config(config_path);
      const auto dir = hprox::resolve_output_dir(cfg, out_dir, config_path);
      const hprox::RunSummary s = hprox::run(cfg, dir);
      std::cout << hprox::to_string(s.termination) << " after " << s.iterations
                << " iterations, f = " << s.final_f << " (" << dir.string() << ")\n";
      if (!s.error.empty()) std::cerr << "error: " << s.error << '\n';
      return hprox::exit_code(s.termination);
    }
    if (*verify_cmd) {
      const hprox::RunConfig cfg = hprox::load_config(config_path);
      const auto dir = hprox::resolve_output_dir(cfg, out_dir, config_path);
      const hprox::VerifyReport rep = hprox::run_verify(cfg, dir);
      for (const auto& c : rep.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << '\n';
      if (!rep.passed()) {
        for (const auto& name : rep.failed()) std::cerr << "verification failed: " << name << '\n';
        return hprox::kExitVerifyFailed;
      }
      return hprox::kExitStationary;
    }
    if (*sweep_cmd) {
      const auto entries = hprox::sweep(sweep_dir, jobs);
      for (const auto& e : entries)
        std::cout << e.exit_code << ' ' << e.config.string() << " -> " << e.output_dir.string()
                  << " : " << e.message << '\n';
      return hprox::sweep_exit_code(entries);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hprox::kExitError;
  }
  return hprox::kExitError;
}
