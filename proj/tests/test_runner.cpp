#include "hprox/runner.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace hprox;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(HPROX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

} // namespace

TEST_CASE("exit codes") {
  CHECK(exit_code(Termination::Stationary) == 0);
  CHECK(exit_code(Termination::Error) == 1);
  CHECK(exit_code(Termination::MaxIters) == 2);
  CHECK(kExitVerifyFailed == 3);
}

TEST_CASE("prepare picks lambda automatically") {
  const PreparedRun ex = prepare(parse_config(R"({"problem": "paper_example"})"));
  CHECK(ex.lambda == doctest::Approx(1.5 * ex.lipschitz_estimate));
  CHECK(ex.threshold == ex.lipschitz_estimate);
  CHECK(ex.lipschitz_estimate == doctest::Approx(1.1 * 0.3090047859633761).epsilon(1e-3));
  CHECK(ex.start[0] == 5.0 / 16.0);

  const PreparedRun clipped = prepare(parse_config(R"({"problem": "paper_example", "lambda_bar": 0.4})"));
  CHECK(clipped.lambda == 0.4);
  const PreparedRun abs = prepare(parse_config(R"({"problem": "abs"})"));
  CHECK(abs.lambda == 1.0);
  CHECK(abs.threshold == 0.0);
  CHECK_THROWS_AS(prepare(parse_config(R"({"problem": "abs", "start_point": [1, 2]})")), ConfigError);
}

TEST_CASE("execute the documented examples") {
  const RunOutcome ex = execute(parse_config(R"({"problem": "paper_example"})"));
  CHECK(ex.summary.termination == Termination::Stationary);
  CHECK(std::abs(ex.summary.final_point[0] - 1.0) <= 1e-4);
  CHECK(ex.summary.final_f <= 1e-8);

  const RunOutcome abs = execute(parse_config(R"({"problem": "abs", "start_point": [5], "lambda": 1})"));
  CHECK(abs.summary.termination == Termination::Stationary);
  REQUIRE(abs.trace.has_value());
  for (int k = 0; k < 5; ++k) CHECK(abs.trace->records[k].step_dist == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(abs.summary.final_point[0] == doctest::Approx(0.0));

  const RunOutcome q = execute(parse_config(R"({"problem": "quadratic", "start_point": [1], "lambda": 1})"));
  REQUIRE(q.trace.has_value());
  for (const IterationRecord& r : q.trace->records)
    CHECK(r.point[0] == doctest::Approx(std::ldexp(1.0, -(r.k + 1))).epsilon(1e-8));

  const RunOutcome capped = execute(parse_config(R"({"problem": "quadratic", "max_outer": 2})"));
  CHECK(capped.summary.termination == Termination::MaxIters);
  CHECK(exit_code(capped.summary.termination) == 2);

  const RunOutcome low = execute(parse_config(R"({"problem": "paper_example", "lambda": 0.1})"));
  CHECK(low.summary.termination == Termination::Error);
  CHECK(low.summary.error.find("lambda") != std::string::npos);
}

TEST_CASE("trace.csv and summary.json agree") {
  TempDir tmp("hprox_test_run");
  const RunConfig cfg = parse_config(R"({"problem": "quadratic", "start_point": [1], "lambda": 1})");
  const RunSummary s = run(cfg, tmp.path / "a");
  const auto rows = csv_rows(slurp(tmp.path / "a" / "trace.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"k", "x0", "f", "step_dist", "residual", "lambda",
                                            "inner_iters", "subgrad_norm"});
  CHECK(static_cast<int>(rows.size()) - 1 == s.iterations);
  const nlohmann::json j = nlohmann::json::parse(slurp(tmp.path / "a" / "summary.json"));
  CHECK(j["termination"] == "Stationary");
  CHECK(j["iterations"] == s.iterations);
  // final_f equals the last row's f exactly (17 significant digits round-trip).
  CHECK(j["final_f"].get<double>() == std::stod(rows.back()[2]));
  CHECK(j["final_point"][0].get<double>() == std::stod(rows.back()[1]));
  CHECK(j["final_residual"].get<double>() == std::stod(rows.back()[4]));
  CHECK(j["lambda_used"] == 1.0);
  CHECK(j.contains("wall_time_ms"));
  CHECK(j.contains("lipschitz_estimate"));
  CHECK(j["settings"]["outer_tol"] == 1e-8);
}

TEST_CASE("runs are byte-identical for identical configs") {
  TempDir tmp("hprox_test_determinism");
  const RunConfig cfg = parse_config(R"({"problem": {"builtin": "paper_example_product", "n": 2}, "seed": 3})");
  run(cfg, tmp.path / "a");
  run(cfg, tmp.path / "b");
  CHECK(slurp(tmp.path / "a" / "trace.csv") == slurp(tmp.path / "b" / "trace.csv"));
}

TEST_CASE("verify passes on the builtins") {
  for (const char* text : {R"({"problem": "paper_example"})", R"({"problem": "quadratic"})",
                           R"({"problem": "abs"})"}) {
    const VerifyReport r = verify(parse_config(text));
    INFO(r.to_json().dump(1));
    CHECK(r.passed());
    CHECK(r.checks.size() == 6);
  }
}

TEST_CASE("verify fails the strong convexity check for lambda below the threshold") {
  const VerifyReport r = verify(parse_config(R"({"problem": "paper_example", "lambda": 0.1})"));
  CHECK_FALSE(r.passed());
  const std::vector<std::string> failed = r.failed();
  CHECK(std::find(failed.begin(), failed.end(), "strong_convexity") != failed.end());
  const nlohmann::json j = r.to_json();
  CHECK(j["passed"] == false);
}

TEST_CASE("prox steps agree with the dense grid") {
  const PreparedRun pr = prepare(parse_config(R"({"problem": "paper_example"})"));
  const ProxGridReport g = compare_prox_with_grid(pr.problem, pr.threshold, pr.lambda, 10, 5, pr.prox);
  CHECK(g.subproblems == 10);
  CHECK(g.passed());
}

TEST_CASE("output directory resolution") {
  RunConfig cfg = parse_config(R"({"problem": "abs"})");
  unsetenv(kOutputRootEnv);
  CHECK(resolve_output_dir(cfg, "x/y", "c.json") == fs::path("x/y"));
  CHECK(resolve_output_dir(cfg, "", "dir/c.json") == fs::path("runs/c"));
  setenv(kOutputRootEnv, "/tmp/root", 1);
  CHECK(resolve_output_dir(cfg, "", "dir/c.json") == fs::path("/tmp/root/c"));
  cfg.output_dir = "rel";
  CHECK(resolve_output_dir(cfg, "", "c.json") == fs::path("/tmp/root/rel"));
  cfg.output_dir = "/abs";
  CHECK(resolve_output_dir(cfg, "", "c.json") == fs::path("/abs"));
  unsetenv(kOutputRootEnv);
}

TEST_CASE("sweep runs each config into its own directory") {
  TempDir tmp("hprox_test_sweep");
  const fs::path cfgs = tmp.path / "configs";
  fs::create_directories(cfgs);
  write(cfgs / "a.json", R"({"problem": "abs"})");
  write(cfgs / "b.json", R"({"problem": "quadratic", "max_outer": 2})");
  write(cfgs / "c.json", R"({"problem": "abs", "oops": 1})");
  write(cfgs / "d.json", R"({"problem": "abs", "output_dir": "a"})");
  setenv(kOutputRootEnv, (tmp.path / "out").c_str(), 1);
  const std::vector<SweepEntry> e = sweep(cfgs, 2);
  unsetenv(kOutputRootEnv);
  REQUIRE(e.size() == 4);
  CHECK(e[0].exit_code == 0);
  CHECK(e[1].exit_code == 2);
  CHECK(e[2].exit_code == 1);
  CHECK(e[3].exit_code == 1);  // collides with a.json's directory
  CHECK(fs::exists(tmp.path / "out" / "a" / "trace.csv"));
  CHECK(fs::exists(tmp.path / "out" / "b" / "summary.json"));
  CHECK(sweep_exit_code(e) == 1);
}

TEST_CASE("command-line exit codes") {
  TempDir tmp("hprox_test_cli");
  write(tmp.path / "ok.json", R"({"problem": "paper_example"})");
  write(tmp.path / "cap.json", R"({"problem": "quadratic", "max_outer": 2})");
  write(tmp.path / "bad.json", R"({"problem": "paper_example", "outer_tol": -1})");
  write(tmp.path / "low.json", R"({"problem": "paper_example", "lambda": 0.1})");
  const std::string out = " --out " + (tmp.path / "out").string();
  CHECK(cli("run --config " + (tmp.path / "ok.json").string() + out) == 0);
  CHECK(fs::exists(tmp.path / "out" / "trace.csv"));
  CHECK(cli("run --config " + (tmp.path / "cap.json").string() + out) == 2);
  CHECK(cli("run --config " + (tmp.path / "bad.json").string() + out) == 1);
  CHECK(cli("run --config " + (tmp.path / "missing.json").string() + out) == 1);
  CHECK(cli("run --config " + (tmp.path / "low.json").string() + out) == 1);
  CHECK(cli("verify --config " + (tmp.path / "ok.json").string() + out) == 0);
  CHECK(fs::exists(tmp.path / "out" / "verify.json"));
  CHECK(cli("verify --config " + (tmp.path / "low.json").string() + out) == 3);
  CHECK(cli("frobnicate") == 1);
}
