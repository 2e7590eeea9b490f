#include "hprox/runner.hpp"

#include "hprox/errors.hpp"
#include "hprox/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace hprox {

using nlohmann::json;

int exit_code(Termination t) {
  switch (t) {
  case Termination::Stationary: return kExitStationary;
  case Termination::MaxIters: return kExitMaxIters;
  case Termination::Error: return kExitError;
  }
  return kExitError;
}

namespace {

// Tail points sit within 2/n of the probe; f° of a smooth piece moves about
// L times that, so n = 10000 keeps unit-curvature problems well inside 1e-3.
constexpr int kVerifyUscSamples = 10000;

Point to_point(const Manifold& m, const std::vector<double>& coords, const char* field) {
  if (coords.size() != m.dim()) {
    std::ostringstream os;
    os << "field '" << field << "': expected " << m.dim() << " coordinates for " << m;
    throw ConfigError(os.str());
  }
  return Point(m, coords);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

} // namespace

PreparedRun prepare(const RunConfig& cfg) {
  problems::Problem prob = make_problem(cfg.problem);
  const Manifold& m = prob.objective.manifold;
  Point start = cfg.start_point ? to_point(m, *cfg.start_point, "start_point") : prob.default_start;
  std::optional<Point> level_ref;
  if (cfg.level_ref) level_ref = to_point(m, *cfg.level_ref, "level_ref");

  const double lip = estimate_sup_lipschitz(prob.objective, prob.region_samples);
  const double threshold = prox_threshold(prob.objective, lip);
  double lambda = 0.0;
  if (cfg.lambda) {
    lambda = *cfg.lambda;
  } else {
    lambda = std::min(lip > 0.0 ? 1.5 * lip : 1.0, cfg.lambda_bar);
  }
  ProxConfig prox{cfg.outer_tol, cfg.inner_tol, cfg.max_outer, cfg.max_inner, cfg.level_guard};
  prox.validate();
  return PreparedRun{std::move(prob), std::move(start), lip, threshold, lambda, prox,
                     std::move(level_ref)};
}

RunOutcome execute(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  RunSummary& s = out.summary;
  try {
    PreparedRun pr = prepare(cfg);
    s.lambda_used = pr.lambda;
    s.lipschitz_estimate = pr.lipschitz_estimate;
    s.prox_threshold = pr.threshold;
    s.final_point = pr.start.coords();
    const LambdaSchedule sched = LambdaSchedule::constant(pr.lambda, pr.threshold, cfg.lambda_bar);
    Trace trace = solve(pr.problem.objective, pr.start, sched, pr.prox, pr.level_ref);
    s.termination = trace.termination;
    s.error = trace.error;
    s.iterations = static_cast<int>(trace.records.size());
    if (trace.records.empty()) {
      s.final_f = eval_f(pr.problem.objective, pr.start).value;
    } else {
      const IterationRecord& last = trace.records.back();
      s.final_point = last.point.coords();
      s.final_f = last.f_value;
      s.final_residual = last.residual;
    }
    out.trace = std::move(trace);
  } catch (const Error& e) {
    s.termination = Termination::Error;
    s.error = e.what();
    s.final_f = std::numeric_limits<double>::quiet_NaN();
  }
  s.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream os;
  os << "k";
  for (std::size_t i = 0; i < trace.start.dim(); ++i) os << ",x" << i;
  os << ",f,step_dist,residual,lambda,inner_iters,subgrad_norm\n";
  for (const IterationRecord& r : trace.records) {
    os << r.k;
    for (double x : r.point.coords()) os << ',' << fmt17(x);
    os << ',' << fmt17(r.f_value) << ',' << fmt17(r.step_dist) << ',' << fmt17(r.residual) << ','
       << fmt17(r.lambda) << ',' << r.inner_iters << ',' << fmt17(r.subgrad_norm) << '\n';
  }
  return os.str();
}

json summary_json(const RunSummary& s, const RunConfig& cfg) {
  json j;
  j["termination"] = to_string(s.termination);
  if (!s.error.empty()) j["error"] = s.error;
  j["iterations"] = s.iterations;
  j["final_point"] = s.final_point;
  j["final_f"] = number_or_null(s.final_f);
  j["final_residual"] = s.final_residual ? json(*s.final_residual) : json(nullptr);
  j["wall_time_ms"] = s.wall_time_ms;
  j["lambda_used"] = s.lambda_used;
  j["lipschitz_estimate"] = s.lipschitz_estimate;
  j["prox_threshold"] = s.prox_threshold;
  j["settings"] = {{"problem", cfg.problem.builtin},
                   {"lambda_mode", cfg.lambda ? "value" : "auto"},
                   {"lambda_bar", cfg.lambda_bar},
                   {"outer_tol", cfg.outer_tol},
                   {"inner_tol", cfg.inner_tol},
                   {"max_outer", cfg.max_outer},
                   {"max_inner", cfg.max_inner},
                   {"seed", cfg.seed}};
  try {
    const problems::Problem prob = make_problem(cfg.problem);
    if (!prob.metadata.empty()) j["problem_metadata"] = prob.metadata;
  } catch (const Error&) {
  }
  return j;
}

RunSummary run(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  RunOutcome out = execute(cfg);
  std::filesystem::create_directories(out_dir);
  if (out.trace) write_file(out_dir / "trace.csv", trace_csv(*out.trace));
  write_file(out_dir / "summary.json", summary_json(out.summary, cfg).dump(2) + "\n");
  return out.summary;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> VerifyReport::failed() const {
  std::vector<std::string> out;
  for (const CheckResult& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

json VerifyReport::to_json() const {
  json j;
  j["problem"] = problem;
  j["passed"] = passed();
  j["failed"] = failed();
  j["checks"] = json::array();
  for (const CheckResult& c : checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j;
}

ProxGridReport compare_prox_with_grid(const problems::Problem& problem, double threshold,
                                      double lambda_floor, int count, std::uint64_t seed,
                                      const ProxConfig& cfg) {
  const MaxObjective& obj = problem.objective;
  if (obj.manifold.dim() != 1) throw ContractError("prox/grid comparison needs dim 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const oracle::GridSpec grid{problem.region.lower, problem.region.upper, 100000};
  ProxGridReport rep;
  while (rep.subproblems < count) {
    const Point pk = oracle::sample_point(obj.manifold, problem.region, rng);
    const double lambda = lambda_floor * (1.0 + 2.0 * unif(rng));
    if (!obj.domain.contains(pk)) continue;
    const MaxObjective h = with_prox_term(obj, pk, lambda);
    const auto field = [&](const Point& p) { return eval_f(h, p).value; };
    const StepResult step = prox_step(obj, pk, lambda, threshold, cfg);
    const oracle::GridResult ref = oracle::grid_minimize(field, obj.manifold, grid);
    rep.max_point_error = std::max(rep.max_point_error, std::abs(step.p_next[0] - ref.point[0]));
    rep.max_value_error = std::max(rep.max_value_error, std::abs(field(step.p_next) - ref.value));
    ++rep.subproblems;
  }
  return rep;
}

VerifyReport verify(const RunConfig& cfg) {
  const PreparedRun pr = prepare(cfg);
  const problems::Problem& prob = pr.problem;
  const MaxObjective& obj = prob.objective;
  const Manifold& m = obj.manifold;
  VerifyReport rep;
  rep.problem = cfg.problem.builtin;
  std::mt19937_64 rng(cfg.seed);

  auto domain_points = [&](std::size_t n, std::uint64_t seed) {
    std::vector<Point> pts;
    for (Point& p : oracle::sample_points(m, prob.region, 4 * n, seed)) {
      if (obj.domain.contains(p)) pts.push_back(std::move(p));
      if (pts.size() == n) break;
    }
    return pts;
  };

  {
    const oracle::GeometryReport g = oracle::geometry_suite(m, prob.region, 1000, 100, cfg.seed);
    rep.checks.push_back({"geometry", g.passed(),
                          {{"samples", g.samples},
                           {"roundtrip", g.roundtrip},
                           {"metric", g.metric},
                           {"isometry", g.isometry},
                           {"triangle_excess", g.triangle_excess},
                           {"grad_half_sq_dist_fd", g.grad_half_sq},
                           {"differential_exp_fd", g.dexp}}});
  }
  {
    const double err = oracle::check_piece_gradients(obj, domain_points(100, cfg.seed + 1));
    rep.checks.push_back({"fd_gradient", err <= 1e-6, {{"max_relative_error", err}, {"tol", 1e-6}}});
  }
  {
    const double mu = pr.lambda - pr.threshold;
    const std::vector<Point> anchors = domain_points(5, cfg.seed + 2);
    json per_anchor = json::array();
    bool ok = mu > 0.0;
    const double modulus = std::max(mu, 0.0);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      const MaxObjective h = with_prox_term(obj, anchors[a], pr.lambda);
      const oracle::ConvexityReport c = oracle::geodesic_convexity_test(
          [&](const Point& p) { return eval_f(h, p).value; }, m, prob.region, 200, modulus,
          cfg.seed + 10 + a);
      ok = ok && c.passed();
      per_anchor.push_back({{"checks", c.checks},
                            {"violations", c.violations},
                            {"worst_violation", c.worst_violation}});
    }
    json detail{{"lambda", pr.lambda},
                {"threshold", pr.threshold},
                {"modulus", mu},
                {"anchors", per_anchor}};
    if (!(mu > 0.0)) detail["reason"] = "lambda does not exceed the prox threshold; no strong convexity modulus";
    rep.checks.push_back({"strong_convexity", ok, detail});
  }
  {
    const std::vector<Point> anchor = domain_points(1, cfg.seed + 3);
    const double err =
        oracle::sum_rule_discrepancy(obj, domain_points(100, cfg.seed + 4), anchor.at(0), pr.lambda,
                                     cfg.seed + 5);
    rep.checks.push_back({"sum_rule", err <= 1e-8, {{"max_discrepancy", err}, {"tol", 1e-8}}});
  }
  {
    json runs = json::array();
    bool ok = true;
    std::vector<Point> probes = prob.probe_points;
    if (probes.empty() && obj.domain.contains(pr.start)) probes.push_back(pr.start);
    for (const Point& p : probes) {
      if (!obj.domain.contains(p)) continue;
      std::vector<Tangent> dirs;
      const Tangent e = Tangent::basis(p, 0);
      dirs.push_back((1.0 / norm(p, e)) * e);
      dirs.push_back((-1.0 / norm(p, e)) * e);
      if (m.dim() > 1) {
        dirs.push_back(oracle::random_tangent(p, 1.0, rng));
        dirs.push_back(oracle::random_tangent(p, 1.0, rng));
      }
      for (const Tangent& v : dirs) {
        const oracle::UscReport u = oracle::usc_sampler(obj, p, v, kVerifyUscSamples, cfg.seed);
        ok = ok && u.passed;
        runs.push_back({{"point", p.coords()},
                        {"direction", v.coords()},
                        {"reference", u.reference},
                        {"tail_max", u.tail_max},
                        {"difference", u.difference},
                        {"discarded", u.discarded}});
      }
    }
    rep.checks.push_back({"usc", ok,
                          {{"runs", runs},
                           {"tol", oracle::kUscTolerance},
                           {"n", kVerifyUscSamples},
                           {"note", "sampled evidence, not a proof"}}});
  }
  if (m.dim() == 1) {
    const double floor = std::max(pr.lambda, 1.05 * pr.threshold + 1e-6);
    json detail;
    bool ok = false;
    try {
      const ProxGridReport g = compare_prox_with_grid(prob, pr.threshold, floor, 20, cfg.seed + 6, pr.prox);
      ok = g.passed();
      detail = {{"subproblems", g.subproblems},
                {"max_point_error", g.max_point_error},
                {"max_value_error", g.max_value_error}};
    } catch (const Error& e) {
      detail = {{"error", e.what()}};
    }
    rep.checks.push_back({"prox_vs_grid", ok, detail});
  } else {
    rep.checks.push_back({"prox_vs_grid", true, {{"skipped", "dimension > 1"}}});
  }
  return rep;
}

VerifyReport run_verify(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  VerifyReport rep = verify(cfg);
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "verify.json", rep.to_json().dump(2) + "\n");
  return rep;
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::string& cli_override,
                                         const std::filesystem::path& config_path) {
  if (!cli_override.empty()) return cli_override;
  const char* env = std::getenv(kOutputRootEnv);
  const std::filesystem::path root = env && *env ? std::filesystem::path(env) : "runs";
  if (!cfg.output_dir.empty()) {
    const std::filesystem::path out(cfg.output_dir);
    return out.is_relative() && env && *env ? root / out : out;
  }
  return root / config_path.stem();
}

std::vector<SweepEntry> sweep(const std::filesystem::path& dir, unsigned jobs) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<SweepEntry> entries;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") entries.push_back({e.path(), {}, kExitError, {}});
  std::sort(entries.begin(), entries.end(),
            [](const SweepEntry& a, const SweepEntry& b) { return a.config < b.config; });

  std::vector<std::optional<RunConfig>> configs(entries.size());
  std::set<std::filesystem::path> claimed;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      configs[i] = load_config(entries[i].config);
      entries[i].output_dir = resolve_output_dir(*configs[i], "", entries[i].config);
      if (!claimed.insert(std::filesystem::weakly_canonical(entries[i].output_dir)).second) {
        entries[i].message = "output directory already used by another config in this sweep";
        configs[i].reset();
      }
    } catch (const Error& e) {
      entries[i].message = e.what();
      configs[i].reset();
    }
  }

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      if (!configs[i]) continue;
      try {
        const RunSummary s = run(*configs[i], entries[i].output_dir);
        entries[i].exit_code = exit_code(s.termination);
        entries[i].message = s.error.empty() ? to_string(s.termination) : s.error;
      } catch (const std::exception& e) {
        entries[i].exit_code = kExitError;
        entries[i].message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, entries.size()); ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return entries;
}

int sweep_exit_code(const std::vector<SweepEntry>& entries) {
  int code = kExitStationary;
  for (const SweepEntry& e : entries) {
    if (e.exit_code == kExitError) return kExitError;
    if (e.exit_code == kExitMaxIters) code = kExitMaxIters;
  }
  return code;
}

} // namespace hprox
