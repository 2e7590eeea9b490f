// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "hprox/oracle.hpp"
#include "hprox/problems.hpp"
#include "hprox/prox.hpp"
#include "hprox/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace hprox;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& what) {
  std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

void guarded(const char* id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const RunConfig& example_config() {
  static const RunConfig cfg = parse_config(R"({"problem": "paper_example", "start_point": [0.3125]})");
  return cfg;
}

} // namespace

int main() {
  const PreparedRun ex = prepare(example_config());
  const MaxObjective& f = ex.problem.objective;
  const double lhat = ex.lipschitz_estimate;

  std::optional<RunOutcome> run1;
  guarded("AC1", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    run1 = execute(example_config());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const RunSummary& s = run1->summary;
    const oracle::GridResult g = oracle::grid_minimize(
        [&](const Point& p) { return eval_f(f, p).value; }, f.manifold, {{0.125}, {4.0}, 100000});
    const bool ok = s.termination == Termination::Stationary && std::abs(s.final_point.at(0) - 1.0) <= 1e-4 &&
                    s.final_f <= 1e-8 && s.iterations <= 10000 && secs < 1.0 &&
                    std::abs(g.point[0] - 1.0) <= 1e-4 && std::abs(g.value) <= 1e-8;
    report("AC1", ok,
           fmt("example: x = %.12g, f = %.3g, %g iterations, %.3f s", s.final_point.at(0), s.final_f,
               s.iterations, secs) +
               fmt(" (grid oracle x = %.10g, f = %.3g)", g.point[0], g.value));
  });

  guarded("AC2", [&] {
    if (!run1 || !run1->trace) throw std::runtime_error("run 1 unavailable");
    const Trace& t = *run1->trace;
    double sum_sq = 0.0, lam_min = INFINITY;
    for (const IterationRecord& r : t.records) {
      sum_sq += r.step_dist * r.step_dist;
      lam_min = std::min(lam_min, r.lambda);
    }
    const double f0 = eval_f(f, t.start).value;
    const double bound = 2.0 * (f0 - 0.0) / lam_min + 1e-6;
    const double last = t.records.back().residual;
    report("AC2", last <= 1e-8 && sum_sq <= bound,
           fmt("final residual %.3g; sum d^2 = %.6g <= %.6g", last, sum_sq, bound));
  });

  guarded("AC3", [&] {
    const RunOutcome a = execute(parse_config(R"({"problem": "abs", "start_point": [5], "lambda": 1})"));
    double err_abs = 0.0;
    const std::vector<double> want{4, 3, 2, 1, 0};
    bool shape = a.trace && a.trace->records.size() >= want.size() && a.trace->start[0] == 5.0;
    if (shape)
      for (std::size_t i = 0; i < want.size(); ++i)
        err_abs = std::max(err_abs, std::abs(a.trace->records[i].point[0] - want[i]));
    const RunOutcome q = execute(parse_config(
        R"({"problem": "quadratic", "start_point": [1], "lambda": 1, "outer_tol": 1e-14, "inner_tol": 1e-15})"));
    double err_q = 0.0;
    int checked = 0;
    if (q.trace && q.trace->records.size() >= 40) {
      err_q = std::abs(q.trace->start[0] - 1.0);
      for (const IterationRecord& r : q.trace->records) {
        const int k = r.k + 1;
        if (k > 40) break;
        err_q = std::max(err_q, std::abs(r.point[0] - std::ldexp(1.0, -k)));
        ++checked;
      }
    }
    report("AC3", shape && err_abs <= 1e-8 && checked == 40 && err_q <= 1e-8,
           fmt("abs 5,4,3,2,1,0 max error %.3g; quadratic 2^-k for k <= 40 max error %.3g", err_abs, err_q));
  });

  guarded("AC4", [&] {
    const oracle::GeometryReport l = oracle::geometry_suite(
        Manifold::log_positive(3), {{1e-2, 1e-2, 1e-2}, {1e2, 1e2, 1e2}}, 10000, 100, 1);
    const oracle::GeometryReport e =
        oracle::geometry_suite(Manifold::euclidean(3), {{-10, -10, -10}, {10, 10, 10}}, 10000, 100, 2);
    const double id = std::max({l.roundtrip, l.metric, l.isometry, l.triangle_excess, e.roundtrip, e.metric,
                                e.isometry, e.triangle_excess});
    const double fd = std::max(l.grad_half_sq, e.grad_half_sq);
    report("AC4", l.passed(1e-10, 1e-6) && e.passed(1e-10, 1e-6),
           fmt("10000 samples per manifold: worst identity error %.3g, grad_half_sq_dist vs fd %.3g", id, fd));
  });

  guarded("AC5", [&] {
    std::mt19937_64 rng(5);
    const Point anchor = oracle::sample_point(f.manifold, ex.problem.region, rng);
    const auto field = [&](double lam) {
      return [h = with_prox_term(f, anchor, lam)](const Point& p) { return eval_f(h, p).value; };
    };
    const double lam_pos = lhat + 1.0;
    const oracle::ConvexityReport pos =
        oracle::geodesic_convexity_test(field(lam_pos), f.manifold, ex.problem.region, 1000, lam_pos - lhat, 42);
    const oracle::ConvexityReport neg =
        oracle::geodesic_convexity_test(field(0.5 * lhat), f.manifold, ex.problem.region, 1000, lam_pos - lhat, 42);
    report("AC5", pos.violations == 0 && neg.violations > 0,
           fmt("lambda = L+1: %g violations (worst %.3g); lambda = L/2: %g violations", pos.violations,
               pos.worst_violation, neg.violations));
  });

  guarded("AC6", [&] {
    const std::vector<Point> pts = oracle::sample_points(f.manifold, ex.problem.region, 100, 6);
    std::mt19937_64 rng(60);
    const Point anchor = oracle::sample_point(f.manifold, ex.problem.region, rng);
    const double err = oracle::sum_rule_discrepancy(f, pts, anchor, ex.lambda, 61);
    report("AC6", err <= 1e-8, fmt("sum rule at 100 points: max discrepancy %.3g", err));
  });

  guarded("AC7", [&] {
    const problems::Problem q = problems::quadratic_problem();
    const std::vector<Point> pts = oracle::sample_points(q.objective.manifold, q.region, 100, 7);
    std::mt19937_64 rng(70);
    double worst = 0.0;
    const double t = 1e-7;
    for (const Point& p : pts) {
      const Tangent v = oracle::random_tangent(p, 1.0, rng);
      const double fd = (eval_f(q.objective, geodesic(p, v, t)).value - eval_f(q.objective, p).value) / t;
      worst = std::max(worst, std::abs(gen_dir_derivative(q.objective, p, v) - fd));
    }
    report("AC7", worst <= 1e-6, fmt("quadratic: max |f°(p,v) - one-sided fd| = %.3g at 100 points", worst));
  });

  guarded("AC8", [&] {
    const ProxGridReport g = compare_prox_with_grid(ex.problem, ex.threshold, 1.05 * ex.threshold, 50, 8, ex.prox);
    report("AC8", g.subproblems == 50 && g.passed(1e-4, 1e-8),
           fmt("%g subproblems: max point error %.3g, max value error %.3g", g.subproblems, g.max_point_error,
               g.max_value_error));
  });

  guarded("AC9", [&] {
    const Point one(f.manifold, {1.0});
    const oracle::UscReport up = oracle::usc_sampler(f, one, Tangent(one, {1.0}), 1000);
    const oracle::UscReport dn = oracle::usc_sampler(f, one, Tangent(one, {-1.0}), 1000);
    report("AC9", up.passed && dn.passed,
           fmt("v=+1: tail %.9g vs f° %.9g; v=-1: tail %.9g vs f° %.9g", up.tail_max, up.reference, dn.tail_max,
               dn.reference));
  });

  guarded("AC10", [&] {
    const fs::path dir = fs::temp_directory_path() / "hprox_acceptance_determinism";
    fs::remove_all(dir);
    run(example_config(), dir / "a");
    run(example_config(), dir / "b");
    const std::string a = slurp(dir / "a" / "trace.csv");
    const std::string b = slurp(dir / "b" / "trace.csv");
    fs::remove_all(dir);
    report("AC10", !a.empty() && a == b, fmt("trace.csv of two identical runs: %g bytes, identical", a.size()));
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
