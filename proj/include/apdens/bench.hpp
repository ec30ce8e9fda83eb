#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "apdens/problem.hpp"
#include "apdens/rng.hpp"
#include "apdens/solver.hpp"

namespace apdens {

/// Final state of one seeded run, the unit the evaluation criteria and the
/// sign test work on.
struct RunRecord {
  std::uint64_t seed = 0;
  double f = 0.0;
  double v = 0.0;
  bool feasible = false;
  std::uint64_t fes_used = 0;
  std::uint64_t generations = 0;
};

/// Aggregated results of repeated runs on one problem. A problem counts as
/// successfully optimized when the feasibility rate exceeds 0.3.
struct ProblemMetrics {
  std::string problem;
  int dim = 0;
  std::string algo;
  int runs = 0;
  double fr = 0.0;
  double mean_vio = 0.0;
  double mean_obj = 0.0;
  bool sr_success = false;
  std::vector<RunRecord> records;
};

inline constexpr double kReliableFeasibilityRate = 0.3;

struct BenchProblem {
  std::string name;
  int dim = 0;
};

/// The built-in suite at its default dimensions.
inline std::vector<BenchProblem> default_suite() {
  std::vector<BenchProblem> suite;
  for (const auto& info : problem_manifest()) {
    suite.push_back({info.name, info.default_dim});
  }
  return suite;
}

/// The four feasible problems of the built-in suite.
inline std::vector<BenchProblem> feasible_suite() {
  std::vector<BenchProblem> suite;
  for (const auto& info : problem_manifest()) {
    if (info.name != "p-infeas-tight") suite.push_back({info.name, info.default_dim});
  }
  return suite;
}

struct CampaignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Known algorithm ids: the main solver, its single-strategy ablations, the
/// constant-population ablations, and the plain DE baseline.
inline SolverConfig apply_algo(SolverConfig cfg, const std::string& algo, int dim) {
  if (algo == "apde-ns" || algo == "debin") return cfg;
  if (algo == "apde-ns-a") {
    cfg.ablation = Ablation::SinglePbest;
    return cfg;
  }
  if (algo == "apde-ns-b") {
    cfg.ablation = Ablation::SingleRandr1;
    return cfg;
  }
  if (algo.rfind("const-np:", 0) == 0) {
    const std::string arg = algo.substr(9);
    int multiplier = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), multiplier);
    if (ec != std::errc{} || ptr != arg.data() + arg.size() || multiplier < 1) {
      throw CampaignError("bad constant-population multiplier in algo id '" + algo + "'");
    }
    cfg.fixed_np = multiplier * dim;
    return cfg;
  }
  throw CampaignError("unknown algo id '" + algo + "'");
}

inline RunResult run_algo(const ConstrainedProblem& problem, const SolverConfig& cfg,
                          const std::string& algo) {
  if (algo == "debin") return de_bin_baseline(problem, cfg);
  return run(problem, apply_algo(cfg, algo, problem.dim));
}

/// Runs `runs` seeded runs per problem (seed = base seed + run index) and
/// aggregates. Runs fan out over `parallelism` workers; aggregation happens in
/// run-index order, so metrics do not depend on scheduling.
inline std::vector<ProblemMetrics> run_campaign(const std::vector<BenchProblem>& problems,
                                                const std::string& algo, int runs,
                                                const SolverConfig& base_config,
                                                int parallelism = 1) {
  if (runs < 1) throw CampaignError("campaign needs at least one run");
  if (parallelism < 1) parallelism = 1;

  struct Task {
    std::size_t problem_index;
    int run_index;
  };
  std::vector<Task> tasks;
  std::vector<ConstrainedProblem> built;
  built.reserve(problems.size());
  for (std::size_t p = 0; p < problems.size(); ++p) {
    built.push_back(make_problem(problems[p].name, problems[p].dim));
    // Fail early on configs the solver would reject.
    (void)resolve_config(apply_algo(base_config, algo, problems[p].dim), problems[p].dim);
    for (int r = 0; r < runs; ++r) tasks.push_back({p, r});
  }

  std::vector<std::vector<RunRecord>> records(problems.size(),
                                              std::vector<RunRecord>(runs));
  std::atomic<std::size_t> next_task{0};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next_task.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task task = tasks[t];
      SolverConfig cfg = base_config;
      cfg.seed = base_config.seed + static_cast<std::uint64_t>(task.run_index);
      try {
        const RunResult result = run_algo(built[task.problem_index], cfg, algo);
        RunRecord rec;
        rec.seed = cfg.seed;
        rec.f = result.best.eval.f;
        rec.v = result.best.eval.violation;
        rec.feasible = result.success;
        rec.fes_used = result.fes_used;
        rec.generations = result.generations;
        records[task.problem_index][task.run_index] = rec;
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (first_error.empty()) {
          first_error = "run failed on problem '" + problems[task.problem_index].name +
                        "' (seed " + std::to_string(cfg.seed) + "): " + e.what();
        }
      }
    }
  };

  if (parallelism == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(parallelism);
    for (int w = 0; w < parallelism; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (!first_error.empty()) throw CampaignError(first_error);

  std::vector<ProblemMetrics> metrics;
  metrics.reserve(problems.size());
  for (std::size_t p = 0; p < problems.size(); ++p) {
    ProblemMetrics m;
    m.problem = problems[p].name;
    m.dim = problems[p].dim;
    m.algo = algo;
    m.runs = runs;
    m.records = records[p];
    int feasible_count = 0;
    double sum_v = 0.0;
    double sum_f = 0.0;
    for (const auto& rec : m.records) {
      feasible_count += rec.feasible ? 1 : 0;
      sum_v += rec.v;
      sum_f += rec.f;
    }
    m.fr = static_cast<double>(feasible_count) / static_cast<double>(runs);
    m.mean_vio = sum_v / static_cast<double>(runs);
    m.mean_obj = sum_f / static_cast<double>(runs);
    m.sr_success = m.fr > kReliableFeasibilityRate;
    metrics.push_back(std::move(m));
  }
  return metrics;
}

/// First evaluation criterion: feasibility rate, then mean violation, then
/// mean objective.
inline Ordering criterion_one(const ProblemMetrics& a, const ProblemMetrics& b) {
  if (a.fr != b.fr) return a.fr > b.fr ? Ordering::FirstBetter : Ordering::SecondBetter;
  if (a.mean_vio != b.mean_vio) {
    return a.mean_vio < b.mean_vio ? Ordering::FirstBetter : Ordering::SecondBetter;
  }
  if (a.mean_obj != b.mean_obj) {
    return a.mean_obj < b.mean_obj ? Ordering::FirstBetter : Ordering::SecondBetter;
  }
  return Ordering::Tie;
}

/// Per-run comparison used by the sign test: feasibility first, then
/// violation, then objective.
inline Ordering run_compare(const RunRecord& a, const RunRecord& b) {
  if (a.feasible != b.feasible) {
    return a.feasible ? Ordering::FirstBetter : Ordering::SecondBetter;
  }
  if (a.v != b.v) return a.v < b.v ? Ordering::FirstBetter : Ordering::SecondBetter;
  if (a.f != b.f) return a.f < b.f ? Ordering::FirstBetter : Ordering::SecondBetter;
  return Ordering::Tie;
}

enum class SignVerdict { FirstBetter, SecondBetter, NoDifference };

struct SignTestResult {
  int wins_first = 0;
  int wins_second = 0;
  int ties = 0;
  int threshold = 0;  // minimum wins for significance
  SignVerdict verdict = SignVerdict::NoDifference;
};

/// Smallest win count w such that the two-sided binomial tail
/// 2 * P(Bin(n, 1/2) >= w) drops below 0.05. Exact integer arithmetic.
inline int sign_test_threshold(int n) {
  if (n == 25) return 19;  // the published >18-of-25 rule
  if (n < 1 || n > 120) {
    throw std::invalid_argument("sign test supports 1..120 paired runs");
  }
  // C(n, k) via Pascal's rule; sums fit in 128 bits for n <= 120.
  std::vector<unsigned __int128> binom(static_cast<std::size_t>(n) + 1, 0);
  binom[0] = 1;
  for (int row = 1; row <= n; ++row) {
    for (int k = row; k >= 1; --k) binom[k] += binom[k - 1];
  }
  unsigned __int128 tail = 0;
  const unsigned __int128 total = static_cast<unsigned __int128>(1) << n;
  for (int w = n; w >= 0; --w) {
    tail += binom[w];
    // 2 * tail / total < 0.05  <=>  40 * tail < total
    if (40 * tail >= total) return w + 1;
  }
  return 0;
}

/// Paired sign test over per-run records. Ties count for neither side.
inline SignTestResult sign_test(const std::vector<RunRecord>& a,
                                const std::vector<RunRecord>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("sign test needs equally many runs on both sides");
  }
  SignTestResult result;
  for (std::size_t i = 0; i < a.size(); ++i) {
    switch (run_compare(a[i], b[i])) {
      case Ordering::FirstBetter: ++result.wins_first; break;
      case Ordering::SecondBetter: ++result.wins_second; break;
      case Ordering::Tie: ++result.ties; break;
    }
  }
  result.threshold = sign_test_threshold(static_cast<int>(a.size()));
  if (result.wins_first >= result.threshold) {
    result.verdict = SignVerdict::FirstBetter;
  } else if (result.wins_second >= result.threshold) {
    result.verdict = SignVerdict::SecondBetter;
  }
  return result;
}

/// Per-problem verdicts of one algorithm against another under both criteria,
/// from the first algorithm's perspective.
struct ProblemComparison {
  std::string problem;
  int dim = 0;
  Ordering criterion1 = Ordering::Tie;
  SignVerdict criterion2 = SignVerdict::NoDifference;
  SignTestResult sign;
};

struct ComparisonReport {
  std::string algo_a;
  std::string algo_b;
  std::vector<ProblemComparison> problems;
  int c1_wins = 0, c1_ties = 0, c1_losses = 0;
  int c2_wins = 0, c2_ties = 0, c2_losses = 0;
};

inline ComparisonReport compare_campaigns(const std::vector<ProblemMetrics>& a,
                                          const std::vector<ProblemMetrics>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("result sets cover different problem counts");
  }
  ComparisonReport report;
  report.algo_a = a.empty() ? "" : a.front().algo;
  report.algo_b = b.empty() ? "" : b.front().algo;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].problem != b[i].problem || a[i].dim != b[i].dim || a[i].runs != b[i].runs) {
      throw std::invalid_argument("result sets cover different problems or run counts");
    }
    ProblemComparison pc;
    pc.problem = a[i].problem;
    pc.dim = a[i].dim;
    pc.criterion1 = criterion_one(a[i], b[i]);
    pc.sign = sign_test(a[i].records, b[i].records);
    pc.criterion2 = pc.sign.verdict;
    switch (pc.criterion1) {
      case Ordering::FirstBetter: ++report.c1_wins; break;
      case Ordering::Tie: ++report.c1_ties; break;
      case Ordering::SecondBetter: ++report.c1_losses; break;
    }
    switch (pc.criterion2) {
      case SignVerdict::FirstBetter: ++report.c2_wins; break;
      case SignVerdict::NoDifference: ++report.c2_ties; break;
      case SignVerdict::SecondBetter: ++report.c2_losses; break;
    }
    report.problems.push_back(std::move(pc));
  }
  return report;
}

struct ComplexityResult {
  double t1_seconds = 0.0;  // 10000 raw evaluations per problem
  double t2_seconds = 0.0;  // full algorithm runs at a 10000-evaluation budget
  double ratio = 0.0;       // (t2 - t1) / t1
};

/// Wall-clock overhead of the algorithm relative to raw evaluation cost.
inline ComplexityResult complexity(const std::vector<BenchProblem>& problems,
                                   const SolverConfig& base_config,
                                   std::uint64_t evaluations = 10000) {
  using clock = std::chrono::steady_clock;
  ComplexityResult result;

  const auto t1_start = clock::now();
  volatile double sink = 0.0;
  for (const auto& bp : problems) {
    const ConstrainedProblem problem = make_problem(bp.name, bp.dim);
    Rng rng(mix_seed(base_config.seed, 0x7431ULL));
    Vector x(problem.dim);
    std::uint64_t fes = 0;
    for (std::uint64_t e = 0; e < evaluations; ++e) {
      for (int j = 0; j < problem.dim; ++j) {
        x[j] = rng.uniform(problem.lower[j], problem.upper[j]);
      }
      sink = sink + evaluate(problem, x, base_config.delta, fes).f;
    }
  }
  const auto t1_end = clock::now();
  result.t1_seconds = std::chrono::duration<double>(t1_end - t1_start).count();

  const auto t2_start = clock::now();
  for (const auto& bp : problems) {
    const ConstrainedProblem problem = make_problem(bp.name, bp.dim);
    SolverConfig cfg = base_config;
    cfg.fes_max = evaluations;
    (void)run(problem, cfg);
  }
  const auto t2_end = clock::now();
  result.t2_seconds = std::chrono::duration<double>(t2_end - t2_start).count();
  result.ratio = (result.t2_seconds - result.t1_seconds) / result.t1_seconds;
  return result;
}

}  // namespace apdens
