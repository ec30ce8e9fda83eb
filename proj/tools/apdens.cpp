// Command-line front end: single runs, benchmark campaigns, comparisons,
// ablations, complexity measurement, and the problem manifest.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apdens/apdens.hpp"

namespace {

using namespace apdens;

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  std::string format = "csv";
};

SolverConfig effective_config(const GlobalOptions& opts) {
  SolverConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config_file(opts.config_path, cfg);
  std::map<std::string, std::string> entries;
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw BadConfig("override '" + item + "' is not of the form key=value");
    }
    entries[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return apply_config_entries(cfg, entries);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::vector<BenchProblem> parse_suite(const std::string& suite) {
  if (suite == "all") return default_suite();
  if (suite == "feasible") return feasible_suite();
  // comma-separated name:dim entries
  std::vector<BenchProblem> out;
  std::stringstream stream(suite);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto colon = item.find(':');
    BenchProblem bp;
    if (colon == std::string::npos) {
      bp.name = item;
      bp.dim = problem_info(item).default_dim;
    } else {
      bp.name = item.substr(0, colon);
      bp.dim = std::stoi(item.substr(colon + 1));
    }
    out.push_back(bp);
  }
  if (out.empty()) throw std::invalid_argument("empty problem suite");
  return out;
}

int run_bench(const GlobalOptions& opts, const std::string& suite, const std::string& algo,
              int runs, int parallel, const std::string& stem) {
  const SolverConfig cfg = effective_config(opts);
  const auto problems = parse_suite(suite);
  const auto metrics = run_campaign(problems, algo, runs, cfg, parallel);

  const std::filesystem::path dir(opts.out_dir);
  write_file(dir / (stem + ".csv"), metrics_to_csv(metrics));
  write_file(dir / (stem + ".json"), metrics_to_json(metrics).dump(2) + "\n");

  int successes = 0;
  for (const auto& m : metrics) {
    std::printf("%-16s D=%-3d FR=%.4f mean_vio=%s mean_obj=%s %s\n", m.problem.c_str(), m.dim,
                m.fr, format_double(m.mean_vio).c_str(), format_double(m.mean_obj).c_str(),
                m.sr_success ? "success" : "failure");
    successes += m.sr_success ? 1 : 0;
  }
  const int total = static_cast<int>(metrics.size());
  std::printf("SR: %.2f%% (%d/%d)  Failure(f): %d\n",
              100.0 * static_cast<double>(successes) / static_cast<double>(total), successes,
              total, total - successes);
  std::printf("wrote %s and %s\n", (dir / (stem + ".csv")).c_str(),
              (dir / (stem + ".json")).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"state-switching differential evolution for constrained optimization"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "flat key=value config file");
  app.add_option("--set", opts.overrides, "config override key=value (repeatable)");
  app.add_option("--out", opts.out_dir, "output directory")
      ->envname("APDENS_OUT_DIR")
      ->capture_default_str();
  app.add_option("--format", opts.format, "table format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "single seeded run, prints a summary line");
  std::string problem_name;
  int dim = 0;
  std::uint64_t seed_flag = 0;
  bool have_seed = false;
  std::string algo = "apde-ns";
  solve->add_option("--problem", problem_name, "problem name")->required();
  solve->add_option("--dim", dim, "problem dimension (default: the problem's default)");
  auto* seed_opt = solve->add_option("--seed", seed_flag, "run seed");
  solve->add_option("--algo", algo, "apde-ns|debin|apde-ns-a|apde-ns-b|const-np:M")
      ->capture_default_str();
  solve->callback([&]() { have_seed = seed_opt->count() > 0; });

  // bench
  auto* bench = app.add_subcommand("bench", "multi-run campaign over a problem suite");
  std::string suite = "all";
  int runs = 25;
  int parallel = 1;
  std::string bench_algo = "apde-ns";
  bench->add_option("--suite", suite, "all|feasible|name[:dim],...")->capture_default_str();
  bench->add_option("--runs", runs, "independent runs per problem")->capture_default_str();
  bench->add_option("--parallel", parallel, "worker threads")->capture_default_str();
  bench->add_option("--algo", bench_algo, "apde-ns|debin|apde-ns-a|apde-ns-b|const-np:M")
      ->capture_default_str();

  // ablate
  auto* ablate = app.add_subcommand("ablate", "campaign for an ablation variant");
  std::string ablate_id;
  ablate->add_option("--id", ablate_id, "apde-ns-a|apde-ns-b|const-np:M")->required();
  ablate->add_option("--suite", suite, "all|feasible|name[:dim],...");
  ablate->add_option("--runs", runs, "independent runs per problem");
  ablate->add_option("--parallel", parallel, "worker threads");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "criterion-I and sign-test verdicts");
  std::string file_a, file_b;
  compare_cmd->add_option("result_a", file_a, "campaign JSON of algorithm A")->required();
  compare_cmd->add_option("result_b", file_b, "campaign JSON of algorithm B")->required();

  // complexity
  auto* complexity_cmd = app.add_subcommand("complexity", "T1/T2 overhead measurement");

  // problems
  auto* problems_cmd = app.add_subcommand("problems", "print the problem manifest as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      SolverConfig cfg = effective_config(opts);
      if (have_seed) cfg.seed = seed_flag;
      const ProblemInfo info = problem_info(problem_name);
      const int d = dim > 0 ? dim : info.default_dim;
      const ConstrainedProblem problem = make_problem(problem_name, d);
      const RunResult result = run_algo(problem, apply_algo(cfg, algo, d), algo);

      const std::filesystem::path trace_path =
          std::filesystem::path(opts.out_dir) /
          ("trace_" + info.name + "_d" + std::to_string(d) + "_s" + std::to_string(cfg.seed) +
           ".csv");
      write_file(trace_path, trace_to_csv(result.trace));
      std::printf("problem=%s dim=%d seed=%llu f=%s v=%s feasible=%s fes=%llu generations=%llu\n",
                  info.name.c_str(), d, static_cast<unsigned long long>(cfg.seed),
                  format_double(result.best.eval.f).c_str(),
                  format_double(result.best.eval.violation).c_str(),
                  result.success ? "yes" : "no",
                  static_cast<unsigned long long>(result.fes_used),
                  static_cast<unsigned long long>(result.generations));
      std::printf("trace: %s\n", trace_path.c_str());
      return result.success ? 0 : 2;
    }

    if (bench->parsed()) {
      return run_bench(opts, suite, bench_algo, runs, parallel, "bench_" + bench_algo);
    }

    if (ablate->parsed()) {
      std::string stem = "ablate_" + ablate_id;
      for (char& c : stem) {
        if (c == ':') c = '_';
      }
      return run_bench(opts, suite, ablate_id, runs, parallel, stem);
    }

    if (compare_cmd->parsed()) {
      const auto load = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open '" + path + "'");
        nlohmann::json doc;
        in >> doc;
        return metrics_from_json(doc);
      };
      const ComparisonReport report = compare_campaigns(load(file_a), load(file_b));
      std::fputs(comparison_to_text(report).c_str(), stdout);
      if (opts.format == "json") {
        const std::filesystem::path path =
            std::filesystem::path(opts.out_dir) / "comparison.json";
        write_file(path, comparison_to_json(report).dump(2) + "\n");
        std::printf("wrote %s\n", path.c_str());
      }
      return 0;
    }

    if (complexity_cmd->parsed()) {
      const ComplexityResult r = complexity(default_suite(), effective_config(opts));
      std::printf("T1=%.4fs T2=%.4fs (T2-T1)/T1=%.4f\n", r.t1_seconds, r.t2_seconds, r.ratio);
      return 0;
    }

    if (problems_cmd->parsed()) {
      std::fputs((manifest_to_json().dump(2) + "\n").c_str(), stdout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
