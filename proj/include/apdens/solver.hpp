#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "apdens/constraint_handling.hpp"
#include "apdens/mutation.hpp"
#include "apdens/parameter_adaptation.hpp"
#include "apdens/population_control.hpp"
#include "apdens/problem.hpp"
#include "apdens/rng.hpp"

namespace apdens {

enum class Ablation { None, SinglePbest, SingleRandr1 };

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
  int np_max = 0;  // 0: dimension default (24D for D<=10, 19D for D<=30, 16D above)
  int np_min = 6;
  int k = 4;
  int min_subpop = 5;
  int s_size = 6;
  double cc = 0.3;
  double p_frac = 0.11;
  double delta = kDefaultEqualityTolerance;
  std::uint64_t fes_max = 0;  // 0: 20000 * D
  ComparatorConfig comparator{};
  Variant variant = Variant::Auto;
  std::vector<ParameterPool::Pair> pool = ParameterPool::default_pairs();
  int lp = 50;
  std::uint64_t seed = 1;
  int trace_every = 10;
  Ablation ablation = Ablation::None;
  int fixed_np = 0;  // >0: constant population size, sizing disabled
  double se0 = 1.0;
};

/// Fills dimension-dependent defaults and validates. The returned config is
/// what a run actually uses.
inline SolverConfig resolve_config(SolverConfig cfg, int dim) {
  if (dim < 1) throw ConfigError("problem dimension must be positive");
  if (cfg.np_max == 0) {
    cfg.np_max = dim <= 10 ? 24 * dim : (dim <= 30 ? 19 * dim : 16 * dim);
  }
  if (cfg.fes_max == 0) cfg.fes_max = 20000ULL * static_cast<std::uint64_t>(dim);
  if (cfg.variant == Variant::Auto) cfg.variant = dim <= 10 ? Variant::NSL : Variant::NS;
  if (cfg.k != 4) throw ConfigError("k: the strategy set defines exactly 4 subpopulations");
  if (cfg.np_min < 4) throw ConfigError("np_min must be at least 4 (mutation donor pool)");
  if (cfg.np_max < cfg.np_min) throw ConfigError("np_max must be >= np_min");
  if (cfg.fixed_np != 0 && cfg.fixed_np < cfg.np_min) {
    throw ConfigError("fixed_np must be >= np_min");
  }
  const int initial_np = cfg.fixed_np > 0 ? cfg.fixed_np : cfg.np_max;
  if (cfg.fes_max < static_cast<std::uint64_t>(initial_np)) {
    throw ConfigError("evaluation budget smaller than the initial population");
  }
  if (cfg.s_size < 1) throw ConfigError("s_size must be positive");
  if (cfg.lp < 1) throw ConfigError("lp must be positive");
  if (cfg.trace_every < 1) throw ConfigError("trace_every must be positive");
  if (cfg.pool.empty()) throw ConfigError("parameter pool must not be empty");
  if (!(cfg.delta >= 0.0)) throw ConfigError("delta must be non-negative");
  if (!(cfg.p_frac > 0.0)) throw ConfigError("p_frac must be positive");
  return cfg;
}

struct TraceRecord {
  std::uint64_t generation = 0;
  std::uint64_t fes = 0;
  int np = 0;
  double pfeas = 0.0;
  double rdiv = 0.0;
  double best_f = 0.0;
  double best_v = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct RunResult {
  Individual best;
  std::uint64_t fes_used = 0;
  std::uint64_t generations = 0;
  std::vector<TraceRecord> trace;
  bool success = false;  // best is feasible
};

/// Generic greedy selection: the trial survives unless the parent is strictly
/// better; only a strictly better trial counts as a success.
inline std::pair<const Individual*, bool> select(const Individual& parent, const Individual& trial,
                                                 const ComparatorConfig& comparator) {
  const Ordering ord = compare(parent.eval, trial.eval, comparator);
  if (ord == Ordering::FirstBetter) return {&parent, false};
  return {&trial, ord == Ordering::SecondBetter};
}

/// One seeded run of the state-switching multi-population solver.
/// Construct, then step() generation by generation, or run() to completion.
class Solver {
 public:
  Solver(ConstrainedProblem problem, const SolverConfig& config)
      : problem_(std::move(problem)),
        cfg_(resolve_config(config, problem_.dim)),
        master_(mix_seed(cfg_.seed, 0x6d61737465725ULL)),
        size_state_(),
        archives_(static_cast<std::size_t>(cfg_.k), SuccessHistoryArchive(cfg_.s_size)),
        records_(static_cast<std::size_t>(cfg_.k)),
        successes_(static_cast<std::size_t>(cfg_.k), 0),
        pools_(static_cast<std::size_t>(cfg_.k), ParameterPool(cfg_.pool, cfg_.lp)) {
    const int np0 = cfg_.fixed_np > 0 ? cfg_.fixed_np : cfg_.np_max;
    population_.reserve(np0);
    for (int i = 0; i < np0; ++i) population_.push_back(random_individual());
    best_ = population_.front();
    for (const auto& member : population_) consider_best(member);
    initial_spread_ = population_spread(population_);
    if (initial_spread_ <= 0.0) initial_spread_ = 1.0;
    rdiv_ = 1.0;
    feasible_rate_ = pfeas(population_);
    // Equal split before the first generation repartitions.
    for (std::size_t i = 0; i < population_.size(); ++i) {
      population_[i].subpop = static_cast<int>(i % static_cast<std::size_t>(cfg_.k));
    }
    push_trace();
  }

  bool done() const { return fes_ >= cfg_.fes_max; }

  void step() {
    if (done()) return;
    ++generation_;
    feasible_rate_ = pfeas(population_);

    // Population size, then membership.
    if (cfg_.fixed_np == 0) {
      const SizeControlConfig size_cfg{cfg_.np_max, cfg_.np_min, cfg_.fes_max};
      const int np_next =
          next_population_size(size_state_, size_cfg, fes_, feasible_rate_, np());
      apply_resize(np_next);
    }
    failed_.set_capacity(2 * population_.size(), master_);
    partition();
    rdiv_ = diversity_ratio(population_, initial_spread_);

    generate_trials();
    apply_selection();
    learn();

    if (generation_ % static_cast<std::uint64_t>(cfg_.trace_every) == 0 || done()) {
      push_trace();
    }
  }

  RunResult run() {
    while (!done()) step();
    return result();
  }

  RunResult result() const {
    RunResult r;
    r.best = best_;
    r.fes_used = fes_;
    r.generations = generation_;
    r.trace = trace_;
    r.success = best_.eval.feasible;
    return r;
  }

  const SolverConfig& config() const { return cfg_; }
  const ConstrainedProblem& problem() const { return problem_; }
  const std::vector<Individual>& population() const { return population_; }
  const Individual& best() const { return best_; }
  int np() const { return static_cast<int>(population_.size()); }
  std::uint64_t fes() const { return fes_; }
  std::uint64_t generation() const { return generation_; }
  double feasible_rate() const { return feasible_rate_; }
  double diversity() const { return rdiv_; }
  bool pesk_used() const { return size_state_.pesk_used; }
  const std::vector<std::uint64_t>& successes_by_subpop() const { return successes_; }
  const std::vector<SuccessHistoryArchive>& archives() const { return archives_; }
  const std::vector<ParameterPool>& pools() const { return pools_; }
  std::size_t failed_archive_size() const { return failed_.size(); }
  std::uint64_t trials_generated() const { return trials_generated_; }
  std::uint64_t growth_evaluations() const { return growth_evals_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  struct PendingTrial {
    std::size_t index = 0;
    Vector x;
    Evaluation eval;
    double cr = 0.5;
    double f = 0.5;
    std::size_t pool_index = 0;
  };

  Individual random_individual() {
    Individual fresh;
    fresh.x.resize(problem_.dim);
    for (int j = 0; j < problem_.dim; ++j) {
      fresh.x[j] = master_.uniform(problem_.lower[j], problem_.upper[j]);
    }
    fresh.eval = evaluate(problem_, fresh.x, cfg_.delta, fes_);
    return fresh;
  }

  void consider_best(const Individual& candidate) {
    if (compare(candidate.eval, best_.eval, cfg_.comparator) == Ordering::FirstBetter) {
      best_ = candidate;
    }
  }

  void apply_resize(int np_next) {
    const int before = np();
    if (np_next == before) return;
    const std::uint64_t fes_before = fes_;
    resize_population(population_, np_next, cfg_.comparator, problem_, cfg_.delta, cfg_.fes_max,
                      fes_, master_);
    if (np_next > before) {
      growth_evals_ += fes_ - fes_before;
      for (std::size_t i = static_cast<std::size_t>(before); i < population_.size(); ++i) {
        consider_best(population_[i]);
      }
    }
  }

  void partition() {
    const auto sizes = partition_sizes(np(), successes_, cfg_.se0, cfg_.min_subpop);
    std::vector<std::size_t> order(population_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    master_.shuffle(order.begin(), order.end());
    subpop_members_.assign(static_cast<std::size_t>(cfg_.k), {});
    std::size_t cursor = 0;
    for (int s = 0; s < cfg_.k; ++s) {
      subpop_members_[s].reserve(sizes[s]);
      for (int c = 0; c < sizes[s]; ++c) {
        population_[order[cursor]].subpop = s;
        subpop_members_[s].push_back(order[cursor]);
        ++cursor;
      }
    }
    std::fill(successes_.begin(), successes_.end(), 0);
  }

  Strategy subpop_strategy(int s) const {
    switch (cfg_.ablation) {
      case Ablation::SinglePbest:
        return {MutationKind::PbestPlain, CrossoverKind::Binomial};
      case Ablation::SingleRandr1:
        return {MutationKind::Randr1Plain, CrossoverKind::Binomial};
      case Ablation::None:
        break;
    }
    return strategy_for(s, fes_, cfg_.fes_max, cfg_.variant);
  }

  std::vector<std::size_t> rank_indices(const std::vector<std::size_t>& indices) const {
    std::vector<std::size_t> ranked = indices;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      return compare(population_[a].eval, population_[b].eval, cfg_.comparator) ==
             Ordering::FirstBetter;
    });
    return ranked;
  }

  void generate_trials() {
    const std::size_t np_now = population_.size();
    strategies_.assign(static_cast<std::size_t>(cfg_.k), Strategy{});
    std::vector<bool> use_whole(static_cast<std::size_t>(cfg_.k), false);
    std::vector<std::vector<std::size_t>> rankings(static_cast<std::size_t>(cfg_.k));
    std::vector<std::size_t> whole(np_now);
    std::iota(whole.begin(), whole.end(), std::size_t{0});
    std::vector<std::size_t> whole_ranking;

    for (int s = 0; s < cfg_.k; ++s) {
      strategies_[s] = subpop_strategy(s);
      use_whole[s] = subpop_members_[s].size() < 4;
      const bool needs_ranking = strategy_uses_failed_archive(strategies_[s].kind);
      if (!needs_ranking) continue;
      if (use_whole[s]) {
        if (whole_ranking.empty()) whole_ranking = rank_indices(whole);
      } else {
        rankings[s] = rank_indices(subpop_members_[s]);
      }
    }

    trials_.clear();
    for (std::size_t i = 0; i < np_now; ++i) {
      if (done()) break;
      const int s = population_[i].subpop;
      const Strategy strat = strategies_[s];
      Rng rng(mix_seed(cfg_.seed, generation_, i));

      PendingTrial pending;
      pending.index = i;
      if (cfg_.variant == Variant::NSL) {
        pending.pool_index = pool_select(pools_[s], rng);
        pending.cr = pools_[s].pairs[pending.pool_index].cr;
        pending.f = pools_[s].pairs[pending.pool_index].f;
      } else {
        const CrF crf = sample_cr_f(archives_[s], rng);
        pending.cr = crf.cr;
        pending.f = crf.f;
      }

      DonorPool donors;
      donors.population = &population_;
      donors.members = use_whole[s] ? std::span<const std::size_t>(whole)
                                    : std::span<const std::size_t>(subpop_members_[s]);
      donors.ranked = use_whole[s] ? std::span<const std::size_t>(whole_ranking)
                                   : std::span<const std::size_t>(rankings[s]);
      donors.target = i;
      donors.failed = &failed_;

      TrialParams params;
      params.cr = pending.cr;
      params.f = pending.f;
      params.p_count = pbest_count(cfg_.p_frac, donors.members.size());

      Vector mutant;
      switch (strat.kind) {
        case MutationKind::SsPbest:
          mutant = mutate_ss_pbest(donors, params, feasible_rate_, fes_, cfg_.fes_max, rng);
          break;
        case MutationKind::PbestPlain:
          mutant = mutate_pbest_plain(donors, params, rng);
          break;
        case MutationKind::PbestDiversity:
          mutant = mutate_pbest_diversity(donors, params, rdiv_, cfg_.cc, rng);
          break;
        case MutationKind::SsRandr1:
          mutant = mutate_ss_randr1(donors, params, feasible_rate_, rdiv_, cfg_.cc,
                                    cfg_.comparator, rng);
          break;
        case MutationKind::Randr1Plain:
          mutant = mutate_randr1_plain(donors, params, cfg_.comparator, rng);
          break;
        case MutationKind::Rand1:
          mutant = mutate_rand1(donors, params, rng);
          break;
      }
      repair_bounds(mutant, population_[i].x, problem_.lower, problem_.upper);
      pending.x = strat.crossover == CrossoverKind::Binomial
                      ? crossover_bin(population_[i].x, mutant, pending.cr, rng)
                      : crossover_exp(population_[i].x, mutant, pending.cr, rng);
      pending.eval = evaluate(problem_, pending.x, cfg_.delta, fes_);
      ++trials_generated_;
      trials_.push_back(std::move(pending));
    }
  }

  void apply_selection() {
    for (auto& trial : trials_) {
      Individual& parent = population_[trial.index];
      const Ordering ord = compare(parent.eval, trial.eval, cfg_.comparator);
      if (ord == Ordering::FirstBetter) {
        // Parent survives; losing pbest-family trials feed the archive.
        if (strategy_uses_failed_archive(strategies_[parent.subpop].kind)) {
          failed_.insert(std::move(trial.x), master_);
        }
        continue;
      }
      if (ord == Ordering::SecondBetter) {
        const int s = parent.subpop;
        ++successes_[s];
        if (cfg_.variant == Variant::NSL) {
          ++pools_[s].successes[trial.pool_index];
        } else {
          record_success(records_[s], trial.cr, trial.f, parent.eval.f, trial.eval.f);
        }
        if (compare(trial.eval, best_.eval, cfg_.comparator) == Ordering::FirstBetter) {
          best_.x = trial.x;
          best_.eval = trial.eval;
          best_.subpop = s;
        }
      }
      parent.x = std::move(trial.x);
      parent.eval = std::move(trial.eval);
    }
    trials_.clear();
  }

  void learn() {
    if (cfg_.variant == Variant::NSL) {
      if (generation_ % static_cast<std::uint64_t>(cfg_.lp) == 0) {
        for (auto& pool : pools_) pool_update(pool);
      }
      return;
    }
    for (int s = 0; s < cfg_.k; ++s) {
      update_memory(archives_[s], records_[s]);
      records_[s].clear();
    }
  }

  void push_trace() {
    trace_.push_back({generation_, fes_, np(), feasible_rate_, rdiv_, best_.eval.f,
                      best_.eval.violation});
  }

  ConstrainedProblem problem_;
  SolverConfig cfg_;
  Rng master_;
  std::vector<Individual> population_;
  Individual best_;
  std::uint64_t fes_ = 0;
  std::uint64_t generation_ = 0;
  double initial_spread_ = 1.0;
  double rdiv_ = 1.0;
  double feasible_rate_ = 0.0;
  SizeControlState size_state_;
  FailedArchive failed_;
  std::vector<SuccessHistoryArchive> archives_;
  std::vector<SuccessRecords> records_;
  std::vector<std::uint64_t> successes_;
  std::vector<ParameterPool> pools_;
  std::vector<std::vector<std::size_t>> subpop_members_;
  std::vector<Strategy> strategies_;
  std::vector<PendingTrial> trials_;
  std::vector<TraceRecord> trace_;
  std::uint64_t trials_generated_ = 0;
  std::uint64_t growth_evals_ = 0;
};

inline RunResult run(const ConstrainedProblem& problem, const SolverConfig& config) {
  return Solver(problem, config).run();
}

/// Classical DE/rand/1/bin with fixed F = 0.5, Cr = 0.9, constant population
/// size, and feasibility-first selection. Serves as the comparison baseline.
inline RunResult de_bin_baseline(const ConstrainedProblem& problem, const SolverConfig& config) {
  const SolverConfig cfg = resolve_config(config, problem.dim);
  const ComparatorConfig comparator{};  // superiority of feasible
  constexpr double kF = 0.5;
  constexpr double kCr = 0.9;
  const int np = cfg.fixed_np > 0 ? cfg.fixed_np : cfg.np_max;

  Rng master(mix_seed(cfg.seed, 0x6d61737465725ULL));
  std::uint64_t fes = 0;
  std::uint64_t generation = 0;
  std::vector<Individual> population;
  population.reserve(np);
  for (int i = 0; i < np; ++i) {
    Individual fresh;
    fresh.x.resize(problem.dim);
    for (int j = 0; j < problem.dim; ++j) {
      fresh.x[j] = master.uniform(problem.lower[j], problem.upper[j]);
    }
    fresh.eval = evaluate(problem, fresh.x, cfg.delta, fes);
    population.push_back(std::move(fresh));
  }
  Individual best = population.front();
  for (const auto& member : population) {
    if (compare(member.eval, best.eval, comparator) == Ordering::FirstBetter) best = member;
  }
  double initial_spread = population_spread(population);
  if (initial_spread <= 0.0) initial_spread = 1.0;
  RunResult result;
  result.trace.push_back(
      {0, fes, np, pfeas(population), 1.0, best.eval.f, best.eval.violation});

  std::vector<std::pair<std::size_t, Individual>> trials;
  while (fes < cfg.fes_max) {
    ++generation;
    trials.clear();
    for (std::size_t i = 0; i < population.size() && fes < cfg.fes_max; ++i) {
      Rng rng(mix_seed(cfg.seed, generation, i));
      std::size_t r1, r2, r3;
      do { r1 = rng.index(population.size()); } while (r1 == i);
      do { r2 = rng.index(population.size()); } while (r2 == i || r2 == r1);
      do { r3 = rng.index(population.size()); } while (r3 == i || r3 == r1 || r3 == r2);
      Vector mutant = mutant_randr1_balance(population[r1].x, population[r2].x,
                                            population[r3].x, kF);
      repair_bounds(mutant, population[i].x, problem.lower, problem.upper);
      Individual trial;
      trial.x = crossover_bin(population[i].x, mutant, kCr, rng);
      trial.eval = evaluate(problem, trial.x, cfg.delta, fes);
      trials.emplace_back(i, std::move(trial));
    }
    for (auto& [index, trial] : trials) {
      Individual& parent = population[index];
      const Ordering ord = compare(parent.eval, trial.eval, comparator);
      if (ord == Ordering::FirstBetter) continue;
      if (ord == Ordering::SecondBetter &&
          compare(trial.eval, best.eval, comparator) == Ordering::FirstBetter) {
        best = trial;
      }
      parent = std::move(trial);
    }
    if (generation % static_cast<std::uint64_t>(cfg.trace_every) == 0 || fes >= cfg.fes_max) {
      result.trace.push_back({generation, fes, static_cast<int>(population.size()),
                              pfeas(population), diversity_ratio(population, initial_spread),
                              best.eval.f, best.eval.violation});
    }
  }
  result.best = best;
  result.fes_used = fes;
  result.generations = generation;
  result.success = best.eval.feasible;
  return result;
}

}  // namespace apdens
