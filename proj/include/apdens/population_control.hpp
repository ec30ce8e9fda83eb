#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "apdens/constraint_handling.hpp"
#include "apdens/problem.hpp"
#include "apdens/rng.hpp"

namespace apdens {

/// Splits np members across k subpopulations proportionally to the previous
/// generation's success counts (Laplace-smoothed by se0), integerized by
/// largest remainder. Every share is floored at min_subpop, taking the deficit
/// from the largest shares; if np cannot support the floor, the split is
/// uniform.
inline std::vector<int> partition_sizes(int np, const std::vector<std::uint64_t>& successes,
                                        double se0, int min_subpop) {
  const int k = static_cast<int>(successes.size());
  if (k <= 0) throw std::invalid_argument("partition_sizes: no subpopulations");
  std::vector<int> sizes(k, 0);
  if (np < k * min_subpop) {
    // Uniform fallback, remainder to the lowest indices.
    const int base = np / k;
    const int rem = np % k;
    for (int s = 0; s < k; ++s) sizes[s] = base + (s < rem ? 1 : 0);
    return sizes;
  }
  double total = 0.0;
  for (auto se : successes) total += static_cast<double>(se) + se0;
  std::vector<double> remainders(k);
  int assigned = 0;
  for (int s = 0; s < k; ++s) {
    const double share =
        (static_cast<double>(successes[s]) + se0) / total * static_cast<double>(np);
    sizes[s] = static_cast<int>(std::floor(share));
    remainders[s] = share - std::floor(share);
    assigned += sizes[s];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainders[a] > remainders[b]; });
  for (int i = 0; i < np - assigned; ++i) sizes[order[i]] += 1;
  // Enforce the floor, pulling one member at a time from the current largest.
  for (int s = 0; s < k; ++s) {
    while (sizes[s] < min_subpop) {
      int largest = 0;
      for (int t = 1; t < k; ++t) {
        if (sizes[t] > sizes[largest]) largest = t;
      }
      sizes[largest] -= 1;
      sizes[s] += 1;
    }
  }
  return sizes;
}

/// Limits and budget the size controller works against.
struct SizeControlConfig {
  int np_max = 0;
  int np_min = 6;
  std::uint64_t fes_max = 0;
};

/// Latches of the three-stage size controller. npfix/fesfix are recorded at
/// most once (on entering feasible-rate-driven reduction); pesk fires at most
/// once per run.
struct SizeControlState {
  bool linear_latched = false;
  bool adaptive_entered = false;
  int npfix = 0;
  std::uint64_t fesfix = 0;
  bool pesk_used = false;
};

/// Population size from linear reduction at the given evaluation count.
inline int linear_population_size(const SizeControlConfig& cfg, std::uint64_t fes) {
  const double slope = static_cast<double>(cfg.np_max - cfg.np_min) /
                       static_cast<double>(cfg.fes_max);
  return static_cast<int>(
      std::lround(static_cast<double>(cfg.np_max) - slope * static_cast<double>(fes)));
}

/// The three-stage controller. Early on the size shrinks linearly with the
/// evaluation count; in the middle stage, runs that have not secured a high
/// feasible rate freeze the size until feasible members appear and then shrink
/// at a rate scaled by the feasible rate; late in the run linear reduction
/// resumes, with a one-time reset back up to np_max/6 when the population has
/// collapsed while feasibility is still poor. The size never grows except via
/// that reset.
inline int next_population_size(SizeControlState& state, const SizeControlConfig& cfg,
                                std::uint64_t fes, double feasible_rate, int np_current) {
  if (feasible_rate > 0.5) state.linear_latched = true;
  const double progress_mid = 0.5 * static_cast<double>(cfg.fes_max);
  const double progress_late = 0.9 * static_cast<double>(cfg.fes_max);
  const double fes_d = static_cast<double>(fes);

  int next;
  if (fes_d < progress_mid || fes_d >= progress_late) {
    next = linear_population_size(cfg, fes);
  } else if (state.linear_latched) {
    next = linear_population_size(cfg, fes);
  } else {
    if (!state.adaptive_entered) {
      state.adaptive_entered = true;
      state.npfix = np_current;
      state.fesfix = fes;
    }
    if (feasible_rate == 0.0) {
      next = np_current;
    } else {
      const double slope = static_cast<double>(state.npfix - cfg.np_min) /
                           static_cast<double>(cfg.fes_max - state.fesfix);
      next = static_cast<int>(std::lround(static_cast<double>(state.npfix) -
                                          slope * static_cast<double>(fes - state.fesfix) *
                                              feasible_rate));
    }
  }
  next = std::clamp(next, cfg.np_min, cfg.np_max);
  next = std::min(next, np_current);
  if (fes_d >= progress_late && !state.pesk_used &&
      static_cast<double>(np_current) < static_cast<double>(cfg.np_max) / 6.0 &&
      feasible_rate < 0.6) {
    next = static_cast<int>(std::lround(static_cast<double>(cfg.np_max) / 6.0));
    next = std::clamp(next, cfg.np_min, cfg.np_max);
    state.pesk_used = true;
  }
  return next;
}

/// Archive of trial vectors that lost selection, reused as difference-vector
/// material. Capacity tracks twice the current population size; overflow is
/// resolved by uniform-random eviction.
class FailedArchive {
 public:
  void set_capacity(std::size_t capacity, Rng& rng) {
    capacity_ = capacity;
    while (members_.size() > capacity_) {
      const std::size_t victim = rng.index(members_.size());
      members_[victim] = std::move(members_.back());
      members_.pop_back();
    }
  }

  void insert(Vector x, Rng& rng) {
    if (capacity_ == 0) return;
    if (members_.size() >= capacity_) {
      members_[rng.index(members_.size())] = std::move(x);
    } else {
      members_.push_back(std::move(x));
    }
  }

  void clear() { members_.clear(); }
  std::size_t size() const { return members_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<Vector>& members() const { return members_; }

 private:
  std::vector<Vector> members_;
  std::size_t capacity_ = 0;
};

/// Root of the total coordinate variance: sqrt(sum_ij (x_ij - mean_j)^2 / Np).
inline double population_spread(const std::vector<Individual>& population) {
  if (population.empty()) return 0.0;
  const std::size_t dim = population.front().x.size();
  const double np = static_cast<double>(population.size());
  double total = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double mean = 0.0;
    for (const auto& member : population) mean += member.x[j];
    mean /= np;
    for (const auto& member : population) {
      const double d = member.x[j] - mean;
      total += d * d;
    }
  }
  return std::sqrt(total / np);
}

/// Current spread relative to the initial population's. 1 at the start,
/// approaching 0 as the population converges.
inline double diversity_ratio(const std::vector<Individual>& population, double initial_spread) {
  const double spread = population_spread(population);
  if (initial_spread <= 0.0) return spread == 0.0 ? 1.0 : 0.0;
  return spread / initial_spread;
}

/// Shrinks by dropping the comparator-worst members (survivors keep their
/// order), or grows by appending uniform-random evaluated members. Growth
/// stops early if the evaluation budget runs out.
inline void resize_population(std::vector<Individual>& population, int target,
                              const ComparatorConfig& comparator,
                              const ConstrainedProblem& problem, double delta,
                              std::uint64_t fes_max, std::uint64_t& fes, Rng& rng) {
  const int current = static_cast<int>(population.size());
  if (target == current) return;
  if (target < current) {
    const auto ranking = rank_population(population, comparator);
    std::vector<bool> keep(population.size(), false);
    for (int i = 0; i < target; ++i) keep[ranking[i]] = true;
    std::vector<Individual> survivors;
    survivors.reserve(target);
    for (std::size_t i = 0; i < population.size(); ++i) {
      if (keep[i]) survivors.push_back(std::move(population[i]));
    }
    population = std::move(survivors);
    return;
  }
  population.reserve(target);
  while (static_cast<int>(population.size()) < target && fes < fes_max) {
    Individual fresh;
    fresh.x.resize(problem.dim);
    for (int j = 0; j < problem.dim; ++j) {
      fresh.x[j] = rng.uniform(problem.lower[j], problem.upper[j]);
    }
    fresh.eval = evaluate(problem, fresh.x, delta, fes);
    population.push_back(std::move(fresh));
  }
}

}  // namespace apdens
