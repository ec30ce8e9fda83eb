#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "apdens/problem.hpp"

namespace apdens {

enum class Ordering { FirstBetter, SecondBetter, Tie };

inline Ordering flip(Ordering o) {
  if (o == Ordering::FirstBetter) return Ordering::SecondBetter;
  if (o == Ordering::SecondBetter) return Ordering::FirstBetter;
  return Ordering::Tie;
}

enum class Cht { SF, EC, SP };

struct ComparatorConfig {
  Cht kind = Cht::SF;
  double epsilon = 0.0;  // EC only; may be +infinity
};

namespace detail {
inline Ordering by_value(double a, double b) {
  if (a < b) return Ordering::FirstBetter;
  if (b < a) return Ordering::SecondBetter;
  return Ordering::Tie;
}
}  // namespace detail

/// Superiority of feasible: feasibility dominates, then objective among
/// feasible, then overall violation among infeasible.
inline Ordering sf_compare(const Evaluation& a, const Evaluation& b) {
  if (a.feasible != b.feasible) {
    return a.feasible ? Ordering::FirstBetter : Ordering::SecondBetter;
  }
  return a.feasible ? detail::by_value(a.f, b.f) : detail::by_value(a.violation, b.violation);
}

/// Epsilon-level precedence: objective decides when both max violations are
/// within epsilon or exactly equal, otherwise the smaller max violation wins.
inline Ordering ec_compare(const Evaluation& a, const Evaluation& b, double epsilon) {
  const double ta = a.max_violation;
  const double tb = b.max_violation;
  if ((ta <= epsilon && tb <= epsilon) || ta == tb) {
    return detail::by_value(a.f, b.f);
  }
  return detail::by_value(ta, tb);
}

/// Fraction of feasible members.
inline double pfeas(std::span<const Evaluation> evals) {
  std::size_t count = 0;
  for (const auto& ev : evals) {
    if (ev.feasible) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(evals.size());
}

inline double pfeas(const std::vector<Individual>& population) {
  std::size_t count = 0;
  for (const auto& member : population) {
    if (member.eval.feasible) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(population.size());
}

/// Self-adaptive penalty fitness of one member relative to its population.
struct SpFitness {
  double fitness = 0.0;     // distance + penalty; lower is better
  double distance = 0.0;
  double penalty = 0.0;
  double normalized_f = 0.0;
};

/// Penalty fitness for every member. The penalty weight shifts with the
/// population's feasible rate: with no feasible members the fitness collapses
/// to the violation alone.
inline std::vector<SpFitness> sp_fitness(std::span<const Evaluation> evals) {
  const double rate = pfeas(evals);
  double f_min = std::numeric_limits<double>::infinity();
  double f_max = -std::numeric_limits<double>::infinity();
  for (const auto& ev : evals) {
    f_min = std::min(f_min, ev.f);
    f_max = std::max(f_max, ev.f);
  }
  const double range = f_max - f_min;
  std::vector<SpFitness> out;
  out.reserve(evals.size());
  for (const auto& ev : evals) {
    SpFitness sp;
    sp.normalized_f = range > 0.0 ? (ev.f - f_min) / range : 0.0;
    sp.distance = rate == 0.0
                      ? ev.violation
                      : std::sqrt(sp.normalized_f * sp.normalized_f + ev.violation * ev.violation);
    const double m_term = rate == 0.0 ? 0.0 : ev.violation;
    const double n_term = ev.feasible ? 0.0 : sp.normalized_f;
    sp.penalty = (1.0 - rate) * m_term + rate * n_term;
    sp.fitness = sp.distance + sp.penalty;
    out.push_back(sp);
  }
  return out;
}

/// Pairwise comparison under the configured technique. SP has no intrinsic
/// pairwise form; the two evaluations are treated as a two-member population.
inline Ordering compare(const Evaluation& a, const Evaluation& b, const ComparatorConfig& cfg) {
  switch (cfg.kind) {
    case Cht::SF:
      return sf_compare(a, b);
    case Cht::EC:
      return ec_compare(a, b, cfg.epsilon);
    case Cht::SP: {
      const Evaluation pair[2] = {a, b};
      const auto sp = sp_fitness(std::span<const Evaluation>(pair, 2));
      return detail::by_value(sp[0].fitness, sp[1].fitness);
    }
  }
  return Ordering::Tie;
}

inline bool better(const Evaluation& a, const Evaluation& b, const ComparatorConfig& cfg) {
  return compare(a, b, cfg) == Ordering::FirstBetter;
}

/// Indices of the population sorted best first. Stable: ties keep their
/// original order. SP ranks by penalty fitness computed over the whole list.
inline std::vector<std::size_t> rank_population(const std::vector<Individual>& population,
                                                const ComparatorConfig& cfg) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (cfg.kind == Cht::SP) {
    std::vector<Evaluation> evals;
    evals.reserve(population.size());
    for (const auto& member : population) evals.push_back(member.eval);
    const auto sp = sp_fitness(evals);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return sp[i].fitness < sp[j].fitness;
    });
    return order;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return compare(population[i].eval, population[j].eval, cfg) == Ordering::FirstBetter;
  });
  return order;
}

}  // namespace apdens
