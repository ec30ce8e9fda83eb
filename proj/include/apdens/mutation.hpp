#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "apdens/constraint_handling.hpp"
#include "apdens/population_control.hpp"
#include "apdens/problem.hpp"
#include "apdens/rng.hpp"

namespace apdens {

enum class Variant { Auto, NS, NSL };

enum class MutationKind {
  SsPbest,          // current-to-pbest with feasibility/progress state switch
  PbestPlain,       // current-to-pbest, balance formula always
  PbestDiversity,   // current-to-pbest with diversity-weighted difference term
  SsRandr1,         // tournament rand/1 with exploration state switch
  Randr1Plain,      // tournament rand/1, balance formula always
  Rand1,            // classical rand/1
};

enum class CrossoverKind { Binomial, Exponential };

struct Strategy {
  MutationKind kind = MutationKind::SsPbest;
  CrossoverKind crossover = CrossoverKind::Binomial;
};

/// pbest-family strategies draw difference material from the failed-trial
/// archive and feed their own failed trials back into it.
inline bool strategy_uses_failed_archive(MutationKind kind) {
  return kind == MutationKind::SsPbest || kind == MutationKind::PbestPlain ||
         kind == MutationKind::PbestDiversity;
}

/// Per-individual trial parameters, drawn before mutation.
struct TrialParams {
  double cr = 0.5;
  double f = 0.5;
  int p_count = 2;
};

inline int pbest_count(double p_frac, std::size_t pool_size) {
  const int p = static_cast<int>(std::lround(p_frac * static_cast<double>(pool_size)));
  return std::clamp(p, 2, static_cast<int>(pool_size));
}

/// Donor material for one mutation: the target, the donor index pool (its
/// subpopulation, or the whole population when the subpopulation is too
/// small), the comparator ranking of that pool, and the failed-trial archive.
struct DonorPool {
  const std::vector<Individual>* population = nullptr;
  std::span<const std::size_t> members;  // population indices of the donor pool
  std::span<const std::size_t> ranked;   // members ranked best first (pbest family only)
  std::size_t target = 0;                // population index of the target
  const FailedArchive* failed = nullptr;

  const Vector& x(std::size_t population_index) const {
    return (*population)[population_index].x;
  }
  const Evaluation& eval(std::size_t population_index) const {
    return (*population)[population_index].eval;
  }
};

// --- mutation formulas -------------------------------------------------------

inline Vector mutant_current_to_pbest(const Vector& target, const Vector& pbest, const Vector& r1,
                                      const Vector& r2, double f) {
  Vector v(target.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = target[j] + f * (pbest[j] - target[j]) + f * (r1[j] - r2[j]);
  }
  return v;
}

inline Vector mutant_pbest_only(const Vector& target, const Vector& pbest, double f) {
  Vector v(target.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = target[j] + f * (pbest[j] - target[j]);
  }
  return v;
}

inline Vector mutant_pbest_diversity(const Vector& target, const Vector& pbest, const Vector& r1,
                                     const Vector& r2, double f, double cc, double rdiv) {
  const double w = cc * (1.0 - rdiv);
  Vector v(target.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = target[j] + f * (pbest[j] - target[j]) + w * (r1[j] - r2[j]);
  }
  return v;
}

inline Vector mutant_randr1_balance(const Vector& best, const Vector& second, const Vector& third,
                                    double f) {
  Vector v(best.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = best[j] + f * (second[j] - third[j]);
  }
  return v;
}

inline Vector mutant_randr1_explore(const Vector& best, const Vector& second, const Vector& third,
                                    double f, double cc, double rdiv) {
  const double w = cc * rdiv;
  Vector v(best.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = best[j] + f * (second[j] - third[j]) + w * (best[j] - second[j]);
  }
  return v;
}

// --- donor draws -------------------------------------------------------------

struct PbestDonors {
  std::size_t pbest = 0;       // population index; may equal the target
  std::size_t r1 = 0;          // population index, never the target
  const Vector* r2 = nullptr;  // from the donor pool or the failed archive
  bool r2_from_archive = false;
  std::size_t r2_index = 0;    // population index when not from the archive
};

inline PbestDonors draw_pbest_donors(const DonorPool& pool, int p_count, Rng& rng) {
  if (pool.members.size() < 3) {
    throw std::logic_error("pbest mutation requires a donor pool of at least 3 members");
  }
  PbestDonors d;
  const int top = std::min<int>(p_count, static_cast<int>(pool.ranked.size()));
  d.pbest = pool.ranked[rng.index(static_cast<std::size_t>(top))];
  do {
    d.r1 = pool.members[rng.index(pool.members.size())];
  } while (d.r1 == pool.target);
  const std::size_t archive_size = pool.failed ? pool.failed->size() : 0;
  for (;;) {
    const std::size_t pick = rng.index(pool.members.size() + archive_size);
    if (pick < pool.members.size()) {
      const std::size_t idx = pool.members[pick];
      if (idx == pool.target || idx == d.r1) continue;
      d.r2 = &pool.x(idx);
      d.r2_index = idx;
      d.r2_from_archive = false;
    } else {
      d.r2 = &pool.failed->members()[pick - pool.members.size()];
      d.r2_from_archive = true;
    }
    break;
  }
  return d;
}

struct TournamentDonors {
  std::size_t best = 0;  // comparator-best of the three draws
  std::size_t second = 0;
  std::size_t third = 0;  // second/third keep their draw order
};

inline TournamentDonors draw_tournament_donors(const DonorPool& pool,
                                               const ComparatorConfig& comparator, Rng& rng) {
  if (pool.members.size() < 4) {
    throw std::logic_error("tournament mutation requires a donor pool of at least 4 members");
  }
  std::array<std::size_t, 3> draw{};
  for (int i = 0; i < 3; ++i) {
    for (;;) {
      const std::size_t idx = pool.members[rng.index(pool.members.size())];
      if (idx == pool.target) continue;
      bool duplicate = false;
      for (int t = 0; t < i; ++t) duplicate |= draw[t] == idx;
      if (!duplicate) {
        draw[i] = idx;
        break;
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (compare(pool.eval(draw[i]), pool.eval(draw[best]), comparator) == Ordering::FirstBetter) {
      best = i;
    }
  }
  TournamentDonors d;
  d.best = draw[best];
  int slot = 0;
  std::array<std::size_t, 2> rest{};
  for (int i = 0; i < 3; ++i) {
    if (i != best) rest[slot++] = draw[i];
  }
  d.second = rest[0];
  d.third = rest[1];
  return d;
}

// --- spec-level mutation operations -------------------------------------------

/// State-switch current-to-pbest. With any feasible member present the balance
/// form applies; with none, a mid-run window switches (with probability 0.12
/// per individual) to the exploitation form, which becomes unconditional
/// between half and 90% of the budget.
inline Vector mutate_ss_pbest(const DonorPool& pool, const TrialParams& params, double feasible_rate,
                              std::uint64_t fes, std::uint64_t fes_max, Rng& rng) {
  const double progress = static_cast<double>(fes);
  const double budget = static_cast<double>(fes_max);
  bool exploit = false;
  if (feasible_rate == 0.0) {
    if (progress >= 0.5 * budget && progress < 0.9 * budget) {
      exploit = true;
    } else if (progress > 0.08 * budget && progress < 0.5 * budget) {
      exploit = rng.uniform() < 0.12;
    }
  }
  if (exploit) {
    const int top = std::min<int>(params.p_count, static_cast<int>(pool.ranked.size()));
    const std::size_t pbest = pool.ranked[rng.index(static_cast<std::size_t>(top))];
    return mutant_pbest_only(pool.x(pool.target), pool.x(pbest), params.f);
  }
  const PbestDonors d = draw_pbest_donors(pool, params.p_count, rng);
  return mutant_current_to_pbest(pool.x(pool.target), pool.x(d.pbest), pool.x(d.r1), *d.r2,
                                 params.f);
}

/// State-switch tournament rand/1: while no feasible member exists, half the
/// trials add a diversity-scaled pull toward the tournament winner.
inline Vector mutate_ss_randr1(const DonorPool& pool, const TrialParams& params,
                               double feasible_rate, double rdiv, double cc,
                               const ComparatorConfig& comparator, Rng& rng) {
  const bool explore = feasible_rate == 0.0 && rng.uniform() < 0.5;
  const TournamentDonors d = draw_tournament_donors(pool, comparator, rng);
  if (explore) {
    return mutant_randr1_explore(pool.x(d.best), pool.x(d.second), pool.x(d.third), params.f, cc,
                                 rdiv);
  }
  return mutant_randr1_balance(pool.x(d.best), pool.x(d.second), pool.x(d.third), params.f);
}

inline Vector mutate_pbest_plain(const DonorPool& pool, const TrialParams& params, Rng& rng) {
  const PbestDonors d = draw_pbest_donors(pool, params.p_count, rng);
  return mutant_current_to_pbest(pool.x(pool.target), pool.x(d.pbest), pool.x(d.r1), *d.r2,
                                 params.f);
}

inline Vector mutate_pbest_diversity(const DonorPool& pool, const TrialParams& params, double rdiv,
                                     double cc, Rng& rng) {
  const PbestDonors d = draw_pbest_donors(pool, params.p_count, rng);
  return mutant_pbest_diversity(pool.x(pool.target), pool.x(d.pbest), pool.x(d.r1), *d.r2,
                                params.f, cc, rdiv);
}

inline Vector mutate_randr1_plain(const DonorPool& pool, const TrialParams& params,
                                  const ComparatorConfig& comparator, Rng& rng) {
  const TournamentDonors d = draw_tournament_donors(pool, comparator, rng);
  return mutant_randr1_balance(pool.x(d.best), pool.x(d.second), pool.x(d.third), params.f);
}

inline Vector mutate_rand1(const DonorPool& pool, const TrialParams& params, Rng& rng) {
  if (pool.members.size() < 4) {
    throw std::logic_error("rand/1 mutation requires a donor pool of at least 4 members");
  }
  std::array<std::size_t, 3> draw{};
  for (int i = 0; i < 3; ++i) {
    for (;;) {
      const std::size_t idx = pool.members[rng.index(pool.members.size())];
      if (idx == pool.target) continue;
      bool duplicate = false;
      for (int t = 0; t < i; ++t) duplicate |= draw[t] == idx;
      if (!duplicate) {
        draw[i] = idx;
        break;
      }
    }
  }
  return mutant_randr1_balance(pool.x(draw[0]), pool.x(draw[1]), pool.x(draw[2]), params.f);
}

// --- crossover and repair ------------------------------------------------------

/// Binomial crossover; one coordinate (j_rand) always comes from the mutant.
inline Vector crossover_bin(const Vector& target, const Vector& mutant, double cr, Rng& rng) {
  const std::size_t dim = target.size();
  const std::size_t j_rand = rng.index(dim);
  Vector trial(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    trial[j] = (rng.uniform() <= cr || j == j_rand) ? mutant[j] : target[j];
  }
  return trial;
}

/// Exponential crossover: a circularly contiguous block of mutant coordinates
/// starting at a random index, extended while successive draws stay below cr.
inline Vector crossover_exp(const Vector& target, const Vector& mutant, double cr, Rng& rng) {
  const std::size_t dim = target.size();
  Vector trial = target;
  std::size_t j = rng.index(dim);
  std::size_t copied = 0;
  do {
    trial[j] = mutant[j];
    j = (j + 1) % dim;
    ++copied;
  } while (copied < dim && rng.uniform() < cr);
  return trial;
}

/// Midpoint repair: out-of-bounds coordinates move to the midpoint between the
/// violated bound and the (in-bounds) base vector.
inline void repair_bounds(Vector& v, const Vector& base, const Vector& lower,
                          const Vector& upper) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < lower[j]) {
      v[j] = 0.5 * (lower[j] + base[j]);
    } else if (v[j] > upper[j]) {
      v[j] = 0.5 * (upper[j] + base[j]);
    }
  }
}

// --- strategy assignment --------------------------------------------------------

/// Strategy of a subpopulation (0-based index, k == 4). Late in the run the
/// NS set turns its two tournament subpopulations into pbest ones.
inline Strategy strategy_for(int subpop, std::uint64_t fes, std::uint64_t fes_max,
                             Variant variant) {
  if (variant == Variant::Auto) {
    throw std::invalid_argument("strategy_for requires a resolved variant");
  }
  if (subpop < 0 || subpop >= 4) {
    throw std::invalid_argument("strategy assignment expects 4 subpopulations");
  }
  if (variant == Variant::NS) {
    const bool late = static_cast<double>(fes) >= 0.9 * static_cast<double>(fes_max);
    switch (subpop) {
      case 0: return {MutationKind::SsPbest, CrossoverKind::Binomial};
      case 1: return {MutationKind::SsPbest, CrossoverKind::Exponential};
      case 2:
        return late ? Strategy{MutationKind::SsPbest, CrossoverKind::Binomial}
                    : Strategy{MutationKind::SsRandr1, CrossoverKind::Binomial};
      default:
        return late ? Strategy{MutationKind::SsPbest, CrossoverKind::Exponential}
                    : Strategy{MutationKind::SsRandr1, CrossoverKind::Exponential};
    }
  }
  switch (subpop) {
    case 0: return {MutationKind::PbestDiversity, CrossoverKind::Binomial};
    case 1: return {MutationKind::PbestPlain, CrossoverKind::Binomial};
    case 2: return {MutationKind::SsPbest, CrossoverKind::Binomial};
    default: return {MutationKind::Rand1, CrossoverKind::Binomial};
  }
}

}  // namespace apdens
