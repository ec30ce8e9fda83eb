#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "apdens/rng.hpp"

namespace apdens {

/// One accepted trial: the Cr/F pair it used and the objective improvement it
/// produced. Records are collected per subpopulation and cleared every
/// generation.
struct SuccessRecord {
  double cr = 0.0;
  double f = 0.0;
  double improvement = 0.0;  // |f(parent) - f(trial)|
};

struct SuccessRecords {
  std::vector<SuccessRecord> entries;

  bool empty() const { return entries.empty(); }
  void clear() { entries.clear(); }
};

inline void record_success(SuccessRecords& records, double cr, double f, double parent_f,
                           double trial_f) {
  records.entries.push_back({cr, f, std::abs(parent_f - trial_f)});
}

enum class ParamField { Cr, F };

namespace detail {

inline double field_value(const SuccessRecord& r, ParamField field) {
  return field == ParamField::Cr ? r.cr : r.f;
}

/// Improvement-proportional weights; uniform when no record improved the
/// objective (possible when selection wins come from violation reduction).
inline std::vector<double> success_weights(const SuccessRecords& records) {
  double total = 0.0;
  for (const auto& r : records.entries) total += r.improvement;
  std::vector<double> w(records.entries.size());
  if (total > 0.0) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = records.entries[i].improvement / total;
  } else {
    const double uniform = 1.0 / static_cast<double>(w.size());
    for (double& x : w) x = uniform;
  }
  return w;
}

}  // namespace detail

inline double weighted_arithmetic_mean(const SuccessRecords& records, ParamField field) {
  if (records.empty()) throw std::invalid_argument("weighted mean of empty success records");
  const auto w = detail::success_weights(records);
  double mean = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    mean += w[i] * detail::field_value(records.entries[i], field);
  }
  return mean;
}

inline double weighted_lehmer_mean(const SuccessRecords& records, ParamField field) {
  if (records.empty()) throw std::invalid_argument("weighted mean of empty success records");
  const auto w = detail::success_weights(records);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = detail::field_value(records.entries[i], field);
    num += w[i] * v * v;
    den += w[i] * v;
  }
  return den > 0.0 ? num / den : 0.0;
}

/// Ring of remembered (mu_cr, mu_f) means, one ring per subpopulation. Slots
/// start at 0.5 and are overwritten one per generation at the write cursor.
struct SuccessHistoryArchive {
  std::vector<double> mu_cr;
  std::vector<double> mu_f;
  std::size_t cursor = 0;

  explicit SuccessHistoryArchive(std::size_t slots = 6) : mu_cr(slots, 0.5), mu_f(slots, 0.5) {}

  std::size_t size() const { return mu_cr.size(); }
};

/// Writes the weighted Lehmer means of this generation's successes into the
/// cursor slot and advances it. No successes, no change. Both means are
/// Lehmer: an arithmetic mu_f update lets remembered F drift toward zero and
/// stalls the search long before the budget runs out.
inline void update_memory(SuccessHistoryArchive& archive, const SuccessRecords& records) {
  if (records.empty()) return;
  archive.mu_cr[archive.cursor] = weighted_lehmer_mean(records, ParamField::Cr);
  archive.mu_f[archive.cursor] = weighted_lehmer_mean(records, ParamField::F);
  archive.cursor = (archive.cursor + 1) % archive.size();
}

struct CrF {
  double cr = 0.5;
  double f = 0.5;
};

/// Draws a (Cr, F) pair from a random archive slot: normal deviates around the
/// remembered means, Cr clamped to [0,1], F resampled while non-positive
/// (bounded retries) and truncated to 1.
inline CrF sample_cr_f(const SuccessHistoryArchive& archive, Rng& rng) {
  const std::size_t slot = rng.index(archive.size());
  CrF out;
  out.cr = std::clamp(rng.normal(archive.mu_cr[slot], 0.1), 0.0, 1.0);
  out.f = 0.5;
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double f = rng.normal(archive.mu_f[slot], 0.1);
    if (f > 0.0) {
      out.f = std::min(f, 1.0);
      break;
    }
  }
  return out;
}

/// Discrete (Cr, F) pool with success-driven selection probabilities,
/// refreshed every learning period. Used by the low-dimensional variant in
/// place of the success-history archives.
struct ParameterPool {
  struct Pair {
    double cr = 0.5;
    double f = 0.5;
  };

  std::vector<Pair> pairs;
  std::vector<double> probabilities;
  std::vector<std::uint64_t> successes;
  std::vector<std::uint64_t> attempts;
  int learning_period = 50;
  double smoothing = 1.0;
  double probability_floor = 0.05;

  explicit ParameterPool(std::vector<Pair> pool_pairs = default_pairs(), int lp = 50)
      : pairs(std::move(pool_pairs)),
        probabilities(pairs.size(), 1.0 / static_cast<double>(pairs.size())),
        successes(pairs.size(), 0),
        attempts(pairs.size(), 0),
        learning_period(lp) {
    if (pairs.empty()) throw std::invalid_argument("parameter pool must not be empty");
  }

  static std::vector<Pair> default_pairs() {
    return {{0.9, 0.9}, {0.5, 0.5}, {0.9, 0.2}, {0.6, 0.8}};
  }
};

/// Samples a pool index from the current selection distribution and counts the
/// attempt.
inline std::size_t pool_select(ParameterPool& pool, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t chosen = pool.pairs.size() - 1;
  for (std::size_t i = 0; i < pool.probabilities.size(); ++i) {
    cumulative += pool.probabilities[i];
    if (u < cumulative) {
      chosen = i;
      break;
    }
  }
  ++pool.attempts[chosen];
  return chosen;
}

/// Recomputes selection probabilities from the window's success counts
/// (Laplace-smoothed), enforces the probability floor, and resets counters.
inline void pool_update(ParameterPool& pool) {
  const std::size_t n = pool.pairs.size();
  if (pool.probability_floor * static_cast<double>(n) >= 1.0) {
    throw std::invalid_argument("parameter pool probability floor too large for pool size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += static_cast<double>(pool.successes[i]) + pool.smoothing;
  }
  for (std::size_t i = 0; i < n; ++i) {
    pool.probabilities[i] = (static_cast<double>(pool.successes[i]) + pool.smoothing) / total;
  }
  // Raise starved pairs to the floor; rescale the rest until stable.
  std::vector<bool> pinned(n, false);
  for (;;) {
    double pinned_mass = 0.0;
    double free_mass = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pinned[i] && pool.probabilities[i] < pool.probability_floor) {
        pinned[i] = true;
        changed = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        pool.probabilities[i] = pool.probability_floor;
        pinned_mass += pool.probability_floor;
      } else {
        free_mass += pool.probabilities[i];
      }
    }
    if (!changed) break;
    const double scale = (1.0 - pinned_mass) / free_mass;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pinned[i]) pool.probabilities[i] *= scale;
    }
  }
  std::fill(pool.successes.begin(), pool.successes.end(), 0);
  std::fill(pool.attempts.begin(), pool.attempts.end(), 0);
}

}  // namespace apdens
