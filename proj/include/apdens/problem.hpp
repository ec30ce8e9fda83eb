#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace apdens {

using Vector = std::vector<double>;

/// Default tolerance used when folding equality constraints into violation
/// amounts: |h(x)| - delta clipped at zero.
inline constexpr double kDefaultEqualityTolerance = 1e-4;

struct KnownOptimum {
  double f = 0.0;
  Vector x;
};

/// A box-bounded problem: minimize f(x) subject to g_i(x) <= 0 and h_j(x) == 0.
/// Immutable after construction and safe to share across concurrent runs.
struct ConstrainedProblem {
  using ScalarFn = std::function<double(const Vector&)>;

  std::string name;
  int dim = 0;
  Vector lower;
  Vector upper;
  ScalarFn objective;
  std::vector<ScalarFn> inequalities;  // g_i(x) <= 0
  std::vector<ScalarFn> equalities;    // h_j(x) == 0
  std::optional<KnownOptimum> optimum;

  int num_inequalities() const { return static_cast<int>(inequalities.size()); }
  int num_equalities() const { return static_cast<int>(equalities.size()); }
  int num_constraints() const { return num_inequalities() + num_equalities(); }
};

/// Objective and constraint values of one decision vector, together with the
/// derived violation measures. `violations[i]` is the clipped amount by which
/// constraint i is broken (equalities get the delta slack), `violation` is
/// their mean and `max_violation` the largest single amount.
struct Evaluation {
  double f = 0.0;
  Vector g;
  Vector h;
  Vector violations;
  double violation = 0.0;
  double max_violation = 0.0;
  bool feasible = true;

  bool operator==(const Evaluation&) const = default;
};

/// A population member: decision vector, its evaluation, and the index of the
/// subpopulation it currently belongs to.
struct Individual {
  Vector x;
  Evaluation eval;
  int subpop = 0;
};

struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Evaluates x on the problem and increments the caller's evaluation counter.
/// Throws EvaluationError if the problem produces a non-finite value.
inline Evaluation evaluate(const ConstrainedProblem& problem, const Vector& x, double delta,
                           std::uint64_t& fes) {
  if (static_cast<int>(x.size()) != problem.dim) {
    throw ProblemError("evaluate: vector length " + std::to_string(x.size()) +
                       " does not match problem dimension " + std::to_string(problem.dim));
  }
  Evaluation ev;
  ev.f = problem.objective(x);
  if (!std::isfinite(ev.f)) {
    throw EvaluationError("problem '" + problem.name + "': non-finite objective value");
  }
  const std::size_t q = problem.inequalities.size();
  const std::size_t m = q + problem.equalities.size();
  ev.g.reserve(q);
  ev.h.reserve(problem.equalities.size());
  ev.violations.reserve(m);
  for (const auto& g : problem.inequalities) {
    const double value = g(x);
    if (!std::isfinite(value)) {
      throw EvaluationError("problem '" + problem.name + "': non-finite inequality constraint");
    }
    ev.g.push_back(value);
    ev.violations.push_back(std::max(value, 0.0));
  }
  for (const auto& h : problem.equalities) {
    const double value = h(x);
    if (!std::isfinite(value)) {
      throw EvaluationError("problem '" + problem.name + "': non-finite equality constraint");
    }
    ev.h.push_back(value);
    ev.violations.push_back(std::max(std::abs(value) - delta, 0.0));
  }
  double sum = 0.0;
  double worst = 0.0;
  for (double amount : ev.violations) {
    sum += amount;
    worst = std::max(worst, amount);
  }
  ev.violation = m > 0 ? sum / static_cast<double>(m) : 0.0;
  ev.max_violation = worst;
  ev.feasible = ev.violation == 0.0;
  ++fes;
  return ev;
}

inline Evaluation evaluate(const ConstrainedProblem& problem, const Vector& x,
                           double delta = kDefaultEqualityTolerance) {
  std::uint64_t fes = 0;
  return evaluate(problem, x, delta, fes);
}

/// Registry entry: how to build a problem plus the facts the manifest reports.
struct ProblemInfo {
  std::string name;
  int min_dim = 1;
  int max_dim = 1;
  int default_dim = 1;
  int num_inequalities = 0;
  int num_equalities = 0;
  bool has_known_optimum = false;
  std::function<ConstrainedProblem(int)> make;
};

namespace detail {

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline double square_sum(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double plain_sum(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

inline ConstrainedProblem make_sphere_ineq(int dim) {
  ConstrainedProblem p;
  p.name = "p-sph-ineq";
  p.dim = dim;
  p.lower.assign(dim, -10.0);
  p.upper.assign(dim, 10.0);
  p.objective = square_sum;
  p.inequalities.push_back([](const Vector& x) { return 1.0 - x[0]; });
  Vector best(dim, 0.0);
  best[0] = 1.0;
  p.optimum = KnownOptimum{1.0, std::move(best)};
  return p;
}

inline ConstrainedProblem make_linear_ball(int dim) {
  ConstrainedProblem p;
  p.name = "p-lin-ball";
  p.dim = dim;
  p.lower.assign(dim, -2.0);
  p.upper.assign(dim, 2.0);
  p.objective = plain_sum;
  p.inequalities.push_back([](const Vector& x) { return square_sum(x) - 1.0; });
  // Nudge the stored minimizer inward by ulps until it is feasible in floating
  // point; -1/sqrt(D) itself can land a rounding error outside the ball.
  double r = -1.0 / std::sqrt(static_cast<double>(dim));
  while (r * r * static_cast<double>(dim) > 1.0) r = std::nextafter(r, 0.0);
  p.optimum = KnownOptimum{-std::sqrt(static_cast<double>(dim)), Vector(dim, r)};
  return p;
}

inline ConstrainedProblem make_equality_line(int dim) {
  ConstrainedProblem p;
  p.name = "p-eq-line";
  p.dim = dim;
  p.lower.assign(dim, -5.0);
  p.upper.assign(dim, 5.0);
  p.objective = square_sum;
  p.equalities.push_back([](const Vector& x) { return plain_sum(x) - 1.0; });
  p.optimum = KnownOptimum{1.0 / static_cast<double>(dim), Vector(dim, 1.0 / static_cast<double>(dim))};
  return p;
}

inline ConstrainedProblem make_rosenbrock_cubic(int dim) {
  ConstrainedProblem p;
  p.name = "p-rosen-cubic";
  p.dim = dim;
  p.lower = {-1.5, -0.5};
  p.upper = {1.5, 2.5};
  p.objective = [](const Vector& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  p.inequalities.push_back([](const Vector& x) {
    const double c = x[0] - 1.0;
    return c * c * c - x[1] + 1.0;
  });
  p.inequalities.push_back([](const Vector& x) { return x[0] + x[1] - 2.0; });
  p.optimum = KnownOptimum{0.0, Vector{1.0, 1.0}};
  return p;
}

inline ConstrainedProblem make_infeasible_tight(int dim) {
  ConstrainedProblem p;
  p.name = "p-infeas-tight";
  p.dim = dim;
  p.lower.assign(dim, -10.0);
  p.upper.assign(dim, 10.0);
  p.objective = square_sum;
  // x1 >= 1 and x1 <= -1 cannot hold together; every point is infeasible.
  p.inequalities.push_back([](const Vector& x) { return 1.0 - x[0]; });
  p.inequalities.push_back([](const Vector& x) { return x[0] + 1.0; });
  return p;
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, ProblemInfo> entries;

  Registry() {
    add({"p-sph-ineq", 1, 100, 10, 1, 0, true, make_sphere_ineq});
    add({"p-lin-ball", 1, 100, 10, 1, 0, true, make_linear_ball});
    add({"p-eq-line", 1, 100, 10, 0, 1, true, make_equality_line});
    add({"p-rosen-cubic", 2, 2, 2, 2, 0, true, make_rosenbrock_cubic});
    add({"p-infeas-tight", 1, 100, 2, 2, 0, false, make_infeasible_tight});
  }

  void add(ProblemInfo info) { entries[info.name] = std::move(info); }
};

inline Registry& registry() {
  static Registry instance;
  return instance;
}

}  // namespace detail

/// Registers a user problem under info.name (lowercased). Existing entries of
/// the same name are replaced.
inline void register_problem(ProblemInfo info) {
  auto& reg = detail::registry();
  std::lock_guard lock(reg.mutex);
  info.name = detail::lowercase(info.name);
  reg.add(std::move(info));
}

inline void unregister_problem(std::string_view name) {
  auto& reg = detail::registry();
  std::lock_guard lock(reg.mutex);
  reg.entries.erase(detail::lowercase(name));
}

/// Snapshot of all registered problems, sorted by name.
inline std::vector<ProblemInfo> problem_manifest() {
  auto& reg = detail::registry();
  std::lock_guard lock(reg.mutex);
  std::vector<ProblemInfo> out;
  out.reserve(reg.entries.size());
  for (const auto& [_, info] : reg.entries) out.push_back(info);
  return out;
}

inline ProblemInfo problem_info(std::string_view name) {
  auto& reg = detail::registry();
  std::lock_guard lock(reg.mutex);
  const auto it = reg.entries.find(detail::lowercase(name));
  if (it == reg.entries.end()) {
    throw ProblemError("unknown problem '" + std::string(name) + "'");
  }
  return it->second;
}

/// Builds a registered problem at the requested dimension.
inline ConstrainedProblem make_problem(std::string_view name, int dim) {
  const ProblemInfo info = problem_info(name);
  if (dim < info.min_dim || dim > info.max_dim) {
    throw ProblemError("problem '" + info.name + "' does not support dimension " +
                       std::to_string(dim) + " (allowed " + std::to_string(info.min_dim) + ".." +
                       std::to_string(info.max_dim) + ")");
  }
  return info.make(dim);
}

}  // namespace apdens
