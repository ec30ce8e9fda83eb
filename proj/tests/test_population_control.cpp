#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "apdens/population_control.hpp"
#include "apdens/problem.hpp"
#include "apdens/rng.hpp"

using namespace apdens;

namespace {

// Independent largest-remainder reference for the partition rule.
std::vector<int> partition_oracle(int np, const std::vector<std::uint64_t>& se, double se0,
                                  int min_subpop) {
  const int k = static_cast<int>(se.size());
  std::vector<int> sizes(k);
  if (np < k * min_subpop) {
    for (int s = 0; s < k; ++s) sizes[s] = np / k + (s < np % k ? 1 : 0);
    return sizes;
  }
  double total = 0.0;
  for (auto v : se) total += static_cast<double>(v) + se0;
  std::vector<std::pair<double, int>> rem(k);
  int used = 0;
  for (int s = 0; s < k; ++s) {
    const double share = (static_cast<double>(se[s]) + se0) / total * np;
    sizes[s] = static_cast<int>(std::floor(share));
    rem[s] = {share - std::floor(share), s};
    used += sizes[s];
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < np - used; ++i) sizes[rem[i].second] += 1;
  for (int s = 0; s < k; ++s) {
    while (sizes[s] < min_subpop) {
      const int largest =
          static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      sizes[largest] -= 1;
      sizes[s] += 1;
    }
  }
  return sizes;
}

Individual member(double f, double v, Vector x = {0.0}) {
  Individual m;
  m.x = std::move(x);
  m.eval.f = f;
  m.eval.violation = v;
  m.eval.max_violation = v;
  m.eval.feasible = v == 0.0;
  return m;
}

}  // namespace

TEST_CASE("partition shares follow smoothed success counts") {
  CHECK(partition_sizes(40, {10, 0, 0, 0}, 1.0, 5) == std::vector<int>{25, 5, 5, 5});
  CHECK(partition_sizes(40, {3, 3, 3, 3}, 1.0, 5) == std::vector<int>{10, 10, 10, 10});

  const auto uneven = partition_sizes(21, {0, 0, 0, 0}, 1.0, 5);
  CHECK(std::accumulate(uneven.begin(), uneven.end(), 0) == 21);
  CHECK(*std::max_element(uneven.begin(), uneven.end()) -
            *std::min_element(uneven.begin(), uneven.end()) <=
        1);

  // below the floor budget the split is uniform
  CHECK(partition_sizes(14, {10, 0, 0, 0}, 1.0, 5) == std::vector<int>{4, 4, 3, 3});
}

TEST_CASE("partition matches the largest-remainder oracle on random inputs") {
  Rng rng(808);
  for (int i = 0; i < 1000; ++i) {
    const int k = 4;
    const int np = 6 + static_cast<int>(rng.index(600));
    std::vector<std::uint64_t> se(k);
    for (auto& v : se) v = rng.index(200);
    const auto got = partition_sizes(np, se, 1.0, 5);
    CHECK(got == partition_oracle(np, se, 1.0, 5));
    CHECK(std::accumulate(got.begin(), got.end(), 0) == np);
  }
}

TEST_CASE("linear reduction formula") {
  const SizeControlConfig cfg{570, 6, 600000};
  CHECK(linear_population_size(cfg, 0) == 570);
  CHECK(linear_population_size(cfg, 300000) == 288);
  CHECK(linear_population_size(cfg, 600000) == 6);
}

TEST_CASE("size controller stages") {
  const SizeControlConfig cfg{570, 6, 600000};

  SECTION("early stage reduces linearly regardless of the feasible rate") {
    SizeControlState state;
    CHECK(next_population_size(state, cfg, 100000, 0.0, 570) ==
          linear_population_size(cfg, 100000));
  }

  SECTION("middle stage holds while no feasible member exists") {
    SizeControlState state;
    CHECK(next_population_size(state, cfg, 300000, 0.0, 288) == 288);
    CHECK(state.adaptive_entered);
    CHECK(state.npfix == 288);
    CHECK(state.fesfix == 300000);
    CHECK(next_population_size(state, cfg, 400000, 0.0, 288) == 288);

    SECTION("and shrinks with the feasible rate once one appears") {
      CHECK(next_population_size(state, cfg, 450000, 0.5, 288) == 218);
    }
  }

  SECTION("a high feasible rate latches linear reduction") {
    SizeControlState state;
    (void)next_population_size(state, cfg, 100000, 0.8, 570);
    CHECK(state.linear_latched);
    CHECK(next_population_size(state, cfg, 320000, 0.1, 300) ==
          linear_population_size(cfg, 320000));
    CHECK_FALSE(state.adaptive_entered);
  }

  SECTION("the size never grows except through the late reset") {
    SizeControlState state;
    (void)next_population_size(state, cfg, 300000, 0.0, 200);  // npfix = 200
    const int next = next_population_size(state, cfg, 310000, 0.9, 150);
    CHECK(next <= 150);
  }

  SECTION("late reset fires once when the population has collapsed") {
    SizeControlState state;
    state.linear_latched = true;
    const int raised = next_population_size(state, cfg, 560000, 0.0, 40);
    CHECK(raised == 95);  // round(570 / 6)
    CHECK(state.pesk_used);
    const int after = next_population_size(state, cfg, 570000, 0.0, raised);
    CHECK(after <= raised);
  }

  SECTION("no reset when the population is still large or feasibility is fine") {
    SizeControlState a;
    CHECK(next_population_size(a, cfg, 560000, 0.0, 300) ==
          linear_population_size(cfg, 560000));
    CHECK_FALSE(a.pesk_used);

    SizeControlState b;
    CHECK(next_population_size(b, cfg, 560000, 0.7, 40) <= 40);
    CHECK_FALSE(b.pesk_used);
  }
}

TEST_CASE("trajectory equals the linear formula while the feasible rate stays high") {
  const SizeControlConfig cfg{240, 6, 200000};
  SizeControlState state;
  int np = 240;
  for (std::uint64_t fes = 240; fes < 200000; fes += np) {
    np = next_population_size(state, cfg, fes, 0.8, np);
    REQUIRE(np == linear_population_size(cfg, fes));
  }
}

TEST_CASE("failed archive capacity and eviction") {
  FailedArchive fa;
  Rng rng(5);
  fa.set_capacity(4, rng);
  fa.insert({1.0}, rng);
  CHECK(fa.size() == 1);
  for (int i = 0; i < 10; ++i) fa.insert({static_cast<double>(i)}, rng);
  CHECK(fa.size() == 4);

  fa.insert({99.0}, rng);
  CHECK(fa.size() == 4);
  bool found = false;
  for (const auto& m : fa.members()) found |= m == Vector{99.0};
  CHECK(found);

  fa.set_capacity(2, rng);
  CHECK(fa.size() == 2);

  FailedArchive zero;
  zero.insert({1.0}, rng);
  CHECK(zero.size() == 0);  // capacity never set
}

TEST_CASE("population spread and diversity ratio") {
  std::vector<Individual> two = {member(0, 0, {-1.0}), member(0, 0, {1.0})};
  CHECK(population_spread(two) == Catch::Approx(1.0).margin(1e-15));
  CHECK(diversity_ratio(two, 1.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(diversity_ratio(two, population_spread(two)) == 1.0);

  std::vector<Individual> same = {member(0, 0, {2.0, 3.0}), member(0, 0, {2.0, 3.0})};
  CHECK(population_spread(same) == 0.0);
  CHECK(diversity_ratio(same, 1.0) == 0.0);
}

TEST_CASE("resizing keeps the comparator-best members") {
  std::vector<Individual> pop = {member(1, 0), member(2, 0), member(3, 0), member(0, 1),
                                 member(0, 2)};
  Rng rng(77);
  std::uint64_t fes = 0;
  const auto problem = make_problem("p-sph-ineq", 1);
  resize_population(pop, 3, {}, problem, 1e-4, 1000, fes, rng);
  REQUIRE(pop.size() == 3);
  CHECK(pop[0].eval.f == 1);
  CHECK(pop[1].eval.f == 2);
  CHECK(pop[2].eval.f == 3);
  CHECK(fes == 0);

  SECTION("no-op when the target equals the current size") {
    const auto before = pop;
    resize_population(pop, 3, {}, problem, 1e-4, 1000, fes, rng);
    CHECK(pop.size() == before.size());
  }
}

TEST_CASE("growing evaluates fresh uniform members") {
  const auto problem = make_problem("p-sph-ineq", 3);
  Rng rng(99);
  std::uint64_t fes = 0;
  std::vector<Individual> pop;
  for (int i = 0; i < 10; ++i) {
    Individual m;
    m.x = {1.5, 0.0, 0.0};
    m.eval = evaluate(problem, m.x, 1e-4, fes);
    pop.push_back(m);
  }
  const auto anchor = pop.front().x;
  resize_population(pop, 95, {}, problem, 1e-4, 100000, fes, rng);
  CHECK(pop.size() == 95);
  CHECK(fes == 95);  // 10 initial + 85 growth evaluations
  CHECK(pop.front().x == anchor);
  for (const auto& m : pop) {
    for (int j = 0; j < 3; ++j) {
      CHECK(m.x[j] >= problem.lower[j]);
      CHECK(m.x[j] <= problem.upper[j]);
    }
  }

  SECTION("growth stops at the evaluation budget") {
    std::uint64_t tight_fes = 0;
    std::vector<Individual> small;
    for (int i = 0; i < 3; ++i) {
      Individual m;
      m.x = {0.5, 0.5, 0.5};
      m.eval = evaluate(problem, m.x, 1e-4, tight_fes);
      small.push_back(m);
    }
    resize_population(small, 50, {}, problem, 1e-4, 10, tight_fes, rng);
    CHECK(tight_fes == 10);
    CHECK(small.size() == 10);
  }
}
