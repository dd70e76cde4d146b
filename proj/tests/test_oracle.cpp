#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bnslq/arcs.hpp"
#include "bnslq/errors.hpp"
#include "bnslq/oracle.hpp"
#include "bnslq/qubo.hpp"
#include "bnslq/solvers.hpp"
#include "support/random_instances.hpp"

using namespace bnslq;

namespace {

bool has_arc(const std::vector<VarMask>& dag, int from, int to) {
  return (dag[static_cast<std::size_t>(to)] >> from) & 1U;
}

}  // namespace

TEST_CASE("empty database: every feasible DAG is optimal") {
  const auto table = score_table(load_csv_text("A,B,C\n"), 2, PriorSpec::k2());
  const auto result = exact_bnsl(table, 2);
  CHECK(result.best_score == 0.0);
  CHECK(result.count_feasible == 25);
  CHECK(result.best_dags.size() == 25);
  auto all = testing::all_dags(3, 2);
  std::sort(all.begin(), all.end());
  CHECK(result.best_dags == all);

  const auto m1 = exact_bnsl(table, 1);
  CHECK(m1.count_feasible == testing::all_dags(3, 1).size());
}

TEST_CASE("required arc on an empty database") {
  const auto table = score_table(load_csv_text("A,B,C\n"), 2, PriorSpec::k2());
  const auto result = exact_bnsl(table, 2, {{{0, 1}}, {}});
  std::vector<std::vector<VarMask>> expected;
  for (const auto& d : testing::all_dags(3, 2))
    if (has_arc(d, 0, 1)) expected.push_back(d);
  std::sort(expected.begin(), expected.end());
  CHECK(result.best_dags == expected);
  CHECK(result.count_feasible == expected.size());
}

TEST_CASE("two copies of one variable are best explained by a single arc") {
  std::vector<State> cases;
  for (int c = 0; c < 50; ++c) cases.insert(cases.end(), {c % 2, c % 2});
  const Dataset d({"X0", "X1"}, {2, 2}, cases);
  const auto table = score_table(d, 1, PriorSpec::k2());
  const auto result = exact_bnsl(table, 1);

  // Three structures by hand: empty, X0 -> X1, X1 -> X0.
  const double marginal = -(std::lgamma(2.0) - std::lgamma(52.0) + 2 * std::lgamma(26.0));
  const double conditional = 2 * std::log(26.0);  // two pure rows of 25 cases
  const double empty = 2 * marginal;
  const double one_arc = marginal + conditional;
  CHECK(one_arc < empty);
  CHECK(result.best_score == doctest::Approx(one_arc).epsilon(1e-12));
  REQUIRE(result.best_dags.size() == 2);
  CHECK(result.best_dags[0] == std::vector<VarMask>{0, 0b01});
  CHECK(result.best_dags[1] == std::vector<VarMask>{0b10, 0});
  CHECK(result.count_feasible == 3);
}

TEST_CASE("oracle errors") {
  const auto t3 = testing::random_score_table(3, 2, 1);
  CHECK_THROWS_AS(exact_bnsl(t3, 2, {{{0, 1}, {1, 2}, {2, 0}}, {}}), ValidationError);
  CHECK_THROWS_AS(exact_bnsl(t3, 1, {{{0, 2}, {1, 2}}, {}}), ValidationError);
  CHECK_THROWS_AS(exact_bnsl(t3, 3), ArgumentError);
  CHECK_THROWS_AS(exact_bnsl(testing::random_score_table(6, 1, 1), 1), ArgumentError);
}

TEST_CASE("property: oracle equals a brute-force scan of all DAGs") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const int m = std::min(n - 1, 1 + static_cast<int>(seed % 2));
    const auto table = testing::random_score_table(n, m, seed);
    double best = INFINITY;
    for (const auto& d : testing::all_dags(n, m)) best = std::min(best, structure_score(table, d));
    const auto result = exact_bnsl(table, m);
    CHECK(result.best_score == doctest::Approx(best).epsilon(1e-14));
    for (const auto& d : result.best_dags) {
      CHECK(is_acyclic(d));
      CHECK(std::abs(structure_score(table, d) - best) <= 1e-9);
      for (VarMask p : d) CHECK(popcount(p) <= m);
    }
  }
}

TEST_CASE("oracle results do not depend on the thread count") {
  const auto table = testing::random_score_table(5, 2, 3);
  const auto a = exact_bnsl(table, 2, {}, 1);
  const auto b = exact_bnsl(table, 2, {}, 4);
  CHECK(a.best_score == b.best_score);
  CHECK(a.best_dags == b.best_dags);
  CHECK(a.count_feasible == b.count_feasible);
}

TEST_CASE("a smaller parent limit than the table's") {
  const auto table = testing::random_score_table(4, 2, 8);
  const auto r = exact_bnsl(table, 1);
  CHECK(r.count_feasible == testing::all_dags(4, 1).size());
  for (const auto& d : r.best_dags)
    for (VarMask p : d) CHECK(popcount(p) <= 1);
}

TEST_CASE("property: oracle and QUBO minimum agree") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 3 + static_cast<int>(seed % 3);
    const int m = 1 + static_cast<int>((seed / 3) % 2);
    const auto table = score_table(testing::random_dataset(n, m, 20 + seed * 7, seed, 2), m, PriorSpec::k2());
    const auto inst = compile(table);
    const auto oracle = exact_bnsl(table, m);
    const auto st = solve_structured(inst.poly, inst.weights, inst.vmap);
    const auto state = decode(inst.vmap, st.bits);
    CHECK(std::abs(st.energy - oracle.best_score) <= 1e-6);
    CHECK(state.feasible());
    CHECK(std::abs(structure_score(table, state.parents) - oracle.best_score) <= 1e-6);
  }
}

TEST_CASE("property: constrained oracle and constrained QUBO agree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto table = score_table(testing::random_dataset(4, 2, 100, 70 + seed, 2), 2, PriorSpec::k2());
    const int a = static_cast<int>(seed % 4);
    const int b = (a + 1 + static_cast<int>(seed % 3)) % 4;
    const ArcConstraints c{{{a, b}}, {{b, (b + 1) % 4 == a ? (b + 2) % 4 : (b + 1) % 4}}};
    const auto inst = compile(table, c);
    const auto oracle = exact_bnsl(table, 2, c);
    const auto st = solve_structured(inst.poly, inst.weights, inst.vmap);
    const auto state = decode(inst.vmap, st.bits);
    CHECK(std::abs(st.energy - oracle.best_score) <= 1e-6);
    CHECK(state.feasible());
    for (const auto& [from, to] : c.required) CHECK(state.arc(from, to));
    for (const auto& [from, to] : c.forbidden) CHECK_FALSE(state.arc(from, to));
  }
}
