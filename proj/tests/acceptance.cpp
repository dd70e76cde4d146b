// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>

#include "bnslq/arcs.hpp"
#include "bnslq/oracle.hpp"
#include "bnslq/qubo.hpp"
#include "bnslq/solvers.hpp"
#include "support/random_instances.hpp"

using namespace bnslq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

LocalScoreTable binary_table(int n, int m, std::size_t cases, std::uint64_t seed) {
  return score_table(testing::random_dataset(n, m, cases, seed, 2), m, PriorSpec::k2());
}

std::set<std::pair<int, int>> support(const Qubo& q) {
  std::set<std::pair<int, int>> s;
  for (int a = 0; a < q.num_bits; ++a)
    if (q.linear[static_cast<std::size_t>(a)] != 0.0) s.insert({a, a});
  for (const auto& [key, v] : q.quadratic) s.insert(key);
  return s;
}

// 1. Polynomial evaluation reproduces every table entry.
Outcome score_round_trip() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::size_t checked = 0, bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % static_cast<unsigned>(n - 1));
    const std::size_t cases = rng() % 31;
    const auto table = score_table(testing::random_dataset(n, m, cases, rng(), 3), m,
                                   trial % 2 ? PriorSpec::k2() : PriorSpec::bdeu(1.0));
    const auto poly = w_coefficients(table);
    for (int i = 0; i < n; ++i) {
      for (const auto& f : table.families(i)) {
        const double got = poly.eval_child(i, f.parents);
        ++checked;
        if (std::abs(got - f.score) > 1e-9 * std::max(1.0, std::abs(f.score))) ++bad;
      }
    }
  }
  const double t = seconds_since(start);
  return {bad == 0 && t < 10.0, fmt::format("{} entries, {} mismatches, {:.2f}s (limit 10s)", checked, bad, t)};
}

// 2. Delta exact for m = 2, an upper bound for m = 3.
Outcome delta_exactness() {
  std::mt19937_64 rng(2);
  int exact_bad = 0, bound_bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto poly = testing::random_polynomial(n, 2, rng());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        const double err = std::abs(delta_unclamped(poly, j, i) - testing::brute_force_delta_unclamped(poly, j, i));
        worst = std::max(worst, err);
        if (err > 1e-12) ++exact_bad;
      }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 3);
    const auto poly = testing::random_polynomial(n, 3, rng());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        if (delta_unclamped(poly, j, i) < testing::brute_force_delta_unclamped(poly, j, i)) ++bound_bad;
      }
  }
  return {exact_bad == 0 && bound_bad == 0,
          fmt::format("m=2: {} pairs off (max error {:.1e}); m=3: {} bound violations", exact_bad, worst, bound_bad)};
}

// 3. Minimized penalties never increase under arc removal.
Outcome monotonicity() {
  std::mt19937_64 rng(3);
  int max_bad = 0, cycle_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = std::min(n - 1, 1 + static_cast<int>(rng() % 2));
    const auto weights = derive_weights(delta_table(testing::random_polynomial(n, m, rng())), n);
    ArcBits d(static_cast<std::size_t>(num_arcs(n)), 0);
    for (auto& b : d) b = static_cast<std::uint8_t>(rng() % 2);
    std::vector<std::size_t> on;
    for (std::size_t a = 0; a < d.size(); ++a)
      if (d[a]) on.push_back(a);
    if (on.empty()) {
      on.push_back(rng() % d.size());
      d[on[0]] = 1;
    }
    ArcBits removed = d;
    removed[on[rng() % on.size()]] = 0;

    const auto pd = parent_masks(n, d), pr = parent_masks(n, removed);
    double hd = 0.0, hr = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = weights.delta_max[static_cast<std::size_t>(i)];
      hd += bruteforce_min_slack(popcount(pd[static_cast<std::size_t>(i)]), w, m);
      hr += bruteforce_min_slack(popcount(pr[static_cast<std::size_t>(i)]), w, m);
    }
    if (hr > hd) ++max_bad;
    if (bruteforce_min_order(removed, weights, n) > bruteforce_min_order(d, weights, n)) ++cycle_bad;
  }
  return {max_bad == 0 && cycle_bad == 0, fmt::format("200 pairs: {} H_max and {} H_cycle increases", max_bad, cycle_bad)};
}

// 4. Ground state equals the oracle optimum and decodes cleanly.
Outcome overall_sufficiency() {
  std::string detail;
  bool pass = true;
  for (int n : {3, 4}) {
    for (int m : {1, 2}) {
      const auto start = Clock::now();
      int ok = 0;
      for (int trial = 0; trial < 20; ++trial) {
        const auto table = binary_table(n, m, 100, static_cast<std::uint64_t>(4000 + 100 * n + 10 * m + trial));
        const auto inst = compile(table);
        const Solution s = n == 3 ? solve_exhaustive(inst.qubo) : solve_structured(inst.poly, inst.weights, inst.vmap);
        const auto state = decode(inst.vmap, s.bits);
        const double best = exact_bnsl(table, m).best_score;
        if (std::abs(s.energy - best) <= 1e-6 && state.feasible()) ++ok;
      }
      const double t = seconds_since(start);
      pass = pass && ok == 20 && t < 120.0;
      detail += fmt::format("{}n={},m={}: {}/20 in {:.2f}s", detail.empty() ? "" : "; ", n, m, ok, t);
    }
  }
  return {pass, detail};
}

// 5. The transitivity part counts directed 3-cycles.
Outcome triangle_counting() {
  std::mt19937_64 rng(5);
  int bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto poly = testing::random_polynomial(n, 2, rng());
    auto weights = derive_weights(delta_table(poly), n);
    const auto vmap = make_variable_map(n, 2);
    std::vector<std::uint8_t> order(static_cast<std::size_t>(num_pairs(n)));
    for (auto& r : order) r = static_cast<std::uint8_t>(rng() % 2);
    std::vector<std::uint8_t> logical(static_cast<std::size_t>(vmap.num_logical()), 0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        logical[static_cast<std::size_t>(vmap.order_bit(i, j))] = order[static_cast<std::size_t>(pair_index(n, i, j))];
    const Bits bits = vmap.restrict(logical);
    const int triangles = testing::count_cyclic_triples(n, order);

    // Derived weight: floating-point sum of multiples of delta_trans.
    const double derived = energy(assemble_parts(poly, weights, vmap).trans, bits);
    const double rel = std::abs(derived - weights.delta_trans * triangles) / std::max(1.0, weights.delta_trans * triangles);
    worst = std::max(worst, rel);
    if (rel > 1e-14 || h_trans(n, order, weights.delta_trans) != weights.delta_trans * triangles) ++bad;
    // Dyadic weight: every partial sum is representable, so equality is exact.
    weights.delta_trans = 0.625;
    if (energy(assemble_parts(poly, weights, vmap).trans, bits) != 0.625 * triangles) ++bad;
  }
  return {bad == 0, fmt::format("100 tournaments: {} mismatches (exact at dyadic weight; derived-weight rounding {:.1e})", bad, worst)};
}

// 6. Energy of every feasible structure equals its score.
Outcome feasible_exactness() {
  int structures = 0, bad = 0;
  double worst = 0.0;
  for (int m : {1, 2}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto table = binary_table(3, m, 100, 600 + seed);
      const auto inst = compile(table);
      for (const auto& dag : testing::all_dags(3, m)) {
        const double err = std::abs(energy(inst.qubo, testing::canonical_bits(inst.vmap, dag)) - structure_score(table, dag));
        worst = std::max(worst, err);
        ++structures;
        if (err > 1e-6) ++bad;
      }
    }
  }
  return {bad == 0, fmt::format("{} structures, {} off, max error {:.1e}", structures, bad, worst)};
}

// 7. Free-bit counts.
Outcome bit_counts() {
  std::string detail;
  bool pass = true;
  for (auto [n, m] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {7, 2}, {10, 2}}) {
    const int expected = n * (n - 1) + n * (n - 1) / 2 + n * static_cast<int>(std::ceil(std::log2(m + 1)));
    const int got = make_variable_map(n, m).num_free();
    pass = pass && got == expected;
    detail += fmt::format("{}({},{})={}", detail.empty() ? "" : " ", n, m, got);
  }
  return {pass, detail};
}

// 8. SA at defaults reaches the optimum.
Outcome sa_reliability() {
  const auto start = Clock::now();
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto table = binary_table(5, 2, 100, static_cast<std::uint64_t>(8000 + trial));
    const auto inst = compile(table);
    SaParams params;
    params.seed = static_cast<std::uint64_t>(trial);
    const auto s = solve_sa(inst.qubo, params);
    if (std::abs(s.energy - exact_bnsl(table, 2).best_score) <= 1e-6 && decode(inst.vmap, s.bits).feasible()) ++hits;
  }
  const double t = seconds_since(start);
  return {hits >= 18 && t < 300.0, fmt::format("{}/20 optimal (need 18), {:.1f}s (limit 300s)", hits, t)};
}

// 9. Constrained QUBO optimum equals the constrained oracle.
Outcome prior_substitution() {
  std::mt19937_64 rng(9);
  int ok = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto table = binary_table(4, 2, 100, 900 + static_cast<std::uint64_t>(trial));
    std::vector<Arc> arcs;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) arcs.push_back({i, j});
    std::shuffle(arcs.begin(), arcs.end(), rng);
    const Arc required = arcs[0];
    Arc forbidden = arcs[1];
    for (const Arc& a : arcs)
      if (a != required && a != Arc{required.second, required.first}) {
        forbidden = a;
        break;
      }
    const ArcConstraints c{{required}, {forbidden}};
    const auto inst = compile(table, c);
    const auto s = solve_structured(inst.poly, inst.weights, inst.vmap);
    const auto state = decode(inst.vmap, s.bits);
    const double best = exact_bnsl(table, 2, c).best_score;
    if (std::abs(s.energy - best) <= 1e-6 && state.feasible() && state.arc(required.first, required.second) &&
        !state.arc(forbidden.first, forbidden.second))
      ++ok;
  }
  return {ok == 10, fmt::format("{}/10 constrained instances match", ok)};
}

// 10. Penalty sparsity and score candidates depend only on (n, m).
Outcome instance_independence() {
  int diffs = 0;
  std::string sizes;
  for (auto [n, m] : std::vector<std::pair<int, int>>{{3, 1}, {4, 2}, {5, 2}, {6, 2}}) {
    const auto a = compile(binary_table(n, m, 100, 1000 + static_cast<std::uint64_t>(n)));
    const auto b = compile(score_table(testing::random_dataset(n, m, 57, 2000 + static_cast<std::uint64_t>(n), 3), m, PriorSpec::bdeu(1.0)));
    const auto pa = assemble_parts(a.poly, a.weights, a.vmap);
    const auto pb = assemble_parts(b.poly, b.weights, b.vmap);
    if (support(pa.max) != support(pb.max)) ++diffs;
    if (support(pa.consist) != support(pb.consist)) ++diffs;
    if (support(pa.trans) != support(pb.trans)) ++diffs;
    std::set<std::pair<int, int>> candidates;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const int aj = a.vmap.arc_bit(j, i);
        candidates.insert({aj, aj});
        if (m == 2)
          for (int k = j + 1; k < n; ++k)
            if (k != i) candidates.insert({aj, a.vmap.arc_bit(k, i)});
      }
    for (const auto* p : {&pa, &pb})
      for (const auto& key : support(p->score))
        if (!candidates.count(key)) ++diffs;
    if (pa.score.linear == pb.score.linear) ++diffs;  // values must differ
    sizes += fmt::format("{}({},{})", sizes.empty() ? "" : " ", n, m);
  }
  return {diffs == 0, fmt::format("sizes {}: {} structural differences", sizes, diffs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"score round-trip", score_round_trip},
      {"delta exactness", delta_exactness},
      {"monotonicity of minimized penalties", monotonicity},
      {"overall sufficiency", overall_sufficiency},
      {"transitivity triangle counting", triangle_counting},
      {"feasible-state exactness", feasible_exactness},
      {"bit-count formulas", bit_counts},
      {"SA reliability", sa_reliability},
      {"prior-information substitution", prior_substitution},
      {"instance-independent structure", instance_independence},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failures;
    std::cout << fmt::format("AC{:<2} {} {}: {} [{:.2f}s]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first,
                             o.detail, seconds_since(start))
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
