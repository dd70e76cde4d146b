#include "support/random_instances.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "bnslq/arcs.hpp"

namespace bnslq::testing {

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(fmt::format("X{}", i));
  return names;
}

std::vector<VarMask> random_dag(int n, int m, std::mt19937_64& rng, double arc_probability) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(arc_probability);
  std::vector<VarMask> parents(static_cast<std::size_t>(n), 0);
  for (int pos = 1; pos < n; ++pos) {
    std::vector<int> earlier(order.begin(), order.begin() + pos);
    std::shuffle(earlier.begin(), earlier.end(), rng);
    const int child = order[static_cast<std::size_t>(pos)];
    for (int p : earlier) {
      if (popcount(parents[static_cast<std::size_t>(child)]) >= m) break;
      if (coin(rng)) parents[static_cast<std::size_t>(child)] |= bit_of(p);
    }
  }
  return parents;
}

Dataset sample_dataset(const std::vector<VarMask>& parents, std::size_t cases, std::mt19937_64& rng,
                       int max_card) {
  const int n = static_cast<int>(parents.size());
  std::uniform_int_distribution<int> card_dist(2, max_card);
  std::vector<int> cards(static_cast<std::size_t>(n));
  for (auto& c : cards) c = card_dist(rng);

  // Topological order for forward sampling.
  std::vector<int> order;
  VarMask placed = 0;
  while (static_cast<int>(order.size()) < n) {
    for (int v = 0; v < n; ++v) {
      if (!(placed & bit_of(v)) && (parents[static_cast<std::size_t>(v)] & ~placed) == 0) {
        order.push_back(v);
        placed |= bit_of(v);
      }
    }
  }

  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<std::vector<std::vector<double>>> cpts(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    std::size_t q = 1;
    for (int p : members_of(parents[static_cast<std::size_t>(v)])) q *= static_cast<std::size_t>(cards[static_cast<std::size_t>(p)]);
    auto& cpt = cpts[static_cast<std::size_t>(v)];
    cpt.resize(q);
    for (auto& row : cpt) {
      row.resize(static_cast<std::size_t>(cards[static_cast<std::size_t>(v)]));
      for (auto& x : row) x = gamma(rng) + 1e-3;
    }
  }

  std::vector<State> data(cases * static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < cases; ++c) {
    State* row = &data[c * static_cast<std::size_t>(n)];
    for (int v : order) {
      std::size_t j = 0;
      std::size_t radix = 1;
      for (int p : members_of(parents[static_cast<std::size_t>(v)])) {
        j += static_cast<std::size_t>(row[p]) * radix;
        radix *= static_cast<std::size_t>(cards[static_cast<std::size_t>(p)]);
      }
      const auto& w = cpts[static_cast<std::size_t>(v)][j];
      std::discrete_distribution<int> pick(w.begin(), w.end());
      row[v] = pick(rng);
    }
  }
  return Dataset(default_names(n), cards, std::move(data));
}

Dataset random_dataset(int n, int m, std::size_t cases, std::uint64_t seed, int max_card) {
  std::mt19937_64 rng(seed);
  const auto dag = random_dag(n, m, rng);
  return sample_dataset(dag, cases, rng, max_card);
}

LocalScoreTable random_score_table(int n, int m, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<std::vector<FamilyScore>> families(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    for (VarMask s : subsets_up_to(others, m)) families[static_cast<std::size_t>(i)].push_back({s, dist(rng)});
  }
  return LocalScoreTable(n, m, PriorSpec::k2(), default_names(n), std::move(families));
}

ScorePolynomial random_polynomial(int n, int m, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<std::vector<Coefficient>> coeffs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    for (VarMask s : subsets_up_to(others, m)) coeffs[static_cast<std::size_t>(i)].push_back({s, dist(rng)});
  }
  return ScorePolynomial(n, m, std::move(coeffs));
}

double brute_force_delta_unclamped(const ScorePolynomial& poly, int from, int child) {
  const int n = poly.num_variables();
  const int m = poly.max_parents();
  std::vector<int> others;
  for (int k = 0; k < n; ++k)
    if (k != from && k != child) others.push_back(k);
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t combos = std::size_t{1} << others.size();
  for (std::size_t bits = 0; bits < combos; ++bits) {
    VarMask active = 0;
    for (std::size_t t = 0; t < others.size(); ++t)
      if ((bits >> t) & 1U) active |= bit_of(others[t]);
    double gain = 0.0;
    for (VarMask sub : subsets_up_to(members_of(active), m - 1)) gain -= poly.w(child, sub | bit_of(from));
    best = std::max(best, gain);
  }
  return best;
}

std::vector<std::vector<VarMask>> all_dags(int n, int m) {
  std::vector<std::vector<VarMask>> choices(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    choices[static_cast<std::size_t>(i)] = subsets_up_to(others, m);
  }
  std::vector<std::vector<VarMask>> out;
  std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
  std::vector<VarMask> parents(static_cast<std::size_t>(n), 0);
  while (true) {
    for (int i = 0; i < n; ++i) parents[static_cast<std::size_t>(i)] = choices[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
    if (is_acyclic(parents)) out.push_back(parents);
    int pos = 0;
    while (pos < n && ++pick[static_cast<std::size_t>(pos)] == choices[static_cast<std::size_t>(pos)].size()) {
      pick[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return out;
}

std::vector<int> topological_order(const std::vector<VarMask>& parents) {
  const int n = static_cast<int>(parents.size());
  std::vector<int> order;
  VarMask placed = 0;
  while (static_cast<int>(order.size()) < n) {
    bool progress = false;
    for (int v = 0; v < n; ++v) {
      if (!(placed & bit_of(v)) && (parents[static_cast<std::size_t>(v)] & ~placed) == 0) {
        order.push_back(v);
        placed |= bit_of(v);
        progress = true;
        break;
      }
    }
    if (!progress) throw std::logic_error("topological_order: graph has a cycle");
  }
  return order;
}

std::vector<std::uint8_t> canonical_logical_bits(const VariableMap& vmap,
                                                 const std::vector<VarMask>& parents) {
  const int n = vmap.num_variables();
  const int m = vmap.max_parents();
  std::vector<std::uint8_t> logical(static_cast<std::size_t>(vmap.num_logical()), 0);
  for (int to = 0; to < n; ++to)
    for (int from : members_of(parents[static_cast<std::size_t>(to)]))
      logical[static_cast<std::size_t>(vmap.arc_bit(from, to))] = 1;
  const auto order = topological_order(parents);
  std::vector<int> position(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) position[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      logical[static_cast<std::size_t>(vmap.order_bit(i, j))] =
          position[static_cast<std::size_t>(i)] < position[static_cast<std::size_t>(j)] ? 1 : 0;
  for (int i = 0; i < n; ++i) {
    const int y = m - popcount(parents[static_cast<std::size_t>(i)]);
    for (int l = 0; l < vmap.slack_bits_per_node(); ++l)
      logical[static_cast<std::size_t>(vmap.slack_bit(i, l))] = static_cast<std::uint8_t>((y >> l) & 1);
  }
  return logical;
}

Bits canonical_bits(const VariableMap& vmap, const std::vector<VarMask>& parents) {
  return vmap.restrict(canonical_logical_bits(vmap, parents));
}

int count_cyclic_triples(int n, const std::vector<std::uint8_t>& order) {
  auto before = [&](int a, int b) {
    const auto r = order[static_cast<std::size_t>(pair_index(n, a, b))];
    return a < b ? r == 1 : r == 0;
  };
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const bool ij = before(i, j), jk = before(j, k), ki = before(k, i);
        if ((ij && jk && ki) || (!ij && !jk && !ki)) ++count;
      }
  return count;
}

}  // namespace bnslq::testing
