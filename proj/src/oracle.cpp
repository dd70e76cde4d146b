#include "bnslq/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "bnslq/arcs.hpp"
#include "bnslq/errors.hpp"

namespace bnslq {

double structure_score(const LocalScoreTable& table, const std::vector<VarMask>& parents) {
  double total = 0.0;
  for (int i = 0; i < table.num_variables(); ++i) total += table.score(i, parents[static_cast<std::size_t>(i)]);
  return total;
}

namespace {

struct Choice {
  VarMask parents;
  double score;
};

struct Partial {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<VarMask>> dags;
  std::size_t feasible = 0;

  void offer(double score, const std::vector<VarMask>& parents) {
    ++feasible;
    if (score < best - kOracleTieTolerance) {
      best = score;
      dags.clear();
      dags.push_back(parents);
    } else if (score <= best + kOracleTieTolerance) {
      best = std::min(best, score);
      dags.push_back(parents);
    }
  }

  void merge(Partial&& other) {
    feasible += other.feasible;
    best = std::min(best, other.best);
    dags.insert(dags.end(), std::make_move_iterator(other.dags.begin()),
                std::make_move_iterator(other.dags.end()));
  }
};

}  // namespace

OracleResult exact_bnsl(const LocalScoreTable& table, int m, const ArcConstraints& constraints,
                        int threads) {
  const int n = table.num_variables();
  if (n > kMaxOracleVariables) {
    throw ArgumentError(fmt::format("exact search is limited to {} variables, got {}",
                                    kMaxOracleVariables, n));
  }
  if (m < 1 || m > table.max_parents()) {
    throw ArgumentError(fmt::format("max parents {} outside [1, {}] covered by the score table",
                                    m, table.max_parents()));
  }
  constraints.validate(n);

  std::vector<VarMask> required(static_cast<std::size_t>(n), 0), forbidden(static_cast<std::size_t>(n), 0);
  for (const auto& [from, to] : constraints.required) required[static_cast<std::size_t>(to)] |= bit_of(from);
  for (const auto& [from, to] : constraints.forbidden) forbidden[static_cast<std::size_t>(to)] |= bit_of(from);

  std::vector<std::vector<Choice>> choices(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    for (const auto& fam : table.families(i)) {
      if (popcount(fam.parents) > m) continue;
      if ((fam.parents & required[iu]) != required[iu]) continue;
      if (fam.parents & forbidden[iu]) continue;
      choices[iu].push_back({fam.parents, fam.score});
    }
  }

  // Child 0's choices are dealt out to workers; the rest is an odometer.
  const auto search = [&](std::size_t first_choice, Partial& out) {
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    digit[0] = first_choice;
    std::vector<VarMask> parents(static_cast<std::size_t>(n));
    while (true) {
      double score = 0.0;
      for (int i = 0; i < n; ++i) {
        const Choice& c = choices[static_cast<std::size_t>(i)][digit[static_cast<std::size_t>(i)]];
        parents[static_cast<std::size_t>(i)] = c.parents;
        score += c.score;
      }
      if (is_acyclic(parents)) out.offer(score, parents);
      int pos = 1;
      while (pos < n) {
        auto& d = digit[static_cast<std::size_t>(pos)];
        if (++d < choices[static_cast<std::size_t>(pos)].size()) break;
        d = 0;
        ++pos;
      }
      if (pos == n) return;
    }
  };

  for (const auto& c : choices) {
    if (c.empty()) throw ValidationError("arc constraints leave a node with no admissible parent set");
  }
  const std::size_t roots = choices[0].size();
  std::vector<Partial> partials(roots);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t k = next++; k < roots; k = next++) search(k, partials[k]);
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(roots)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  Partial total;
  for (auto& p : partials) total.merge(std::move(p));
  if (total.feasible == 0) {
    throw ValidationError("no DAG satisfies the arc constraints and the parent limit");
  }
  OracleResult result;
  result.best_score = total.best;
  result.count_feasible = total.feasible;
  std::vector<std::vector<VarMask>> dags;
  for (auto& dag : total.dags) {
    if (structure_score(table, dag) <= total.best + kOracleTieTolerance) dags.push_back(std::move(dag));
  }
  std::sort(dags.begin(), dags.end());
  result.best_dags = std::move(dags);
  return result;
}

}  // namespace bnslq
