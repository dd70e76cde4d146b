#include "bnslq/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "bnslq/errors.hpp"

namespace bnslq {

bool bits_less(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t k = a.size(); k-- > 0;) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return false;
}

std::string to_bit_string(const Bits& bits) {
  std::string out(bits.size(), '0');
  for (std::size_t k = 0; k < bits.size(); ++k)
    if (bits[k]) out[k] = '1';
  return out;
}

Bits parse_bit_string(const std::string& text) {
  Bits bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ParseError(fmt::format("bit string may only contain 0 and 1, found '{}'", c));
    }
    bits.push_back(c == '1' ? 1 : 0);
  }
  return bits;
}

Solution make_solution(const Qubo& q, Bits bits, std::string method, std::uint64_t seed) {
  Solution s;
  s.energy = energy(q, bits);
  s.bits = std::move(bits);
  s.method = std::move(method);
  s.seed = seed;
  return s;
}

namespace {

// Compressed per-bit neighbour lists of the quadratic terms.
struct Couplings {
  std::vector<std::size_t> start;
  std::vector<int> neighbour;
  std::vector<double> weight;

  explicit Couplings(const Qubo& q) {
    std::vector<std::size_t> degree(static_cast<std::size_t>(q.num_bits), 0);
    for (const auto& [key, v] : q.quadratic) {
      ++degree[static_cast<std::size_t>(key.first)];
      ++degree[static_cast<std::size_t>(key.second)];
    }
    start.assign(degree.size() + 1, 0);
    for (std::size_t a = 0; a < degree.size(); ++a) start[a + 1] = start[a] + degree[a];
    neighbour.resize(start.back());
    weight.resize(start.back());
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (const auto& [key, v] : q.quadratic) {
      const auto a = static_cast<std::size_t>(key.first);
      const auto b = static_cast<std::size_t>(key.second);
      neighbour[fill[a]] = key.second;
      weight[fill[a]++] = v;
      neighbour[fill[b]] = key.first;
      weight[fill[b]++] = v;
    }
  }
};

Bits bits_of_code(std::uint32_t code, int n) {
  Bits bits(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) bits[static_cast<std::size_t>(k)] = (code >> k) & 1U;
  return bits;
}

}  // namespace

Solution solve_exhaustive(const Qubo& q, int max_bits) {
  const int n = q.num_bits;
  if (n > max_bits || n > 30) {
    throw ArgumentError(fmt::format(
        "exhaustive search is limited to {} bits but the QUBO has {}; use the structured "
        "solver for BNSL instances with up to {} variables",
        std::min(max_bits, 30), n, kMaxStructuredVariables));
  }
  const Couplings couplings(q);
  Bits x(static_cast<std::size_t>(n), 0);
  std::vector<double> field(q.linear);
  double e = q.offset;
  std::uint32_t code = 0;

  // Gray-code walk with incremental energies; every state within `window`
  // of the running minimum is kept and re-evaluated exactly at the end.
  constexpr double kWindow = 1e-7;
  struct Candidate {
    std::uint32_t code;
    double approx;
  };
  std::vector<Candidate> candidates{{0, e}};
  double best = e;

  const auto exact_winner = [&]() {
    Candidate winner = candidates.front();
    double winner_energy = energy(q, bits_of_code(winner.code, n));
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const double ec = energy(q, bits_of_code(candidates[c].code, n));
      if (ec < winner_energy || (ec == winner_energy && candidates[c].code < winner.code)) {
        winner = candidates[c];
        winner_energy = ec;
      }
    }
    return Candidate{winner.code, winner_energy};
  };

  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t t = 1; t < states; ++t) {
    const int k = std::countr_zero(t);
    const auto ks = static_cast<std::size_t>(k);
    const double sign = x[ks] ? -1.0 : 1.0;
    e += sign * field[ks];
    x[ks] ^= 1U;
    code ^= std::uint32_t{1} << k;
    for (std::size_t p = couplings.start[ks]; p < couplings.start[ks + 1]; ++p) {
      field[static_cast<std::size_t>(couplings.neighbour[p])] += sign * couplings.weight[p];
    }
    if ((t & 0xFFFF) == 0) e = energy(q, x);

    if (e < best - kWindow) {
      best = e;
      std::erase_if(candidates, [&](const Candidate& c) { return c.approx > best + kWindow; });
      candidates.push_back({code, e});
    } else if (e <= best + kWindow) {
      candidates.push_back({code, e});
      best = std::min(best, e);
    }
    if (candidates.size() > 4096) candidates = {exact_winner()};
  }
  const Candidate winner = exact_winner();
  return make_solution(q, bits_of_code(winner.code, n), "exhaustive");
}

// ---------------------------------------------------------------------------
// Penalty Hamiltonians evaluated directly.

double h_max_node(int in_degree, int slack, double delta_max, int m) {
  const double gap = static_cast<double>(m - in_degree - slack);
  return delta_max * gap * gap;
}

double h_trans(int n, const std::vector<std::uint8_t>& order, double delta_trans) {
  int cyclic = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const int rij = order[static_cast<std::size_t>(pair_index(n, i, j))];
        const int rik = order[static_cast<std::size_t>(pair_index(n, i, k))];
        const int rjk = order[static_cast<std::size_t>(pair_index(n, j, k))];
        cyclic += rij * rjk * (1 - rik) + (1 - rij) * (1 - rjk) * rik;
      }
    }
  }
  return delta_trans * cyclic;
}

double h_cycle(int n, const ArcBits& arcs, const std::vector<std::uint8_t>& order,
               const PenaltyWeights& weights) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int rij = order[static_cast<std::size_t>(pair_index(n, i, j))];
      const int dij = arcs[static_cast<std::size_t>(arc_index(n, i, j))];
      const int dji = arcs[static_cast<std::size_t>(arc_index(n, j, i))];
      total += weights.consist(i, j) * (dji * rij + dij * (1 - rij));
    }
  }
  return total + h_trans(n, order, weights.delta_trans);
}

double min_slack_closed_form(int in_degree, double delta_max, int m) {
  if (in_degree <= m) return 0.0;
  const double excess = static_cast<double>(in_degree - m);
  return delta_max * excess * excess;
}

double bruteforce_min_slack(int in_degree, double delta_max, int m) {
  const int values = 1 << slack_width(m);
  double best = std::numeric_limits<double>::infinity();
  for (int y = 0; y < values; ++y) best = std::min(best, h_max_node(in_degree, y, delta_max, m));
  return best;
}

double bruteforce_min_order(const ArcBits& arcs, const PenaltyWeights& weights, int n) {
  if (n > 6) throw ArgumentError(fmt::format("order enumeration is limited to n <= 6, got {}", n));
  const int pairs = num_pairs(n);
  std::vector<std::uint8_t> order(static_cast<std::size_t>(pairs));
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t code = 0; code < (std::uint32_t{1} << pairs); ++code) {
    for (int p = 0; p < pairs; ++p) order[static_cast<std::size_t>(p)] = (code >> p) & 1U;
    best = std::min(best, h_cycle(n, arcs, order, weights));
  }
  return best;
}

// ---------------------------------------------------------------------------

Solution solve_structured(const ScorePolynomial& poly, const PenaltyWeights& weights,
                          const VariableMap& vmap) {
  const int n = vmap.num_variables();
  const int m = vmap.max_parents();
  if (n > kMaxStructuredVariables) {
    throw ArgumentError(fmt::format("structured search is limited to {} variables, got {}",
                                    kMaxStructuredVariables, n));
  }
  const Qubo q = assemble(poly, weights, vmap);
  const int arcs = num_arcs(n);
  const int pairs = num_pairs(n);

  // H_score^(i) + min_y H_max^(i) for every parent mask of every child.
  const auto masks = std::size_t{1} << n;
  std::vector<std::vector<double>> node_cost(static_cast<std::size_t>(n), std::vector<double>(masks, 0.0));
  for (int i = 0; i < n; ++i) {
    for (VarMask p = 0; p < masks; ++p) {
      if (p & bit_of(i)) continue;
      node_cost[static_cast<std::size_t>(i)][p] =
          poly.eval_child(i, p) +
          min_slack_closed_form(popcount(p), weights.delta_max[static_cast<std::size_t>(i)], m);
    }
  }

  std::uint32_t arc_fixed_mask = 0, arc_fixed_value = 0;
  for (int a = 0; a < arcs; ++a) {
    if (const auto v = vmap.fixed_value(a)) {
      arc_fixed_mask |= std::uint32_t{1} << a;
      if (*v) arc_fixed_value |= std::uint32_t{1} << a;
    }
  }
  std::uint32_t order_fixed_mask = 0, order_fixed_value = 0;
  for (int p = 0; p < pairs; ++p) {
    if (const auto v = vmap.fixed_value(arcs + p)) {
      order_fixed_mask |= std::uint32_t{1} << p;
      if (*v) order_fixed_value |= std::uint32_t{1} << p;
    }
  }

  std::vector<int> arc_head(static_cast<std::size_t>(arcs)), arc_tail(static_cast<std::size_t>(arcs));
  std::vector<double> arc_consist(static_cast<std::size_t>(arcs));
  for (int a = 0; a < arcs; ++a) {
    const BitInfo info = vmap.info(a);
    arc_tail[static_cast<std::size_t>(a)] = info.a;
    arc_head[static_cast<std::size_t>(a)] = info.b;
    arc_consist[static_cast<std::size_t>(a)] = weights.consist(info.a, info.b);
  }

  // For each admissible order: its H_trans value and the arcs it contradicts.
  struct OrderCase {
    std::uint32_t code;
    double trans;
    std::uint32_t bad_arcs;
  };
  std::vector<OrderCase> orders;
  std::vector<std::uint8_t> order(static_cast<std::size_t>(pairs));
  for (std::uint32_t code = 0; code < (std::uint32_t{1} << pairs); ++code) {
    if ((code & order_fixed_mask) != order_fixed_value) continue;
    for (int p = 0; p < pairs; ++p) order[static_cast<std::size_t>(p)] = (code >> p) & 1U;
    std::uint32_t bad = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (order[static_cast<std::size_t>(pair_index(n, i, j))]) {
          bad |= std::uint32_t{1} << arc_index(n, j, i);
        } else {
          bad |= std::uint32_t{1} << arc_index(n, i, j);
        }
      }
    }
    orders.push_back({code, h_trans(n, order, weights.delta_trans), bad});
  }

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_arcs = 0, best_order = 0;
  std::vector<VarMask> parents(static_cast<std::size_t>(n));
  for (std::uint64_t dcode = 0; dcode < (std::uint64_t{1} << arcs); ++dcode) {
    const auto d = static_cast<std::uint32_t>(dcode);
    if ((d & arc_fixed_mask) != arc_fixed_value) continue;
    std::fill(parents.begin(), parents.end(), 0);
    for (std::uint32_t rest = d; rest; rest &= rest - 1) {
      const auto a = static_cast<std::size_t>(std::countr_zero(rest));
      parents[static_cast<std::size_t>(arc_head[a])] |= bit_of(arc_tail[a]);
    }
    double base = 0.0;
    for (int i = 0; i < n; ++i) base += node_cost[static_cast<std::size_t>(i)][parents[static_cast<std::size_t>(i)]];
    if (base >= best) continue;  // H_cycle >= 0

    double cycle_min = std::numeric_limits<double>::infinity();
    std::uint32_t cycle_arg = 0;
    for (const auto& oc : orders) {
      double cost = oc.trans;
      for (std::uint32_t hit = d & oc.bad_arcs; hit; hit &= hit - 1) {
        cost += arc_consist[static_cast<std::size_t>(std::countr_zero(hit))];
      }
      if (cost < cycle_min) {
        cycle_min = cost;
        cycle_arg = oc.code;
        if (cost == 0.0) break;
      }
    }
    if (base + cycle_min < best) {
      best = base + cycle_min;
      best_arcs = d;
      best_order = cycle_arg;
    }
  }
  if (!std::isfinite(best)) throw InternalError("structured search found no assignment");

  Bits logical(static_cast<std::size_t>(vmap.num_logical()), 0);
  for (int a = 0; a < arcs; ++a) logical[static_cast<std::size_t>(a)] = (best_arcs >> a) & 1U;
  for (int p = 0; p < pairs; ++p) logical[static_cast<std::size_t>(arcs + p)] = (best_order >> p) & 1U;
  for (int i = 0; i < n; ++i) {
    int degree = 0;
    for (int j = 0; j < n; ++j)
      if (j != i && logical[static_cast<std::size_t>(arc_index(n, j, i))]) ++degree;
    const int y = std::max(0, m - degree);
    for (int l = 0; l < vmap.slack_bits_per_node(); ++l)
      logical[static_cast<std::size_t>(vmap.slack_bit(i, l))] = (y >> l) & 1;
  }
  Solution s = make_solution(q, vmap.restrict(logical), "structured");
  if (std::abs(s.energy - best) > 1e-6 * std::max(1.0, std::abs(best))) {
    throw InternalError(fmt::format(
        "structured minimum {} disagrees with the QUBO energy {} of its witness", best, s.energy));
  }
  return s;
}

// ---------------------------------------------------------------------------

void SaParams::validate() const {
  if (sweeps < 1) throw ArgumentError(fmt::format("sweeps must be at least 1, got {}", sweeps));
  if (restarts < 1) throw ArgumentError(fmt::format("restarts must be at least 1, got {}", restarts));
  if (pool_size < 1) throw ArgumentError(fmt::format("pool size must be at least 1, got {}", pool_size));
  if (threads < 1) throw ArgumentError(fmt::format("threads must be at least 1, got {}", threads));
  if (beta_initial && !(*beta_initial > 0.0)) throw ArgumentError("beta_initial must be positive");
  if (beta_final && !(*beta_final > 0.0)) throw ArgumentError("beta_final must be positive");
  if (beta_initial && beta_final && *beta_initial > *beta_final) {
    throw ArgumentError("beta_initial must not exceed beta_final");
  }
}

double coefficient_scale(const Qubo& q) {
  std::vector<double> values;
  for (double v : q.linear)
    if (v != 0.0) values.push_back(v);
  for (const auto& [key, v] : q.quadratic)
    if (v != 0.0) values.push_back(v);
  if (values.empty()) return 1.0;
  double mean = 0.0, square = 0.0;
  for (double v : values) {
    mean += v;
    square += v * v;
  }
  const double count = static_cast<double>(values.size());
  mean /= count;
  const double variance = std::max(0.0, square / count - mean * mean);
  const double sigma = std::sqrt(variance);
  if (sigma > 1e-12 * std::sqrt(square / count)) return sigma;
  return std::sqrt(square / count);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

PoolEntry anneal_once(const Qubo& q, const Couplings& couplings, const std::vector<double>& betas,
                      std::uint64_t stream_seed) {
  const auto n = static_cast<std::size_t>(q.num_bits);
  std::mt19937_64 rng(splitmix64(stream_seed));
  Bits x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);

  std::vector<double> field(q.linear);
  for (std::size_t a = 0; a < n; ++a) {
    if (!x[a]) continue;
    for (std::size_t p = couplings.start[a]; p < couplings.start[a + 1]; ++p)
      field[static_cast<std::size_t>(couplings.neighbour[p])] += couplings.weight[p];
  }
  double e = energy(q, x);
  Bits best = x;
  double best_e = e;

  for (double beta : betas) {
    for (std::size_t a = 0; a < n; ++a) {
      const double d_e = x[a] ? -field[a] : field[a];
      if (d_e > 0.0 && unit_uniform(rng) >= std::exp(-beta * d_e)) continue;
      const double sign = x[a] ? -1.0 : 1.0;
      x[a] ^= 1U;
      e += d_e;
      for (std::size_t p = couplings.start[a]; p < couplings.start[a + 1]; ++p)
        field[static_cast<std::size_t>(couplings.neighbour[p])] += sign * couplings.weight[p];
    }
    if (e < best_e) {
      best_e = e;
      best = x;
    }
  }
  return {best, energy(q, best)};
}

bool pool_less(const PoolEntry& a, const PoolEntry& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return bits_less(a.bits, b.bits);
}

}  // namespace

Solution solve_sa(const Qubo& q, const SaParams& params) {
  params.validate();
  const double sigma = coefficient_scale(q);
  const double beta0 = params.beta_initial.value_or(0.1 / sigma);
  const double beta1 = params.beta_final.value_or(10.0 / sigma);
  if (beta0 > beta1) throw ArgumentError("beta_initial must not exceed beta_final");

  std::vector<double> betas(static_cast<std::size_t>(params.sweeps));
  for (int s = 0; s < params.sweeps; ++s) {
    betas[static_cast<std::size_t>(s)] =
        params.sweeps == 1 ? beta1
                           : beta0 * std::pow(beta1 / beta0, static_cast<double>(s) /
                                                                 static_cast<double>(params.sweeps - 1));
  }

  const Couplings couplings(q);
  std::vector<PoolEntry> results(static_cast<std::size_t>(params.restarts));
  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (int r = next++; r < params.restarts; r = next++) {
      results[static_cast<std::size_t>(r)] =
          anneal_once(q, couplings, betas, params.seed ^ static_cast<std::uint64_t>(r));
    }
  };
  const int threads = std::min(params.threads, params.restarts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::sort(results.begin(), results.end(), pool_less);
  results.erase(std::unique(results.begin(), results.end(),
                            [](const PoolEntry& a, const PoolEntry& b) { return a.bits == b.bits; }),
                results.end());
  if (results.size() > static_cast<std::size_t>(params.pool_size)) {
    results.resize(static_cast<std::size_t>(params.pool_size));
  }
  Solution s = make_solution(q, results.front().bits, "sa", params.seed);
  s.pool = std::move(results);
  return s;
}

}  // namespace bnslq
