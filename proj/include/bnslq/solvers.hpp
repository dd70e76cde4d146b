#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnslq/qubo.hpp"

namespace bnslq {

// Order on assignments used for every tie-break: compare as binary
// integers with bit 0 as the least-significant digit.
bool bits_less(const Bits& a, const Bits& b);

std::string to_bit_string(const Bits& bits);
Bits parse_bit_string(const std::string& text);

struct PoolEntry {
  Bits bits;
  double energy = 0.0;
};

struct Solution {
  Bits bits;
  double energy = 0.0;
  std::string method;
  std::vector<PoolEntry> pool;  // ascending energy, distinct bits
  std::uint64_t seed = 0;
};

// Recomputes the energy of `bits` and returns a pool-free solution.
Solution make_solution(const Qubo& q, Bits bits, std::string method, std::uint64_t seed = 0);

inline constexpr int kMaxExhaustiveBits = 24;
inline constexpr int kMaxStructuredVariables = 5;

// Global minimum over all 2^num_bits assignments, ties resolved by bits_less.
Solution solve_exhaustive(const Qubo& q, int max_bits = kMaxExhaustiveBits);

// Global minimum of H over (d, y, r) computed as
//   min_d [ H_score(d) + min_y H_max(d, y) + min_r H_cycle(d, r) ]
// with the slack minimum in closed form and the order minimum by
// enumeration. Returns the witness expanded to free bits of `vmap`.
Solution solve_structured(const ScorePolynomial& poly, const PenaltyWeights& weights,
                          const VariableMap& vmap);

struct SaParams {
  int sweeps = 10000;
  int restarts = 64;
  std::optional<double> beta_initial;  // default 0.1 / sigma
  std::optional<double> beta_final;    // default 10 / sigma
  std::uint64_t seed = 0;
  int pool_size = 32;
  int threads = 1;

  void validate() const;
};

// Spread of the nonzero linear and quadratic coefficients, the energy unit
// for the default temperature schedule. Falls back to the RMS coefficient
// when every coefficient is equal, and to 1 when there are none.
double coefficient_scale(const Qubo& q);

// Single-bit-flip Metropolis annealing with a geometric inverse-temperature
// schedule and independent restarts. Reproducible for a given seed,
// independent of the thread count.
Solution solve_sa(const Qubo& q, const SaParams& params);

// Direct evaluations of the penalty Hamiltonians on logical values.
double h_max_node(int in_degree, int slack, double delta_max, int m);
// `order` holds r_ij per pair i < j in pair_index order.
double h_cycle(int n, const ArcBits& arcs, const std::vector<std::uint8_t>& order,
               const PenaltyWeights& weights);
double h_trans(int n, const std::vector<std::uint8_t>& order, double delta_trans);

// min_y H_max^(i) in closed form: 0 when d_i <= m, else delta (d_i - m)^2.
double min_slack_closed_form(int in_degree, double delta_max, int m);
// The same minimum by enumerating every slack value representable in the
// node's slack bits.
double bruteforce_min_slack(int in_degree, double delta_max, int m);
// min over all order assignments of H_cycle(d, r). Requires n <= 6.
double bruteforce_min_order(const ArcBits& arcs, const PenaltyWeights& weights, int n);

}  // namespace bnslq
