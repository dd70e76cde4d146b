#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bnslq/dataset.hpp"
#include "bnslq/qubo.hpp"
#include "bnslq/score_poly.hpp"
#include "bnslq/variable_map.hpp"
#include "bnslq/scoring.hpp"
#include "bnslq/subsets.hpp"

namespace bnslq::testing {

// A random DAG over n nodes (at most m parents each), consistent with a
// random topological order.
std::vector<VarMask> random_dag(int n, int m, std::mt19937_64& rng, double arc_probability = 0.5);

// Forward-samples `cases` rows from a BN with the given structure, random
// cardinalities in [2, max_card] and Dirichlet(1) conditional tables.
Dataset sample_dataset(const std::vector<VarMask>& parents, std::size_t cases, std::mt19937_64& rng,
                       int max_card = 3);

// Random network plus sampled data, the usual test instance.
Dataset random_dataset(int n, int m, std::size_t cases, std::uint64_t seed, int max_card = 3);

// A table with arbitrary scores drawn uniformly from [lo, hi].
LocalScoreTable random_score_table(int n, int m, std::uint64_t seed, double lo = 0.0,
                                   double hi = 10.0);

std::vector<std::string> default_names(int n);

// Coefficients drawn uniformly from [-scale, scale] for every admissible set.
ScorePolynomial random_polynomial(int n, int m, std::uint64_t seed, double scale = 3.0);

// max over every assignment of the other candidate parents K of
//   -sum_{J subset K, |J| <= m - 1} w_i(J u {j}),
// the score decrease from adding j -> i, by enumeration.
double brute_force_delta_unclamped(const ScorePolynomial& poly, int from, int child);

// Every DAG on n nodes with in-degree <= m, as parent masks.
std::vector<std::vector<VarMask>> all_dags(int n, int m);

// A topological order of a DAG (smallest ready node first).
std::vector<int> topological_order(const std::vector<VarMask>& parents);

// Logical bits for a DAG: arcs from `parents`, order bits from a
// topological order, slack y_i = m - d_i.
std::vector<std::uint8_t> canonical_logical_bits(const VariableMap& vmap,
                                                 const std::vector<VarMask>& parents);
Bits canonical_bits(const VariableMap& vmap, const std::vector<VarMask>& parents);

// Number of cyclically oriented triples of the tournament given by order
// bits (r_ij per pair i < j in pair_index order).
int count_cyclic_triples(int n, const std::vector<std::uint8_t>& order);

}  // namespace bnslq::testing
