#pragma once

#include <cstddef>
#include <vector>

#include "bnslq/scoring.hpp"
#include "bnslq/variable_map.hpp"

namespace bnslq {

struct OracleResult {
  double best_score = 0.0;
  // Every optimal DAG (within kOracleTieTolerance) as parent masks per node,
  // sorted lexicographically.
  std::vector<std::vector<VarMask>> best_dags;
  std::size_t count_feasible = 0;
};

inline constexpr double kOracleTieTolerance = 1e-9;
inline constexpr int kMaxOracleVariables = 5;

// Exhaustive search over per-child parent-set choices (|J| <= m) followed
// by an acyclicity check, minimizing sum_i s_i(J_i). Required arcs j -> i
// restrict child i to sets containing j; forbidden arcs remove such sets.
// Never touches the QUBO. Throws ValidationError when no structure is
// feasible and ArgumentError for n > 5 or m outside [1, table m].
OracleResult exact_bnsl(const LocalScoreTable& table, int m, const ArcConstraints& constraints = {},
                        int threads = 1);

// Direct decomposable score of a structure from the table.
double structure_score(const LocalScoreTable& table, const std::vector<VarMask>& parents);

}  // namespace bnslq
