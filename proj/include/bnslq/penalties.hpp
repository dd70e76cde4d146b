#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnslq/score_poly.hpp"

namespace bnslq {

// Slack used to turn "weight > bound" into a concrete weight:
// weight = (1 + rel) * bound + abs.
struct Margin {
  double rel = 1e-6;
  double abs = 1e-6;
};

struct PenaltyWeights {
  int n = 0;
  std::vector<double> delta_max;      // per child
  double delta_trans = 0.0;           // shared by every triple
  std::vector<double> delta_consist;  // per unordered pair, pair_index order
  Margin margin;
  bool verified = true;  // false when overrides fall below the sufficiency bounds

  double consist(int i, int j) const {
    return delta_consist[static_cast<std::size_t>(pair_index(n, i, j))];
  }
};

// Weights just above the sufficiency bounds:
//   delta_max^(i)  > max_{j != i} Delta_ji
//   delta_trans    > max_{i' != j'} Delta_i'j'
//   delta_consist  > (n - 2) * delta_trans
// For n = 2 there are no triples and delta_consist is placed just above
// delta_trans, which still exceeds both Delta_01 and Delta_10.
PenaltyWeights derive_weights(const DeltaTable& deltas, int n, Margin margin = {});

// One violated bound, e.g. "delta_max[2] = 1.5 <= 2.0".
struct BoundViolation {
  std::string description;
};

// Every strict inequality the sufficiency argument needs, including the
// 2-cycle removal bound delta_consist^(ij) > max(Delta_ij, Delta_ji).
std::vector<BoundViolation> check_sufficiency(const PenaltyWeights& weights,
                                              const DeltaTable& deltas);

// Uniform user-chosen weights replacing the derived ones.
struct PenaltyOverride {
  std::optional<double> delta_max;
  std::optional<double> delta_trans;
  std::optional<double> delta_consist;

  bool empty() const { return !delta_max && !delta_trans && !delta_consist; }
};

// Applies the override and re-evaluates `verified` against the bounds.
PenaltyWeights apply_override(PenaltyWeights weights, const PenaltyOverride& override_weights,
                              const DeltaTable& deltas);

}  // namespace bnslq
