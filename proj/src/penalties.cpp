#include "bnslq/penalties.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bnslq/errors.hpp"

namespace bnslq {

namespace {

double above(double bound, const Margin& margin) {
  return (1.0 + margin.rel) * bound + margin.abs;
}

}  // namespace

PenaltyWeights derive_weights(const DeltaTable& deltas, int n, Margin margin) {
  if (!(margin.rel >= 0.0) || !(margin.abs >= 0.0) || !std::isfinite(margin.rel) ||
      !std::isfinite(margin.abs) || (margin.rel == 0.0 && margin.abs == 0.0)) {
    throw ArgumentError(fmt::format(
        "penalty margin must be non-negative and not entirely zero, got rel={} abs={}",
        margin.rel, margin.abs));
  }
  if (deltas.n != n || deltas.values.size() != static_cast<std::size_t>(n * n)) {
    throw ArgumentError("delta table does not match the variable count");
  }
  PenaltyWeights weights;
  weights.n = n;
  weights.margin = margin;
  for (int i = 0; i < n; ++i) weights.delta_max.push_back(above(deltas.max_into(i), margin));
  weights.delta_trans = above(deltas.max_overall(), margin);
  const double consist = n > 2 ? above(static_cast<double>(n - 2) * weights.delta_trans, margin)
                               : weights.delta_trans + margin.abs;
  weights.delta_consist.assign(static_cast<std::size_t>(num_pairs(n)), consist);
  weights.verified = check_sufficiency(weights, deltas).empty();
  return weights;
}

std::vector<BoundViolation> check_sufficiency(const PenaltyWeights& weights,
                                              const DeltaTable& deltas) {
  const int n = weights.n;
  std::vector<BoundViolation> out;
  for (int i = 0; i < n; ++i) {
    const double w = weights.delta_max[static_cast<std::size_t>(i)];
    const double bound = deltas.max_into(i);
    if (!(w > bound)) {
      out.push_back({fmt::format("delta_max[{}] = {} <= max_j Delta_j,{} = {}", i, w, i, bound)});
    }
  }
  if (n >= 3 && !(weights.delta_trans > deltas.max_overall())) {
    out.push_back({fmt::format("delta_trans = {} <= max Delta = {}", weights.delta_trans,
                               deltas.max_overall())});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = weights.consist(i, j);
      const double chain = static_cast<double>(n - 2) * weights.delta_trans;
      if (n >= 3 && !(c > chain)) {
        out.push_back({fmt::format("delta_consist[{},{}] = {} <= (n-2)*delta_trans = {}", i, j,
                                   c, chain)});
      }
      const double two_cycle = std::max(deltas.at(i, j), deltas.at(j, i));
      if (!(c > two_cycle)) {
        out.push_back({fmt::format("delta_consist[{},{}] = {} <= max(Delta_{},{}, Delta_{},{}) = {}",
                                   i, j, c, i, j, j, i, two_cycle)});
      }
    }
  }
  return out;
}

PenaltyWeights apply_override(PenaltyWeights weights, const PenaltyOverride& override_weights,
                              const DeltaTable& deltas) {
  const auto check_positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) {
      throw ArgumentError(fmt::format("{} override must be positive, got {}", name, *v));
    }
  };
  check_positive(override_weights.delta_max, "delta_max");
  check_positive(override_weights.delta_trans, "delta_trans");
  check_positive(override_weights.delta_consist, "delta_consist");
  if (override_weights.delta_max) weights.delta_max.assign(weights.delta_max.size(), *override_weights.delta_max);
  if (override_weights.delta_trans) weights.delta_trans = *override_weights.delta_trans;
  if (override_weights.delta_consist) {
    weights.delta_consist.assign(weights.delta_consist.size(), *override_weights.delta_consist);
  }
  weights.verified = check_sufficiency(weights, deltas).empty();
  return weights;
}

}  // namespace bnslq
