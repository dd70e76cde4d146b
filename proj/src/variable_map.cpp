#include "bnslq/variable_map.hpp"

#include <fmt/format.h>

#include "bnslq/arcs.hpp"
#include "bnslq/errors.hpp"

namespace bnslq {

void ArcConstraints::validate(int n) const {
  const auto check = [n](const Arc& arc, const char* kind) {
    const auto [from, to] = arc;
    if (from < 0 || from >= n || to < 0 || to >= n) {
      throw ArgumentError(fmt::format("{} arc {}:{} out of range for {} variables", kind, from,
                                      to, n));
    }
    if (from == to) throw ArgumentError(fmt::format("{} arc {}:{} is a self loop", kind, from, to));
  };
  for (const auto& arc : required) check(arc, "required");
  for (const auto& arc : forbidden) check(arc, "forbidden");
  for (const auto& arc : required) {
    if (forbidden.contains(arc)) {
      throw ArgumentError(
          fmt::format("arc {}:{} is both required and forbidden", arc.first, arc.second));
    }
    if (required.contains({arc.second, arc.first})) {
      throw ArgumentError(fmt::format("arcs {}:{} and {}:{} are both required", arc.first,
                                      arc.second, arc.second, arc.first));
    }
  }
}

int slack_width(int m) {
  int mu = 0;
  while ((1 << mu) < m + 1) ++mu;
  return mu;
}

VariableMap::VariableMap(int n, int m, ArcConstraints constraints)
    : n_(n), m_(m), mu_(slack_width(m)), constraints_(std::move(constraints)) {
  if (n_ < 2 || n_ > kMaxVariables) {
    throw ArgumentError(fmt::format("variable count {} out of range [2, {}]", n_, kMaxVariables));
  }
  if (m_ < 1 || m_ > n_ - 1) {
    throw ArgumentError(fmt::format("max parents {} out of range [1, {}]", m_, n_ - 1));
  }
  constraints_.validate(n_);

  const int total = num_arcs(n_) + num_pairs(n_) + n_ * mu_;
  fixed_.assign(static_cast<std::size_t>(total), std::nullopt);
  const auto fix = [this](int logical, std::uint8_t value) {
    auto& slot = fixed_[static_cast<std::size_t>(logical)];
    if (slot && *slot != value) {
      throw ArgumentError(fmt::format("arc constraints fix {} to both 0 and 1", name(logical)));
    }
    slot = value;
  };
  for (const auto& [from, to] : constraints_.required) {
    fix(arc_bit(from, to), 1);
    fix(arc_bit(to, from), 0);
    if (from < to) {
      fix(order_bit(from, to), 1);
    } else {
      fix(order_bit(to, from), 0);
    }
  }
  for (const auto& [from, to] : constraints_.forbidden) fix(arc_bit(from, to), 0);

  free_of_logical_.assign(fixed_.size(), -1);
  for (int k = 0; k < total; ++k) {
    if (!fixed_[static_cast<std::size_t>(k)]) {
      free_of_logical_[static_cast<std::size_t>(k)] = static_cast<int>(logical_of_free_.size());
      logical_of_free_.push_back(k);
    }
  }
}

int VariableMap::arc_bit(int from, int to) const { return arc_index(n_, from, to); }

int VariableMap::order_bit(int i, int j) const {
  if (i >= j) throw InternalError("order bits are indexed by i < j");
  return num_arcs(n_) + pair_index(n_, i, j);
}

int VariableMap::slack_bit(int node, int l) const {
  return num_arcs(n_) + num_pairs(n_) + node * mu_ + l;
}

BitInfo VariableMap::info(int logical) const {
  if (logical < 0 || logical >= num_logical()) {
    throw ArgumentError(fmt::format("logical bit {} out of range", logical));
  }
  const int arcs = num_arcs(n_);
  const int pairs = num_pairs(n_);
  if (logical < arcs) {
    const int from = logical / (n_ - 1);
    const int rest = logical % (n_ - 1);
    return {BitKind::kArc, from, rest < from ? rest : rest + 1};
  }
  if (logical < arcs + pairs) {
    int k = logical - arcs;
    for (int i = 0; i < n_; ++i) {
      const int row = n_ - 1 - i;
      if (k < row) return {BitKind::kOrder, i, i + 1 + k};
      k -= row;
    }
  }
  const int k = logical - arcs - pairs;
  return {BitKind::kSlack, k / mu_, k % mu_};
}

std::string VariableMap::name(int logical) const {
  const BitInfo bit = info(logical);
  const char prefix = bit.kind == BitKind::kArc ? 'd' : bit.kind == BitKind::kOrder ? 'r' : 'y';
  return fmt::format("{}_{}_{}", prefix, bit.a, bit.b);
}

BitRef VariableMap::ref(int logical) const {
  const auto& slot = fixed_.at(static_cast<std::size_t>(logical));
  if (slot) return {-1, *slot};
  return {free_of_logical_[static_cast<std::size_t>(logical)], 0};
}

std::vector<std::uint8_t> VariableMap::expand(const std::vector<std::uint8_t>& free_bits) const {
  if (static_cast<int>(free_bits.size()) != num_free()) {
    throw ArgumentError(
        fmt::format("expected {} free bits, got {}", num_free(), free_bits.size()));
  }
  std::vector<std::uint8_t> logical(fixed_.size());
  for (std::size_t k = 0; k < fixed_.size(); ++k) {
    logical[k] = fixed_[k] ? *fixed_[k]
                           : free_bits[static_cast<std::size_t>(free_of_logical_[k])];
  }
  return logical;
}

std::vector<std::uint8_t> VariableMap::restrict(
    const std::vector<std::uint8_t>& logical_bits) const {
  if (logical_bits.size() != fixed_.size()) {
    throw ArgumentError(
        fmt::format("expected {} logical bits, got {}", fixed_.size(), logical_bits.size()));
  }
  std::vector<std::uint8_t> free(logical_of_free_.size());
  for (std::size_t f = 0; f < free.size(); ++f) {
    free[f] = logical_bits[static_cast<std::size_t>(logical_of_free_[f])];
  }
  return free;
}

VariableMap make_variable_map(int n, int m, const ArcConstraints& constraints) {
  if (m >= 3) {
    throw UnsupportedError(fmt::format(
        "max parents {} needs quadratization of cubic score terms; only m = 1 or 2 can be "
        "assembled",
        m));
  }
  if (m < 1) throw ArgumentError(fmt::format("max parents must be at least 1, got {}", m));
  if (n < 2) throw ArgumentError(fmt::format("need at least 2 variables, got {}", n));
  constraints.validate(n);

  std::vector<VarMask> required(static_cast<std::size_t>(n), 0);
  for (const auto& [from, to] : constraints.required) required[static_cast<std::size_t>(to)] |= bit_of(from);
  for (int i = 0; i < n; ++i) {
    if (popcount(required[static_cast<std::size_t>(i)]) > m) {
      throw ArgumentError(fmt::format("node {} has {} required parents but at most {} allowed",
                                      i, popcount(required[static_cast<std::size_t>(i)]), m));
    }
  }
  if (!is_acyclic(required)) throw ArgumentError("required arcs form a directed cycle");
  return VariableMap(n, m, constraints);
}

}  // namespace bnslq
