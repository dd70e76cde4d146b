#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace bnslq {

// Sets of variable indices as bitmasks. Bit k set means variable k is a
// member. Variable counts are bounded by kMaxVariables.
using VarMask = std::uint64_t;

inline constexpr int kMaxVariables = 64;

inline VarMask bit_of(int v) { return VarMask{1} << v; }

inline int popcount(VarMask m) { return std::popcount(m); }

inline VarMask mask_of(const std::vector<int>& members) {
  VarMask m = 0;
  for (int v : members) m |= bit_of(v);
  return m;
}

// Ascending member list.
inline std::vector<int> members_of(VarMask m) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(popcount(m)));
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

// All subsets of `universe` with at most `max_size` members, ordered
// lexicographically by their ascending member lists ({} first).
std::vector<VarMask> subsets_up_to(const std::vector<int>& universe, int max_size);

// Binomial coefficient for small arguments.
std::uint64_t binomial(int n, int k);

}  // namespace bnslq
