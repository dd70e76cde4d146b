#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bnslq/subsets.hpp"

namespace bnslq {

// One value per ordered pair (i, j), i != j, in row-major order; entry
// arc_index(n, i, j) is d_ij, the arc i -> j.
using ArcBits = std::vector<std::uint8_t>;

// Index of the unordered pair {i, j}, i < j, in lexicographic order.
inline int pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}
inline int num_pairs(int n) { return n * (n - 1) / 2; }

inline int num_arcs(int n) { return n * (n - 1); }

inline int arc_index(int n, int from, int to) {
  return from * (n - 1) + (to < from ? to : to - 1);
}

// Parent set of every node as a mask: parents[to] has bit `from` for d_from,to = 1.
inline std::vector<VarMask> parent_masks(int n, const ArcBits& arcs) {
  std::vector<VarMask> parents(static_cast<std::size_t>(n), 0);
  for (int from = 0; from < n; ++from)
    for (int to = 0; to < n; ++to)
      if (from != to && arcs[static_cast<std::size_t>(arc_index(n, from, to))])
        parents[static_cast<std::size_t>(to)] |= bit_of(from);
  return parents;
}

inline ArcBits arcs_from_parents(int n, const std::vector<VarMask>& parents) {
  ArcBits arcs(static_cast<std::size_t>(num_arcs(n)), 0);
  for (int to = 0; to < n; ++to)
    for (int from : members_of(parents[static_cast<std::size_t>(to)]))
      arcs[static_cast<std::size_t>(arc_index(n, from, to))] = 1;
  return arcs;
}

// True when the digraph given by parent masks has no directed cycle.
inline bool is_acyclic(const std::vector<VarMask>& parents) {
  const int n = static_cast<int>(parents.size());
  VarMask placed = 0;
  for (int round = 0; round < n; ++round) {
    bool progress = false;
    for (int v = 0; v < n; ++v) {
      if (!(placed & bit_of(v)) && (parents[static_cast<std::size_t>(v)] & ~placed) == 0) {
        placed |= bit_of(v);
        progress = true;
      }
    }
    if (!progress) break;
  }
  return popcount(placed) == n;
}

}  // namespace bnslq
