#include "bnslq/subsets.hpp"

#include <algorithm>

namespace bnslq {

namespace {

void extend(const std::vector<int>& universe, std::size_t start, int remaining,
            VarMask current, std::vector<VarMask>& out) {
  out.push_back(current);
  if (remaining == 0) return;
  for (std::size_t k = start; k < universe.size(); ++k) {
    extend(universe, k + 1, remaining - 1, current | bit_of(universe[k]), out);
  }
}

}  // namespace

std::vector<VarMask> subsets_up_to(const std::vector<int>& universe, int max_size) {
  std::vector<int> sorted = universe;
  std::sort(sorted.begin(), sorted.end());
  std::vector<VarMask> out;
  extend(sorted, 0, std::max(max_size, 0), 0, out);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return result;
}

}  // namespace bnslq
