#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace bnslq {

using Arc = std::pair<int, int>;  // (from, to)

// Prior knowledge fixing arcs in or out of every candidate structure.
struct ArcConstraints {
  std::set<Arc> required;
  std::set<Arc> forbidden;

  bool empty() const { return required.empty() && forbidden.empty(); }
  // Rejects out-of-range or self arcs, overlapping sets and a pair required
  // in both directions.
  void validate(int n) const;
};

enum class BitKind { kArc, kOrder, kSlack };

// Identity of one logical bit.
//   kArc:   d_{a,b}, arc a -> b
//   kOrder: r_{a,b}, a < b, set when a precedes b
//   kSlack: y_{a,b}, bit b (weight 2^b) of node a's slack
struct BitInfo {
  BitKind kind;
  int a;
  int b;
};

// Value of a logical bit inside the QUBO: a free variable or a constant.
struct BitRef {
  int free_index = -1;  // >= 0 for free bits
  std::uint8_t value = 0;  // constant value when free_index < 0

  bool is_free() const { return free_index >= 0; }
};

// Fixed bit layout shared by every instance of equal (n, m): arc bits d_ij
// in row-major (i, j) order, then order bits r_ij (i < j) lexicographically,
// then slack bits y_il by (i, l). Bits fixed by arc constraints are removed
// and the remaining ones are numbered contiguously in the same order.
class VariableMap {
 public:
  VariableMap(int n, int m, ArcConstraints constraints);

  int num_variables() const { return n_; }
  int max_parents() const { return m_; }
  int slack_bits_per_node() const { return mu_; }
  const ArcConstraints& constraints() const { return constraints_; }

  int num_logical() const { return static_cast<int>(fixed_.size()); }
  int num_free() const { return static_cast<int>(logical_of_free_.size()); }

  int arc_bit(int from, int to) const;
  int order_bit(int i, int j) const;  // requires i < j
  int slack_bit(int node, int l) const;

  BitInfo info(int logical) const;
  std::string name(int logical) const;  // "d_0_1", "r_0_2", "y_1_0"
  BitRef ref(int logical) const;

  bool is_fixed(int logical) const { return fixed_[static_cast<std::size_t>(logical)].has_value(); }
  std::optional<std::uint8_t> fixed_value(int logical) const {
    return fixed_[static_cast<std::size_t>(logical)];
  }
  int free_index(int logical) const { return free_of_logical_[static_cast<std::size_t>(logical)]; }
  int logical_index(int free) const { return logical_of_free_[static_cast<std::size_t>(free)]; }

  // Free-bit assignment -> logical assignment with fixed bits filled in.
  std::vector<std::uint8_t> expand(const std::vector<std::uint8_t>& free_bits) const;
  // Logical assignment -> free bits. Fixed positions are ignored.
  std::vector<std::uint8_t> restrict(const std::vector<std::uint8_t>& logical_bits) const;

 private:
  int n_;
  int m_;
  int mu_;
  ArcConstraints constraints_;
  std::vector<std::optional<std::uint8_t>> fixed_;
  std::vector<int> free_of_logical_;
  std::vector<int> logical_of_free_;
};

// ceil(log2(m + 1)): bits needed to hold an integer in [0, m].
int slack_width(int m);

// Builds the layout for m in {1, 2}. A required arc (i, j) fixes d_ij = 1,
// d_ji = 0 and the order bit of the pair (r_ij = 1 when i < j, r_ji = 0
// when i > j); a forbidden arc fixes d_ij = 0 and leaves the order bit
// free. Throws UnsupportedError for m >= 3 (which would need
// quadratization) and ArgumentError for contradictory constraints.
VariableMap make_variable_map(int n, int m, const ArcConstraints& constraints = {});

}  // namespace bnslq
