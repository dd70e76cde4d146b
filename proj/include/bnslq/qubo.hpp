#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bnslq/penalties.hpp"
#include "bnslq/score_poly.hpp"
#include "bnslq/variable_map.hpp"

namespace bnslq {

using Bits = std::vector<std::uint8_t>;

// Quadratic pseudo-Boolean function
//   E(x) = offset + sum_a linear[a] x_a + sum_{a<b} quadratic[(a,b)] x_a x_b.
struct Qubo {
  int num_bits = 0;
  double offset = 0.0;
  std::vector<double> linear;                        // dense, size num_bits
  std::map<std::pair<int, int>, double> quadratic;   // keys a < b, values nonzero

  explicit Qubo(int bits = 0) : num_bits(bits), linear(static_cast<std::size_t>(bits), 0.0) {}

  void add_offset(double v) { offset += v; }
  void add_linear(int a, double v) { linear[static_cast<std::size_t>(a)] += v; }
  // Adds v * x_a * x_b; a == b folds into the linear term.
  void add_quadratic(int a, int b, double v);
  // Drops quadratic entries with |value| < tolerance.
  void prune(double tolerance = kZeroTolerance);

  static constexpr double kZeroTolerance = 1e-15;
};

// Throws ArgumentError on a length mismatch.
double energy(const Qubo& q, const Bits& bits);

// Sum of QUBOs over the same bit space, pruned.
Qubo add(const Qubo& a, const Qubo& b);

// Substitutes constants for the fixed positions (nullopt = stays free) and
// renumbers the remaining bits contiguously in their original order.
Qubo condition(const Qubo& q, const std::vector<std::optional<std::uint8_t>>& fixed);

// The four Hamiltonian parts over the free bits of one layout.
struct QuboParts {
  Qubo score;    // H_score
  Qubo max;      // H_max
  Qubo consist;  // H_consist
  Qubo trans;    // H_trans

  Qubo total() const;
};

// Expands H = H_score + H_max + H_consist + H_trans over the free bits of
// `vmap`, substituting fixed bits before expansion. Constants accumulate in
// the offset, so energy(bits) equals H(d, y, r) exactly (up to rounding).
QuboParts assemble_parts(const ScorePolynomial& poly, const PenaltyWeights& weights,
                         const VariableMap& vmap);
Qubo assemble(const ScorePolynomial& poly, const PenaltyWeights& weights,
              const VariableMap& vmap);

enum class ViolationType { kMaxParents, kCycle, kInconsistency, kTransitivity };

std::string to_string(ViolationType type);

struct Violation {
  ViolationType type;
  std::string detail;
};

// A bit assignment read back as a graph, an order and slack values.
struct DecodedState {
  int n = 0;
  std::vector<VarMask> parents;   // parents[i] = {j : d_ji = 1}
  std::vector<std::uint8_t> order;  // r_ij per pair i < j, pair_index order
  std::vector<int> slack;           // y_i per node
  std::vector<Violation> violations;

  bool arc(int from, int to) const { return (parents[static_cast<std::size_t>(to)] >> from) & 1U; }
  bool feasible() const { return violations.empty(); }
};

// Never throws on content: problems are reported as violations. Throws
// ArgumentError only when the bit count does not match the layout.
DecodedState decode(const VariableMap& vmap, const Bits& free_bits);

// Plain-text renderings of a decoded graph. `names` may be empty.
std::string to_edge_list(const DecodedState& state, const std::vector<std::string>& names);
std::string to_dot(const DecodedState& state, const std::vector<std::string>& names);

// Everything the build stage produces for one instance.
struct CompiledInstance {
  std::vector<std::string> names;
  PriorSpec prior;
  ScorePolynomial poly;
  DeltaTable deltas;
  PenaltyWeights weights;
  VariableMap vmap;
  Qubo qubo;
};

CompiledInstance compile(const LocalScoreTable& table, const ArcConstraints& constraints = {},
                         Margin margin = {}, const PenaltyOverride& override_weights = {});

}  // namespace bnslq
