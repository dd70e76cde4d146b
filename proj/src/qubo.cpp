#include "bnslq/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "bnslq/errors.hpp"

namespace bnslq {

void Qubo::add_quadratic(int a, int b, double v) {
  if (a == b) {
    add_linear(a, v);
    return;
  }
  if (a > b) std::swap(a, b);
  quadratic[{a, b}] += v;
}

void Qubo::prune(double tolerance) {
  std::erase_if(quadratic, [tolerance](const auto& kv) { return std::abs(kv.second) < tolerance; });
}

double energy(const Qubo& q, const Bits& bits) {
  if (static_cast<int>(bits.size()) != q.num_bits) {
    throw ArgumentError(fmt::format("expected {} bits, got {}", q.num_bits, bits.size()));
  }
  double e = q.offset;
  for (int a = 0; a < q.num_bits; ++a)
    if (bits[static_cast<std::size_t>(a)]) e += q.linear[static_cast<std::size_t>(a)];
  for (const auto& [key, v] : q.quadratic)
    if (bits[static_cast<std::size_t>(key.first)] && bits[static_cast<std::size_t>(key.second)]) e += v;
  return e;
}

Qubo add(const Qubo& a, const Qubo& b) {
  if (a.num_bits != b.num_bits) throw ArgumentError("cannot add QUBOs over different bit spaces");
  Qubo out = a;
  out.offset += b.offset;
  for (int k = 0; k < b.num_bits; ++k)
    out.linear[static_cast<std::size_t>(k)] += b.linear[static_cast<std::size_t>(k)];
  for (const auto& [key, v] : b.quadratic) out.quadratic[key] += v;
  out.prune();
  return out;
}

Qubo condition(const Qubo& q, const std::vector<std::optional<std::uint8_t>>& fixed) {
  if (static_cast<int>(fixed.size()) != q.num_bits) {
    throw ArgumentError("conditioning table does not match the bit count");
  }
  std::vector<int> renumber(fixed.size(), -1);
  int next = 0;
  for (std::size_t k = 0; k < fixed.size(); ++k)
    if (!fixed[k]) renumber[k] = next++;
  Qubo out(next);
  out.offset = q.offset;
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    if (fixed[k]) {
      if (*fixed[k]) out.offset += q.linear[k];
    } else {
      out.add_linear(renumber[k], q.linear[k]);
    }
  }
  for (const auto& [key, v] : q.quadratic) {
    const auto a = static_cast<std::size_t>(key.first);
    const auto b = static_cast<std::size_t>(key.second);
    if (fixed[a] && fixed[b]) {
      if (*fixed[a] && *fixed[b]) out.offset += v;
    } else if (fixed[a]) {
      if (*fixed[a]) out.add_linear(renumber[b], v);
    } else if (fixed[b]) {
      if (*fixed[b]) out.add_linear(renumber[a], v);
    } else {
      out.add_quadratic(renumber[a], renumber[b], v);
    }
  }
  out.prune();
  return out;
}

Qubo QuboParts::total() const { return add(add(add(score, max), consist), trans); }

namespace {

// Accumulates products of logical bits, folding constants from fixed bits.
class TermSink {
 public:
  TermSink(const VariableMap& vmap, Qubo& out) : vmap_(vmap), out_(out) {}

  void constant(double v) { out_.add_offset(v); }

  void linear(double coef, int logical) {
    const BitRef a = vmap_.ref(logical);
    if (a.is_free()) {
      out_.add_linear(a.free_index, coef);
    } else if (a.value) {
      out_.add_offset(coef);
    }
  }

  void product(double coef, int logical_a, int logical_b) {
    const BitRef a = vmap_.ref(logical_a);
    const BitRef b = vmap_.ref(logical_b);
    if (a.is_free() && b.is_free()) {
      out_.add_quadratic(a.free_index, b.free_index, coef);
    } else if (a.is_free()) {
      if (b.value) out_.add_linear(a.free_index, coef);
    } else if (b.is_free()) {
      if (a.value) out_.add_linear(b.free_index, coef);
    } else if (a.value && b.value) {
      out_.add_offset(coef);
    }
  }

  // weight * (c0 + sum_k c_k x_k)^2 with x_k logical bits.
  void square(double weight, double c0, const std::vector<std::pair<double, int>>& terms) {
    constant(weight * c0 * c0);
    for (std::size_t a = 0; a < terms.size(); ++a) {
      const auto [ca, xa] = terms[a];
      linear(weight * 2.0 * c0 * ca, xa);
      linear(weight * ca * ca, xa);  // x^2 = x
      for (std::size_t b = a + 1; b < terms.size(); ++b) {
        const auto [cb, xb] = terms[b];
        product(weight * 2.0 * ca * cb, xa, xb);
      }
    }
  }

 private:
  const VariableMap& vmap_;
  Qubo& out_;
};

}  // namespace

QuboParts assemble_parts(const ScorePolynomial& poly, const PenaltyWeights& weights,
                         const VariableMap& vmap) {
  const int n = vmap.num_variables();
  const int m = vmap.max_parents();
  if (m >= 3) {
    throw UnsupportedError("assembly supports max parents 1 or 2 only (no quadratization)");
  }
  if (poly.num_variables() != n || poly.max_parents() != m) {
    throw ArgumentError(fmt::format("polynomial (n={}, m={}) does not match layout (n={}, m={})",
                                    poly.num_variables(), poly.max_parents(), n, m));
  }
  if (weights.n != n || static_cast<int>(weights.delta_max.size()) != n ||
      static_cast<int>(weights.delta_consist.size()) != num_pairs(n)) {
    throw ArgumentError("penalty weights do not match the layout");
  }
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!std::all_of(weights.delta_max.begin(), weights.delta_max.end(), positive) ||
      !std::all_of(weights.delta_consist.begin(), weights.delta_consist.end(), positive) ||
      (n >= 3 && !positive(weights.delta_trans))) {
    throw ArgumentError("penalty weights must be positive");
  }

  const int bits = vmap.num_free();
  QuboParts parts{Qubo(bits), Qubo(bits), Qubo(bits), Qubo(bits)};

  // H_score: sum_i sum_{|J| <= m} w_i(J) prod_{j in J} d_ji
  {
    TermSink sink(vmap, parts.score);
    for (int i = 0; i < n; ++i) {
      for (const auto& c : poly.coefficients(i)) {
        const auto members = members_of(c.parents);
        if (members.empty()) {
          sink.constant(c.w);
        } else if (members.size() == 1) {
          sink.linear(c.w, vmap.arc_bit(members[0], i));
        } else {
          sink.product(c.w, vmap.arc_bit(members[0], i), vmap.arc_bit(members[1], i));
        }
      }
    }
  }

  // H_max: sum_i delta_max^(i) (m - d_i - y_i)^2
  {
    TermSink sink(vmap, parts.max);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<double, int>> terms;
      for (int j = 0; j < n; ++j)
        if (j != i) terms.emplace_back(-1.0, vmap.arc_bit(j, i));
      for (int l = 0; l < vmap.slack_bits_per_node(); ++l)
        terms.emplace_back(-static_cast<double>(1 << l), vmap.slack_bit(i, l));
      sink.square(weights.delta_max[static_cast<std::size_t>(i)], static_cast<double>(m), terms);
    }
  }

  // H_consist: sum_{i<j} delta_consist^(ij) (d_ji r_ij + d_ij (1 - r_ij))
  {
    TermSink sink(vmap, parts.consist);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double w = weights.consist(i, j);
        const int r = vmap.order_bit(i, j);
        sink.product(w, vmap.arc_bit(j, i), r);
        sink.linear(w, vmap.arc_bit(i, j));
        sink.product(-w, vmap.arc_bit(i, j), r);
      }
    }
  }

  // H_trans: sum_{i<j<k} delta_trans (r_ik + r_ij r_jk - r_ij r_ik - r_jk r_ik)
  {
    TermSink sink(vmap, parts.trans);
    const double w = weights.delta_trans;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
          const int rij = vmap.order_bit(i, j);
          const int rik = vmap.order_bit(i, k);
          const int rjk = vmap.order_bit(j, k);
          sink.linear(w, rik);
          sink.product(w, rij, rjk);
          sink.product(-w, rij, rik);
          sink.product(-w, rjk, rik);
        }
      }
    }
  }

  parts.score.prune();
  parts.max.prune();
  parts.consist.prune();
  parts.trans.prune();
  return parts;
}

Qubo assemble(const ScorePolynomial& poly, const PenaltyWeights& weights,
              const VariableMap& vmap) {
  return assemble_parts(poly, weights, vmap).total();
}

std::string to_string(ViolationType type) {
  switch (type) {
    case ViolationType::kMaxParents: return "max_parents";
    case ViolationType::kCycle: return "cycle";
    case ViolationType::kInconsistency: return "inconsistency";
    case ViolationType::kTransitivity: return "transitivity";
  }
  return "unknown";
}

namespace {

// Depth-first search for a directed cycle; returns its vertices in order.
std::vector<int> find_cycle(const std::vector<VarMask>& parents) {
  const int n = static_cast<int>(parents.size());
  std::vector<VarMask> children(parents.size(), 0);
  for (int to = 0; to < n; ++to)
    for (int from : members_of(parents[static_cast<std::size_t>(to)]))
      children[static_cast<std::size_t>(from)] |= bit_of(to);

  enum class Mark { kNew, kActive, kDone };
  std::vector<Mark> mark(parents.size(), Mark::kNew);
  std::vector<int> stack;
  std::vector<int> cycle;

  const auto visit = [&](auto&& self, int v) -> bool {
    mark[static_cast<std::size_t>(v)] = Mark::kActive;
    stack.push_back(v);
    for (int w : members_of(children[static_cast<std::size_t>(v)])) {
      if (mark[static_cast<std::size_t>(w)] == Mark::kActive) {
        const auto start = std::find(stack.begin(), stack.end(), w);
        cycle.assign(start, stack.end());
        return true;
      }
      if (mark[static_cast<std::size_t>(w)] == Mark::kNew && self(self, w)) return true;
    }
    stack.pop_back();
    mark[static_cast<std::size_t>(v)] = Mark::kDone;
    return false;
  };
  for (int v = 0; v < n; ++v) {
    if (mark[static_cast<std::size_t>(v)] == Mark::kNew && visit(visit, v)) break;
  }
  return cycle;
}

}  // namespace

DecodedState decode(const VariableMap& vmap, const Bits& free_bits) {
  const Bits logical = vmap.expand(free_bits);
  const int n = vmap.num_variables();
  const int m = vmap.max_parents();
  const auto bit = [&](int k) { return logical[static_cast<std::size_t>(k)] != 0; };

  DecodedState state;
  state.n = n;
  state.parents.assign(static_cast<std::size_t>(n), 0);
  for (int from = 0; from < n; ++from)
    for (int to = 0; to < n; ++to)
      if (from != to && bit(vmap.arc_bit(from, to))) state.parents[static_cast<std::size_t>(to)] |= bit_of(from);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) state.order.push_back(bit(vmap.order_bit(i, j)) ? 1 : 0);
  for (int i = 0; i < n; ++i) {
    int y = 0;
    for (int l = 0; l < vmap.slack_bits_per_node(); ++l)
      if (bit(vmap.slack_bit(i, l))) y += 1 << l;
    state.slack.push_back(y);
  }

  for (int i = 0; i < n; ++i) {
    const int degree = popcount(state.parents[static_cast<std::size_t>(i)]);
    if (degree > m) {
      state.violations.push_back({ViolationType::kMaxParents,
                                  fmt::format("node {} has {} parents (max {})", i, degree, m)});
    }
  }
  const auto cycle = find_cycle(state.parents);
  if (!cycle.empty()) {
    std::string path;
    for (int v : cycle) path += fmt::format("{} -> ", v);
    path += std::to_string(cycle.front());
    state.violations.push_back({ViolationType::kCycle, "directed cycle " + path});
  }
  const auto order = [&](int i, int j) {
    return state.order[static_cast<std::size_t>(pair_index(n, i, j))] != 0;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool rij = order(i, j);
      if (rij && state.arc(j, i)) {
        state.violations.push_back({ViolationType::kInconsistency,
                                    fmt::format("arc {} -> {} but order places {} before {}", j,
                                                i, i, j)});
      }
      if (!rij && state.arc(i, j)) {
        state.violations.push_back({ViolationType::kInconsistency,
                                    fmt::format("arc {} -> {} but order places {} before {}", i,
                                                j, j, i)});
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const bool rij = order(i, j);
        const bool rjk = order(j, k);
        const bool rik = order(i, k);
        if ((rij && rjk && !rik) || (!rij && !rjk && rik)) {
          state.violations.push_back({ViolationType::kTransitivity,
                                      fmt::format("order is cyclic on {{{}, {}, {}}}", i, j, k)});
        }
      }
    }
  }
  return state;
}

namespace {

std::string node_name(int v, const std::vector<std::string>& names) {
  return v < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(v)] : std::to_string(v);
}

}  // namespace

std::string to_edge_list(const DecodedState& state, const std::vector<std::string>& names) {
  std::ostringstream out;
  for (int from = 0; from < state.n; ++from)
    for (int to = 0; to < state.n; ++to)
      if (from != to && state.arc(from, to))
        out << node_name(from, names) << " -> " << node_name(to, names) << '\n';
  return out.str();
}

std::string to_dot(const DecodedState& state, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "digraph bn {\n";
  for (int v = 0; v < state.n; ++v) out << "  \"" << node_name(v, names) << "\";\n";
  for (int from = 0; from < state.n; ++from)
    for (int to = 0; to < state.n; ++to)
      if (from != to && state.arc(from, to))
        out << "  \"" << node_name(from, names) << "\" -> \"" << node_name(to, names) << "\";\n";
  out << "}\n";
  return out.str();
}

CompiledInstance compile(const LocalScoreTable& table, const ArcConstraints& constraints,
                         Margin margin, const PenaltyOverride& override_weights) {
  auto vmap = make_variable_map(table.num_variables(), table.max_parents(), constraints);
  auto poly = w_coefficients(table);
  auto deltas = delta_table(poly);
  auto weights = derive_weights(deltas, table.num_variables(), margin);
  if (!override_weights.empty()) weights = apply_override(std::move(weights), override_weights, deltas);
  auto qubo = assemble(poly, weights, vmap);
  return CompiledInstance{table.names(), table.prior(), std::move(poly), std::move(deltas),
                          std::move(weights), std::move(vmap), std::move(qubo)};
}

}  // namespace bnslq
