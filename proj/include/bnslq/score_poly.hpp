#pragma once

#include <unordered_map>
#include <vector>

#include "bnslq/arcs.hpp"
#include "bnslq/scoring.hpp"

namespace bnslq {

struct Coefficient {
  VarMask parents = 0;
  double w = 0.0;
};

// Multilinear form of the score: for child i,
//   H_score^(i)(d) = sum_{|J| <= m} w_i(J) prod_{j in J} d_ji.
// Coefficients are kept for every admissible J, including zeros.
class ScorePolynomial {
 public:
  ScorePolynomial(int n, int m, std::vector<std::vector<Coefficient>> coeffs);

  int num_variables() const { return n_; }
  int max_parents() const { return m_; }
  const std::vector<Coefficient>& coefficients(int child) const {
    return coeffs_.at(static_cast<std::size_t>(child));
  }
  // Zero when J is not admissible for this child.
  double w(int child, VarMask parents) const;

  // H_score^(i) at the indicator vector of `parents`. Equals s_i(parents)
  // only when |parents| <= m.
  double eval_child(int child, VarMask parents) const;

 private:
  int n_;
  int m_;
  std::vector<std::vector<Coefficient>> coeffs_;
  std::vector<std::unordered_map<VarMask, double>> index_;
};

// Moebius inversion of the score table over subsets:
//   w_i(J) = sum_{K subset J} (-1)^{|J|-|K|} s_i(K).
ScorePolynomial w_coefficients(const LocalScoreTable& table);

// Sum over children of H_score^(i); a total function on arc assignments.
double eval_score(const ScorePolynomial& poly, const ArcBits& arcs);
double eval_score(const ScorePolynomial& poly, const std::vector<VarMask>& parents);

enum class DeltaMode { kExact, kUpperBound };

// Delta_ji: the largest score decrease available to child i from adding
// arc j -> i, clamped at zero. Exact for m <= 2, an upper bound for m >= 3.
double delta(const ScorePolynomial& poly, int from, int child);
// The unclamped quantity Delta'_ji (or its upper bound for m >= 3).
double delta_unclamped(const ScorePolynomial& poly, int from, int child);

struct DeltaTable {
  int n = 0;
  DeltaMode mode = DeltaMode::kExact;
  // values[from * n + child] = Delta_{from,child}; diagonal entries are 0.
  std::vector<double> values;

  double at(int from, int child) const {
    return values[static_cast<std::size_t>(from * n + child)];
  }
  // max_{j != i} Delta_ji
  double max_into(int child) const;
  // max over all ordered pairs
  double max_overall() const;
};

DeltaTable delta_table(const ScorePolynomial& poly);

}  // namespace bnslq
