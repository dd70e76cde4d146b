#include "bnslq/score_poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bnslq/errors.hpp"

namespace bnslq {

ScorePolynomial::ScorePolynomial(int n, int m, std::vector<std::vector<Coefficient>> coeffs)
    : n_(n), m_(m), coeffs_(std::move(coeffs)) {
  if (n_ < 2 || n_ > kMaxVariables) {
    throw ValidationError(fmt::format("polynomial variable count {} out of range", n_));
  }
  if (m_ < 1 || m_ > n_ - 1) {
    throw ValidationError(fmt::format("max parents {} out of range [1, {}]", m_, n_ - 1));
  }
  if (static_cast<int>(coeffs_.size()) != n_) {
    throw ValidationError("coefficient table does not match the variable count");
  }
  index_.resize(coeffs_.size());
  for (int i = 0; i < n_; ++i) {
    auto& list = coeffs_[static_cast<std::size_t>(i)];
    std::sort(list.begin(), list.end(), [](const Coefficient& a, const Coefficient& b) {
      return members_of(a.parents) < members_of(b.parents);
    });
    for (const auto& c : list) {
      if ((c.parents & bit_of(i)) || popcount(c.parents) > m_ ||
          (n_ < 64 && (c.parents >> n_) != 0)) {
        throw ValidationError(fmt::format("child {} has an inadmissible coefficient set", i));
      }
      if (!std::isfinite(c.w)) {
        throw ValidationError(fmt::format("child {} has a non-finite coefficient", i));
      }
      if (!index_[static_cast<std::size_t>(i)].emplace(c.parents, c.w).second) {
        throw ValidationError(fmt::format("child {} has a duplicated coefficient set", i));
      }
    }
  }
}

double ScorePolynomial::w(int child, VarMask parents) const {
  const auto& idx = index_.at(static_cast<std::size_t>(child));
  const auto it = idx.find(parents);
  return it == idx.end() ? 0.0 : it->second;
}

double ScorePolynomial::eval_child(int child, VarMask parents) const {
  double total = 0.0;
  for (const auto& c : coefficients(child)) {
    if ((c.parents & ~parents) == 0) total += c.w;
  }
  return total;
}

ScorePolynomial w_coefficients(const LocalScoreTable& table) {
  const int n = table.num_variables();
  std::vector<std::vector<Coefficient>> coeffs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const auto& fam : table.families(i)) {
      const VarMask set = fam.parents;
      const int size = popcount(set);
      double w = 0.0;
      // Every submask of `set`, including the empty set.
      VarMask sub = set;
      while (true) {
        const double s = table.score(i, sub);
        w += ((size - popcount(sub)) % 2 == 0) ? s : -s;
        if (sub == 0) break;
        sub = (sub - 1) & set;
      }
      coeffs[static_cast<std::size_t>(i)].push_back({set, w});
    }
  }
  return ScorePolynomial(n, table.max_parents(), std::move(coeffs));
}

double eval_score(const ScorePolynomial& poly, const std::vector<VarMask>& parents) {
  const int n = poly.num_variables();
  if (static_cast<int>(parents.size()) != n) {
    throw ArgumentError("parent mask count does not match the polynomial");
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += poly.eval_child(i, parents[static_cast<std::size_t>(i)]);
  return total;
}

double eval_score(const ScorePolynomial& poly, const ArcBits& arcs) {
  const int n = poly.num_variables();
  if (static_cast<int>(arcs.size()) != num_arcs(n)) {
    throw ArgumentError(fmt::format("expected {} arc bits, got {}", num_arcs(n), arcs.size()));
  }
  return eval_score(poly, parent_masks(n, arcs));
}

double delta_unclamped(const ScorePolynomial& poly, int from, int child) {
  const int n = poly.num_variables();
  if (from < 0 || from >= n || child < 0 || child >= n) {
    throw ArgumentError(fmt::format("delta indices ({}, {}) out of range", from, child));
  }
  if (from == child) throw ArgumentError("delta requires two distinct variables");
  const int m = poly.max_parents();
  const VarMask j = bit_of(from);

  if (m == 1) return -poly.w(child, j);
  if (m == 2) {
    double value = -poly.w(child, j);
    for (int k = 0; k < n; ++k) {
      if (k == from || k == child) continue;
      value -= std::min(0.0, poly.w(child, j | bit_of(k)));
    }
    return value;
  }
  // m >= 3: every negative term containing j can be switched on at once.
  // The sum of k nonnegative terms is inflated by its worst-case rounding
  // error so it stays an upper bound under any other summation order.
  double bound = 0.0;
  int terms = 0;
  for (const auto& c : poly.coefficients(child)) {
    if ((c.parents & j) && c.w < 0.0) {
      bound -= c.w;
      ++terms;
    }
  }
  return bound * (1.0 + terms * std::numeric_limits<double>::epsilon());
}

double delta(const ScorePolynomial& poly, int from, int child) {
  return std::max(0.0, delta_unclamped(poly, from, child));
}

double DeltaTable::max_into(int child) const {
  double best = 0.0;
  for (int j = 0; j < n; ++j)
    if (j != child) best = std::max(best, at(j, child));
  return best;
}

double DeltaTable::max_overall() const {
  double best = 0.0;
  for (double v : values) best = std::max(best, v);
  return best;
}

DeltaTable delta_table(const ScorePolynomial& poly) {
  const int n = poly.num_variables();
  DeltaTable table;
  table.n = n;
  table.mode = poly.max_parents() <= 2 ? DeltaMode::kExact : DeltaMode::kUpperBound;
  table.values.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j) table.values[static_cast<std::size_t>(j * n + i)] = delta(poly, j, i);
  return table;
}

}  // namespace bnslq
