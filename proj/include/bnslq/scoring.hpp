#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "bnslq/dataset.hpp"
#include "bnslq/subsets.hpp"

namespace bnslq {

enum class PriorScheme { kK2, kBDeu };

// Dirichlet hyperparameters. K2 uses alpha_ijk = 1; BDeu spreads an
// equivalent sample size uniformly: alpha_ijk = ess / (r_i * q_i).
struct PriorSpec {
  PriorScheme scheme = PriorScheme::kK2;
  double ess = 1.0;

  static PriorSpec k2() { return {PriorScheme::kK2, 1.0}; }
  static PriorSpec bdeu(double ess) { return {PriorScheme::kBDeu, ess}; }

  double alpha_ijk(int child_states, double parent_states) const;
  void validate() const;
};

std::string to_string(PriorScheme scheme);
PriorScheme parse_prior_scheme(const std::string& text);

// Negated log marginal likelihood (nats) of the child's column given the
// parent set: the family's factor of p(D | B_S) under multinomial sampling
// with Dirichlet priors, computed in log space.
double local_score(const Dataset& data, int child, const std::vector<int>& parents,
                   const PriorSpec& prior);
double local_score(const ContingencyTable& table, const PriorSpec& prior);

struct FamilyScore {
  VarMask parents = 0;
  double score = 0.0;
};

// s_i(J) for every child i and every parent set J with |J| <= m, i not in J.
class LocalScoreTable {
 public:
  // `families[i]` must hold exactly the admissible parent sets of child i
  // (any order); they are stored in lexicographic order.
  LocalScoreTable(int n, int m, PriorSpec prior, std::vector<std::string> names,
                  std::vector<std::vector<FamilyScore>> families);

  int num_variables() const { return n_; }
  int max_parents() const { return m_; }
  const PriorSpec& prior() const { return prior_; }
  const std::vector<std::string>& names() const { return names_; }

  // Families of one child in lexicographic parent-set order.
  const std::vector<FamilyScore>& families(int child) const {
    return families_.at(static_cast<std::size_t>(child));
  }
  bool contains(int child, VarMask parents) const;
  // Throws InternalError when the entry is absent.
  double score(int child, VarMask parents) const;

  std::size_t num_entries() const;

 private:
  int n_;
  int m_;
  PriorSpec prior_;
  std::vector<std::string> names_;
  std::vector<std::vector<FamilyScore>> families_;
  std::vector<std::unordered_map<VarMask, std::size_t>> index_;
};

// Number of admissible parent sets per child: sum_{l<=m} C(n-1, l).
std::size_t families_per_child(int n, int m);

// Scores every family with at most m parents. Requires 1 <= m <= n-1.
LocalScoreTable score_table(const Dataset& data, int m, const PriorSpec& prior);

}  // namespace bnslq
