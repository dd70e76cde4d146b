#include "bnslq/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "bnslq/errors.hpp"

namespace bnslq {

double PriorSpec::alpha_ijk(int child_states, double parent_states) const {
  if (scheme == PriorScheme::kK2) return 1.0;
  return ess / (static_cast<double>(child_states) * parent_states);
}

void PriorSpec::validate() const {
  if (scheme == PriorScheme::kBDeu && !(ess > 0.0 && std::isfinite(ess))) {
    throw ArgumentError(fmt::format("equivalent sample size must be positive, got {}", ess));
  }
}

std::string to_string(PriorScheme scheme) {
  return scheme == PriorScheme::kK2 ? "k2" : "bdeu";
}

PriorScheme parse_prior_scheme(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "k2") return PriorScheme::kK2;
  if (lower == "bdeu") return PriorScheme::kBDeu;
  throw ArgumentError(fmt::format("unknown prior scheme '{}' (expected k2 or bdeu)", text));
}

double local_score(const ContingencyTable& table, const PriorSpec& prior) {
  prior.validate();
  const int r = table.child_states;
  const double a_ijk = prior.alpha_ijk(r, static_cast<double>(table.parent_states));
  const double a_ij = a_ijk * r;
  const double lg_a_ijk = std::lgamma(a_ijk);
  const double lg_a_ij = std::lgamma(a_ij);

  double log_likelihood = 0.0;
  for (std::size_t j = 0; j < table.parent_states; ++j) {
    const auto n_ij = table.row_totals[j];
    if (n_ij == 0) continue;  // Gamma(a)/Gamma(a) = 1
    log_likelihood += lg_a_ij - std::lgamma(n_ij + a_ij);
    for (int k = 0; k < r; ++k) {
      const auto n_ijk = table.count(j, k);
      if (n_ijk != 0) log_likelihood += std::lgamma(n_ijk + a_ijk) - lg_a_ijk;
    }
  }
  if (!std::isfinite(log_likelihood)) {
    throw InternalError(fmt::format("non-finite local score for child {}", table.child));
  }
  return -log_likelihood;
}

double local_score(const Dataset& data, int child, const std::vector<int>& parents,
                   const PriorSpec& prior) {
  return local_score(counts(data, child, parents), prior);
}

LocalScoreTable::LocalScoreTable(int n, int m, PriorSpec prior, std::vector<std::string> names,
                                 std::vector<std::vector<FamilyScore>> families)
    : n_(n), m_(m), prior_(prior), names_(std::move(names)), families_(std::move(families)) {
  if (n_ < 2 || n_ > kMaxVariables) {
    throw ValidationError(fmt::format("score table variable count {} out of range", n_));
  }
  if (m_ < 1 || m_ > n_ - 1) {
    throw ValidationError(fmt::format("max parents {} out of range [1, {}]", m_, n_ - 1));
  }
  if (names_.empty()) {
    for (int i = 0; i < n_; ++i) names_.push_back(fmt::format("X{}", i));
  }
  if (static_cast<int>(names_.size()) != n_ || static_cast<int>(families_.size()) != n_) {
    throw ValidationError("score table shape does not match its variable count");
  }
  const std::size_t expected = families_per_child(n_, m_);
  index_.resize(families_.size());
  for (int i = 0; i < n_; ++i) {
    auto& fams = families_[static_cast<std::size_t>(i)];
    std::sort(fams.begin(), fams.end(), [](const FamilyScore& a, const FamilyScore& b) {
      return members_of(a.parents) < members_of(b.parents);
    });
    if (fams.size() != expected) {
      throw ValidationError(fmt::format("child {} has {} score entries, expected {}", i,
                                        fams.size(), expected));
    }
    auto& idx = index_[static_cast<std::size_t>(i)];
    for (std::size_t f = 0; f < fams.size(); ++f) {
      const auto& fam = fams[f];
      if ((fam.parents & bit_of(i)) || popcount(fam.parents) > m_ ||
          (n_ < 64 && (fam.parents >> n_) != 0)) {
        throw ValidationError(fmt::format("child {} has an inadmissible parent set", i));
      }
      if (!std::isfinite(fam.score)) {
        throw ValidationError(fmt::format("child {} has a non-finite score", i));
      }
      if (!idx.emplace(fam.parents, f).second) {
        throw ValidationError(fmt::format("child {} has a duplicated parent set", i));
      }
    }
  }
}

bool LocalScoreTable::contains(int child, VarMask parents) const {
  if (child < 0 || child >= n_) return false;
  return index_[static_cast<std::size_t>(child)].contains(parents);
}

double LocalScoreTable::score(int child, VarMask parents) const {
  if (child < 0 || child >= n_) {
    throw InternalError(fmt::format("score lookup for child {} out of range", child));
  }
  const auto& idx = index_[static_cast<std::size_t>(child)];
  const auto it = idx.find(parents);
  if (it == idx.end()) {
    throw InternalError(fmt::format("no score entry for child {} with parents {{{}}}", child,
                                    fmt::join(members_of(parents), ",")));
  }
  return families_[static_cast<std::size_t>(child)][it->second].score;
}

std::size_t LocalScoreTable::num_entries() const {
  std::size_t total = 0;
  for (const auto& f : families_) total += f.size();
  return total;
}

std::size_t families_per_child(int n, int m) {
  std::size_t total = 0;
  for (int l = 0; l <= m; ++l) total += binomial(n - 1, l);
  return total;
}

LocalScoreTable score_table(const Dataset& data, int m, const PriorSpec& prior) {
  const int n = data.num_variables();
  if (m < 1 || m > n - 1) {
    throw ArgumentError(fmt::format("max parents must lie in [1, {}], got {}", n - 1, m));
  }
  prior.validate();
  std::vector<std::vector<FamilyScore>> families(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int v = 0; v < n; ++v)
      if (v != i) others.push_back(v);
    for (VarMask parents : subsets_up_to(others, m)) {
      families[static_cast<std::size_t>(i)].push_back(
          {parents, local_score(data, i, members_of(parents), prior)});
    }
  }
  return LocalScoreTable(n, m, prior, data.names(), std::move(families));
}

}  // namespace bnslq
