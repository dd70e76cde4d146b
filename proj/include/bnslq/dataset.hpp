#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace bnslq {

// State of one variable in one case, 0-based.
using State = std::int32_t;

// Discrete case data: n named variables with r_i states each and N cases.
// Immutable once constructed; the constructor validates every invariant.
class Dataset {
 public:
  // `cases` is row-major: cases[c * n + i] is the state of variable i in case c.
  // `labels[i]`, when non-empty, maps state indices of variable i back to the
  // categorical label they were parsed from.
  Dataset(std::vector<std::string> names, std::vector<int> cardinalities,
          std::vector<State> cases,
          std::vector<std::vector<std::string>> labels = {});

  int num_variables() const { return static_cast<int>(names_.size()); }
  std::size_t num_cases() const { return num_cases_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<int>& cardinalities() const { return cardinalities_; }
  int cardinality(int var) const { return cardinalities_.at(static_cast<std::size_t>(var)); }

  State state(std::size_t case_index, int var) const {
    return cases_[case_index * names_.size() + static_cast<std::size_t>(var)];
  }

  // Label table for a variable, empty when the column was numeric.
  const std::vector<std::string>& labels(int var) const;

 private:
  std::vector<std::string> names_;
  std::vector<int> cardinalities_;
  std::vector<State> cases_;
  std::vector<std::vector<std::string>> labels_;
  std::size_t num_cases_ = 0;
};

// Parses comma-separated text: a header of variable names, an optional
// "#card:" row of declared cardinalities, then one case per row. Cells are
// either integer state indices or categorical labels; a column holding any
// non-integer cell is treated as categorical with labels numbered in
// first-seen order. Undeclared cardinalities default to 1 + the largest
// observed index.
Dataset load_csv(std::istream& in);
Dataset load_csv_text(std::string_view text);
Dataset load_csv_file(const std::string& path);

// Sufficient statistics N_ijk for one family (child, parents).
struct ContingencyTable {
  int child = 0;
  std::vector<int> parents;  // sorted ascending
  int child_states = 0;      // r_i
  std::size_t parent_states = 1;  // q_i
  // counts[j * child_states + k] = N_ijk
  std::vector<std::uint32_t> counts;
  // row_totals[j] = N_ij
  std::vector<std::uint32_t> row_totals;

  std::uint32_t count(std::size_t j, int k) const {
    return counts[j * static_cast<std::size_t>(child_states) + static_cast<std::size_t>(k)];
  }
};

// Tallies the contingency table. The joint parent state j is the
// mixed-radix number formed from the parents' states with the smallest
// parent index as the least-significant digit. `parents` may be given in
// any order; it is sorted first. Throws ArgumentError when the child is
// among the parents or an index is out of range.
ContingencyTable counts(const Dataset& data, int child, std::vector<int> parents);

}  // namespace bnslq
