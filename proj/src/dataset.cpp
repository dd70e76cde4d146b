#include "bnslq/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>

#include "bnslq/errors.hpp"
#include "bnslq/subsets.hpp"

namespace bnslq {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

constexpr std::string_view kCardPrefix = "#card:";

}  // namespace

Dataset::Dataset(std::vector<std::string> names, std::vector<int> cardinalities,
                 std::vector<State> cases, std::vector<std::vector<std::string>> labels)
    : names_(std::move(names)),
      cardinalities_(std::move(cardinalities)),
      cases_(std::move(cases)),
      labels_(std::move(labels)) {
  const std::size_t n = names_.size();
  if (n < 2) {
    throw ValidationError(fmt::format("dataset needs at least 2 variables, got {}", n));
  }
  if (n > static_cast<std::size_t>(kMaxVariables)) {
    throw ValidationError(fmt::format("dataset has {} variables; at most {} are supported", n,
                                      kMaxVariables));
  }
  if (cardinalities_.size() != n) {
    throw ValidationError(fmt::format("{} cardinalities given for {} variables",
                                      cardinalities_.size(), n));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw ValidationError("variable names must be non-empty");
    if (!seen.insert(name).second) {
      throw ValidationError(fmt::format("duplicate variable name '{}'", name));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cardinalities_[i] < 2) {
      throw ValidationError(fmt::format(
          "variable '{}' has cardinality {}; every variable needs at least 2 states",
          names_[i], cardinalities_[i]));
    }
  }
  if (cases_.size() % n != 0) {
    throw ValidationError("case matrix size is not a multiple of the variable count");
  }
  num_cases_ = cases_.size() / n;
  for (std::size_t c = 0; c < num_cases_; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const State s = cases_[c * n + i];
      if (s < 0 || s >= cardinalities_[i]) {
        throw ValidationError(fmt::format(
            "case {}: state {} of variable '{}' outside [0, {})", c, s, names_[i],
            cardinalities_[i]));
      }
    }
  }
  if (labels_.empty()) labels_.resize(n);
  if (labels_.size() != n) throw ValidationError("label table size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!labels_[i].empty() &&
        labels_[i].size() > static_cast<std::size_t>(cardinalities_[i])) {
      throw ValidationError(fmt::format("variable '{}' has {} labels but cardinality {}",
                                        names_[i], labels_[i].size(), cardinalities_[i]));
    }
  }
}

const std::vector<std::string>& Dataset::labels(int var) const {
  return labels_.at(static_cast<std::size_t>(var));
}

Dataset load_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::vector<long long> declared;
  bool have_header = false;
  bool have_card = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (view.empty()) continue;
    if (!have_header) {
      header = split_row(view);
      have_header = true;
      continue;
    }
    if (!have_card && rows.empty() && view.starts_with(kCardPrefix)) {
      const auto cells = split_row(view.substr(kCardPrefix.size()));
      if (cells.size() != header.size()) {
        throw ParseError(fmt::format("row {}: cardinality row has {} fields, header has {}",
                                     line_no, cells.size(), header.size()));
      }
      for (const auto& cell : cells) {
        long long v = 0;
        if (!parse_int(cell, v)) {
          throw ParseError(fmt::format("row {}: cardinality '{}' is not an integer", line_no, cell));
        }
        declared.push_back(v);
      }
      have_card = true;
      continue;
    }
    auto cells = split_row(view);
    if (cells.size() != header.size()) {
      throw ParseError(fmt::format("row {}: expected {} fields, found {}", line_no,
                                   header.size(), cells.size()));
    }
    rows.push_back(std::move(cells));
    line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError("empty input: missing header row");

  const std::size_t n = header.size();
  if (n < 2) {
    throw ValidationError(fmt::format("dataset needs at least 2 variables, got {}", n));
  }

  std::vector<State> cases(rows.size() * n);
  std::vector<int> cards(n, 0);
  std::vector<std::vector<std::string>> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool numeric = true;
    for (const auto& row : rows) {
      long long v = 0;
      if (!parse_int(row[i], v)) {
        numeric = false;
        break;
      }
    }
    long long max_seen = -1;
    if (numeric) {
      for (std::size_t c = 0; c < rows.size(); ++c) {
        long long v = 0;
        parse_int(rows[c][i], v);
        if (v < 0) {
          throw ValidationError(fmt::format("row {}: negative state {} for '{}'",
                                            line_numbers[c], v, header[i]));
        }
        if (have_card && v >= declared[i]) {
          throw ValidationError(fmt::format(
              "row {}: state {} of '{}' is not below its declared cardinality {}",
              line_numbers[c], v, header[i], declared[i]));
        }
        if (v > std::numeric_limits<State>::max()) {
          throw ValidationError(fmt::format("row {}: state {} too large", line_numbers[c], v));
        }
        max_seen = std::max(max_seen, v);
        cases[c * n + i] = static_cast<State>(v);
      }
    } else {
      std::unordered_map<std::string, State> index;
      for (std::size_t c = 0; c < rows.size(); ++c) {
        const auto [it, inserted] =
            index.try_emplace(rows[c][i], static_cast<State>(labels[i].size()));
        if (inserted) labels[i].push_back(rows[c][i]);
        if (have_card && it->second >= declared[i]) {
          throw ValidationError(fmt::format(
              "row {}: label '{}' of '{}' exceeds its declared cardinality {}",
              line_numbers[c], rows[c][i], header[i], declared[i]));
        }
        cases[c * n + i] = it->second;
      }
      max_seen = static_cast<long long>(labels[i].size()) - 1;
    }
    if (have_card) {
      cards[i] = static_cast<int>(declared[i]);
    } else if (rows.empty()) {
      // Nothing observed: binary is the smallest admissible cardinality.
      cards[i] = 2;
    } else {
      cards[i] = static_cast<int>(max_seen + 1);
    }
  }
  return Dataset(std::move(header), std::move(cards), std::move(cases), std::move(labels));
}

Dataset load_csv_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_csv(in);
}

Dataset load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open data file '{}'", path));
  return load_csv(in);
}

ContingencyTable counts(const Dataset& data, int child, std::vector<int> parents) {
  const int n = data.num_variables();
  if (child < 0 || child >= n) {
    throw ArgumentError(fmt::format("child index {} out of range [0, {})", child, n));
  }
  std::sort(parents.begin(), parents.end());
  if (std::adjacent_find(parents.begin(), parents.end()) != parents.end()) {
    throw ArgumentError("parent list contains duplicates");
  }
  for (int p : parents) {
    if (p < 0 || p >= n) {
      throw ArgumentError(fmt::format("parent index {} out of range [0, {})", p, n));
    }
    if (p == child) {
      throw ArgumentError(fmt::format("variable {} cannot be its own parent", child));
    }
  }

  ContingencyTable table;
  table.child = child;
  table.parents = parents;
  table.child_states = data.cardinality(child);
  std::vector<std::size_t> radix(parents.size());
  for (std::size_t p = 0; p < parents.size(); ++p) {
    radix[p] = table.parent_states;
    table.parent_states *= static_cast<std::size_t>(data.cardinality(parents[p]));
  }
  const auto r = static_cast<std::size_t>(table.child_states);
  table.counts.assign(table.parent_states * r, 0);
  table.row_totals.assign(table.parent_states, 0);
  for (std::size_t c = 0; c < data.num_cases(); ++c) {
    std::size_t j = 0;
    for (std::size_t p = 0; p < parents.size(); ++p) {
      j += radix[p] * static_cast<std::size_t>(data.state(c, parents[p]));
    }
    ++table.counts[j * r + static_cast<std::size_t>(data.state(c, child))];
    ++table.row_totals[j];
  }
  return table;
}

}  // namespace bnslq
