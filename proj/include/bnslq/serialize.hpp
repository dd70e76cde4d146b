#pragma once

#include <string>

#include <json.hpp>

#include "bnslq/oracle.hpp"
#include "bnslq/qubo.hpp"
#include "bnslq/solvers.hpp"

namespace bnslq {

using Json = nlohmann::ordered_json;

// Score file: {n, m, names, prior, entries: [{child, parents, score}],
// coeffs: [{child, parents, w}]}. `coeffs` is informational; readers
// rebuild the polynomial from the entries.
Json scores_to_json(const LocalScoreTable& table);
LocalScoreTable scores_from_json(const Json& doc);

Json prior_to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const Json& doc);

// QUBO file: {num_bits, offset, linear: [[i, v]], quadratic: [[a, b, v]],
// metadata: {...}}. The metadata block carries the layout, constraints,
// eliminated bits, penalty weights, delta table, sufficiency flag and the
// score coefficients, so an instance can be rebuilt from the file alone.
Json qubo_to_json(const Qubo& q);
Qubo qubo_from_json(const Json& doc);
Json instance_to_json(const CompiledInstance& instance);
CompiledInstance instance_from_json(const Json& doc);

// One term per line: "c <offset>", "l <i> <v>", "q <i> <j> <v>".
std::string qubo_to_text(const Qubo& q);
Qubo qubo_from_text(const std::string& text, int num_bits);

// {method, seed, energy, bits, pool: [{bits, energy}]}
Json solution_to_json(const Solution& s);
Solution solution_from_json(const Json& doc);

// {method: "oracle", best_score, count_feasible, best_dags: [[[from, to], ...], ...]}
Json oracle_to_json(const OracleResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);
// Two-space indented JSON with a trailing newline.
std::string dump(const Json& doc);

}  // namespace bnslq
