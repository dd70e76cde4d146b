#include "bnslq/serialize.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bnslq/errors.hpp"

namespace bnslq {

namespace {

template <typename T>
T field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ParseError(fmt::format("missing field '{}'", key));
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("field '{}': {}", key, e.what()));
  }
}

const Json& array_field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key) || !doc.at(key).is_array()) {
    throw ParseError(fmt::format("missing array field '{}'", key));
  }
  return doc.at(key);
}

Json parent_list(VarMask parents) { return Json(members_of(parents)); }

VarMask parents_from(const Json& list) {
  VarMask mask = 0;
  for (const auto& v : list) {
    const int p = v.get<int>();
    if (p < 0 || p >= kMaxVariables) throw ParseError(fmt::format("parent index {} out of range", p));
    mask |= bit_of(p);
  }
  return mask;
}

Json arcs_to_json(const std::set<Arc>& arcs) {
  Json out = Json::array();
  for (const auto& [from, to] : arcs) out.push_back({from, to});
  return out;
}

std::set<Arc> arcs_from_json(const Json& list) {
  std::set<Arc> out;
  for (const auto& a : list) out.insert({a.at(0).get<int>(), a.at(1).get<int>()});
  return out;
}

}  // namespace

Json prior_to_json(const PriorSpec& prior) {
  Json out;
  out["scheme"] = to_string(prior.scheme);
  out["ess"] = prior.ess;
  return out;
}

PriorSpec prior_from_json(const Json& doc) {
  PriorSpec prior;
  prior.scheme = parse_prior_scheme(field<std::string>(doc, "scheme"));
  prior.ess = doc.contains("ess") ? doc.at("ess").get<double>() : 1.0;
  prior.validate();
  return prior;
}

Json scores_to_json(const LocalScoreTable& table) {
  Json out;
  out["n"] = table.num_variables();
  out["m"] = table.max_parents();
  out["names"] = table.names();
  out["prior"] = prior_to_json(table.prior());
  Json entries = Json::array();
  for (int i = 0; i < table.num_variables(); ++i) {
    for (const auto& fam : table.families(i)) {
      entries.push_back({{"child", i}, {"parents", parent_list(fam.parents)}, {"score", fam.score}});
    }
  }
  out["entries"] = std::move(entries);
  const ScorePolynomial poly = w_coefficients(table);
  Json coeffs = Json::array();
  for (int i = 0; i < poly.num_variables(); ++i) {
    for (const auto& c : poly.coefficients(i)) {
      coeffs.push_back({{"child", i}, {"parents", parent_list(c.parents)}, {"w", c.w}});
    }
  }
  out["coeffs"] = std::move(coeffs);
  return out;
}

LocalScoreTable scores_from_json(const Json& doc) {
  try {
    const int n = field<int>(doc, "n");
    const int m = field<int>(doc, "m");
    if (n < 2 || n > kMaxVariables) throw ParseError(fmt::format("variable count {} out of range", n));
    std::vector<std::string> names;
    if (doc.contains("names")) names = doc.at("names").get<std::vector<std::string>>();
    const PriorSpec prior = doc.contains("prior") ? prior_from_json(doc.at("prior")) : PriorSpec{};
    std::vector<std::vector<FamilyScore>> families(static_cast<std::size_t>(n));
    for (const auto& e : array_field(doc, "entries")) {
      const int child = field<int>(e, "child");
      if (child < 0 || child >= n) throw ParseError(fmt::format("entry child {} out of range", child));
      families[static_cast<std::size_t>(child)].push_back(
          {parents_from(array_field(e, "parents")), field<double>(e, "score")});
    }
    return LocalScoreTable(n, m, prior, std::move(names), std::move(families));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed score file: {}", e.what()));
  }
}

Json qubo_to_json(const Qubo& q) {
  Json out;
  out["num_bits"] = q.num_bits;
  out["offset"] = q.offset;
  Json linear = Json::array();
  for (int a = 0; a < q.num_bits; ++a) {
    const double v = q.linear[static_cast<std::size_t>(a)];
    if (v != 0.0) linear.push_back({a, v});
  }
  out["linear"] = std::move(linear);
  Json quadratic = Json::array();
  for (const auto& [key, v] : q.quadratic) quadratic.push_back({key.first, key.second, v});
  out["quadratic"] = std::move(quadratic);
  return out;
}

Qubo qubo_from_json(const Json& doc) {
  try {
    const int bits = field<int>(doc, "num_bits");
    if (bits < 0) throw ParseError("negative bit count");
    Qubo q(bits);
    q.offset = field<double>(doc, "offset");
    for (const auto& t : array_field(doc, "linear")) {
      const int a = t.at(0).get<int>();
      if (a < 0 || a >= bits) throw ParseError(fmt::format("linear index {} out of range", a));
      q.add_linear(a, t.at(1).get<double>());
    }
    for (const auto& t : array_field(doc, "quadratic")) {
      const int a = t.at(0).get<int>();
      const int b = t.at(1).get<int>();
      if (a < 0 || b < 0 || a >= bits || b >= bits || a >= b) {
        throw ParseError(fmt::format("quadratic key ({}, {}) is not upper-triangular in range", a, b));
      }
      q.add_quadratic(a, b, t.at(2).get<double>());
    }
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed QUBO: {}", e.what()));
  }
}

Json instance_to_json(const CompiledInstance& inst) {
  Json out = qubo_to_json(inst.qubo);
  const VariableMap& vmap = inst.vmap;
  const int n = vmap.num_variables();
  Json meta;
  meta["n"] = n;
  meta["m"] = vmap.max_parents();
  meta["mu"] = vmap.slack_bits_per_node();
  meta["names"] = inst.names;
  meta["prior"] = prior_to_json(inst.prior);
  meta["layout"] = {{"arc_bits", num_arcs(n)},
                    {"order_bits", num_pairs(n)},
                    {"slack_bits", n * vmap.slack_bits_per_node()},
                    {"free_bits", vmap.num_free()}};
  meta["constraints"] = {{"required", arcs_to_json(vmap.constraints().required)},
                         {"forbidden", arcs_to_json(vmap.constraints().forbidden)}};
  Json eliminated = Json::array();
  for (int k = 0; k < vmap.num_logical(); ++k) {
    if (const auto v = vmap.fixed_value(k)) {
      eliminated.push_back({{"bit", vmap.name(k)}, {"logical", k}, {"value", *v}});
    }
  }
  meta["eliminated"] = std::move(eliminated);
  Json consist = Json::array();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) consist.push_back({i, j, inst.weights.consist(i, j)});
  meta["penalties"] = {{"delta_max", inst.weights.delta_max},
                       {"delta_trans", inst.weights.delta_trans},
                       {"delta_consist", std::move(consist)},
                       {"margin", {{"rel", inst.weights.margin.rel}, {"abs", inst.weights.margin.abs}}}};
  Json rows = Json::array();
  for (int j = 0; j < n; ++j) {
    Json row = Json::array();
    for (int i = 0; i < n; ++i) row.push_back(inst.deltas.at(j, i));
    rows.push_back(std::move(row));
  }
  meta["deltas"] = {{"mode", inst.deltas.mode == DeltaMode::kExact ? "exact" : "upper_bound"},
                    {"values", std::move(rows)}};
  meta["sufficiency"] = inst.weights.verified ? "verified" : "unverified";
  Json coeffs = Json::array();
  for (int i = 0; i < n; ++i) {
    for (const auto& c : inst.poly.coefficients(i)) {
      coeffs.push_back({{"child", i}, {"parents", parent_list(c.parents)}, {"w", c.w}});
    }
  }
  meta["coeffs"] = std::move(coeffs);
  out["metadata"] = std::move(meta);
  return out;
}

CompiledInstance instance_from_json(const Json& doc) {
  try {
    Qubo q = qubo_from_json(doc);
    if (!doc.contains("metadata")) throw ParseError("QUBO file has no metadata block");
    const Json& meta = doc.at("metadata");
    const int n = field<int>(meta, "n");
    const int m = field<int>(meta, "m");
    if (n < 2 || n > kMaxVariables) throw ParseError(fmt::format("variable count {} out of range", n));
    ArcConstraints constraints;
    if (meta.contains("constraints")) {
      constraints.required = arcs_from_json(meta.at("constraints").at("required"));
      constraints.forbidden = arcs_from_json(meta.at("constraints").at("forbidden"));
    }
    VariableMap vmap = make_variable_map(n, m, constraints);
    if (vmap.num_free() != q.num_bits) {
      throw ValidationError(fmt::format("QUBO has {} bits but its layout has {} free bits",
                                        q.num_bits, vmap.num_free()));
    }
    std::vector<std::vector<Coefficient>> coeffs(static_cast<std::size_t>(n));
    for (const auto& c : array_field(meta, "coeffs")) {
      const int child = field<int>(c, "child");
      if (child < 0 || child >= n) throw ParseError(fmt::format("coefficient child {} out of range", child));
      coeffs[static_cast<std::size_t>(child)].push_back(
          {parents_from(array_field(c, "parents")), field<double>(c, "w")});
    }
    ScorePolynomial poly(n, m, std::move(coeffs));

    const Json& pen = meta.at("penalties");
    PenaltyWeights weights;
    weights.n = n;
    weights.delta_max = pen.at("delta_max").get<std::vector<double>>();
    weights.delta_trans = pen.at("delta_trans").get<double>();
    weights.delta_consist.assign(static_cast<std::size_t>(num_pairs(n)), 0.0);
    for (const auto& t : pen.at("delta_consist")) {
      const int i = t.at(0).get<int>();
      const int j = t.at(1).get<int>();
      if (i < 0 || j >= n || i >= j) throw ParseError("delta_consist pair out of range");
      weights.delta_consist[static_cast<std::size_t>(pair_index(n, i, j))] = t.at(2).get<double>();
    }
    if (pen.contains("margin")) {
      weights.margin.rel = pen.at("margin").at("rel").get<double>();
      weights.margin.abs = pen.at("margin").at("abs").get<double>();
    }
    if (static_cast<int>(weights.delta_max.size()) != n) throw ParseError("delta_max has the wrong length");

    DeltaTable deltas = delta_table(poly);
    weights.verified = field<std::string>(meta, "sufficiency") == "verified";

    std::vector<std::string> names;
    if (meta.contains("names")) names = meta.at("names").get<std::vector<std::string>>();
    const PriorSpec prior = meta.contains("prior") ? prior_from_json(meta.at("prior")) : PriorSpec{};
    return CompiledInstance{std::move(names), prior, std::move(poly), std::move(deltas),
                            std::move(weights), std::move(vmap), std::move(q)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed QUBO metadata: {}", e.what()));
  }
}

std::string qubo_to_text(const Qubo& q) {
  std::string out = fmt::format("c {}\n", q.offset);
  for (int a = 0; a < q.num_bits; ++a) {
    const double v = q.linear[static_cast<std::size_t>(a)];
    if (v != 0.0) out += fmt::format("l {} {}\n", a, v);
  }
  for (const auto& [key, v] : q.quadratic) out += fmt::format("q {} {} {}\n", key.first, key.second, v);
  return out;
}

Qubo qubo_from_text(const std::string& text, int num_bits) {
  Qubo q(num_bits);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    char tag = 0;
    fields >> tag;
    int a = 0, b = 0;
    double v = 0.0;
    if (tag == 'c' && (fields >> v)) {
      q.offset += v;
    } else if (tag == 'l' && (fields >> a >> v) && a >= 0 && a < num_bits) {
      q.add_linear(a, v);
    } else if (tag == 'q' && (fields >> a >> b >> v) && a >= 0 && b >= 0 && a < num_bits &&
               b < num_bits) {
      q.add_quadratic(a, b, v);
    } else {
      throw ParseError(fmt::format("line {}: malformed QUBO term '{}'", line_no, line));
    }
  }
  return q;
}

Json solution_to_json(const Solution& s) {
  Json out;
  out["method"] = s.method;
  out["seed"] = s.seed;
  out["energy"] = s.energy;
  out["bits"] = to_bit_string(s.bits);
  Json pool = Json::array();
  for (const auto& p : s.pool) pool.push_back({{"bits", to_bit_string(p.bits)}, {"energy", p.energy}});
  out["pool"] = std::move(pool);
  return out;
}

Solution solution_from_json(const Json& doc) {
  Solution s;
  s.method = field<std::string>(doc, "method");
  s.seed = doc.contains("seed") ? doc.at("seed").get<std::uint64_t>() : 0;
  s.energy = field<double>(doc, "energy");
  s.bits = parse_bit_string(field<std::string>(doc, "bits"));
  if (doc.contains("pool")) {
    for (const auto& p : doc.at("pool")) {
      s.pool.push_back({parse_bit_string(field<std::string>(p, "bits")), field<double>(p, "energy")});
    }
  }
  return s;
}

Json oracle_to_json(const OracleResult& result) {
  Json out;
  out["method"] = "oracle";
  out["best_score"] = result.best_score;
  out["count_feasible"] = result.count_feasible;
  Json dags = Json::array();
  for (const auto& dag : result.best_dags) {
    Json edges = Json::array();
    for (int to = 0; to < static_cast<int>(dag.size()); ++to)
      for (int from : members_of(dag[static_cast<std::size_t>(to)])) edges.push_back({from, to});
    std::sort(edges.begin(), edges.end());
    dags.push_back(std::move(edges));
  }
  out["best_dags"] = std::move(dags);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw ValidationError(fmt::format("failed writing '{}'", path));
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace bnslq
