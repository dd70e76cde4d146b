// bnslq: compile discrete data into a BNSL QUBO, solve it, and check the
// result against exhaustive structure search.
//
//   bnslq scores --data d.csv --max-parents 2 --out s.json
//   bnslq build  --scores s.json --out p.json
//   bnslq solve  --qubo p.json --method sa --seed 7 --out sol.json
//   bnslq decode --qubo p.json --solution sol.json
//   bnslq oracle --scores s.json --out o.json
//   bnslq verify --data d.csv --max-parents 2 --method sa --seed 7

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bnslq/dataset.hpp"
#include "bnslq/errors.hpp"
#include "bnslq/oracle.hpp"
#include "bnslq/qubo.hpp"
#include "bnslq/serialize.hpp"
#include "bnslq/solvers.hpp"

namespace {

using namespace bnslq;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr double kVerifyTolerance = 1e-6;

int default_threads() {
  if (const char* env = std::getenv("BNSLQ_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw ArgumentError(fmt::format("BNSLQ_THREADS must be a positive integer, got '{}'", env));
  }
  return 1;
}

int resolve_variable(const std::string& token, const std::vector<std::string>& names, int n) {
  for (int i = 0; i < static_cast<int>(names.size()); ++i)
    if (names[static_cast<std::size_t>(i)] == token) return i;
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used == token.size() && v >= 0 && v < n) return v;
  } catch (const std::exception&) {
  }
  throw ArgumentError(fmt::format("'{}' is neither a variable name nor an index in [0, {})", token, n));
}

// "i:j" with 0-based indices or variable names.
Arc parse_arc(const std::string& text, const std::vector<std::string>& names, int n) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos) {
    throw ArgumentError(fmt::format("arc '{}' must have the form from:to", text));
  }
  return {resolve_variable(text.substr(0, colon), names, n),
          resolve_variable(text.substr(colon + 1), names, n)};
}

ArcConstraints parse_constraints(const std::vector<std::string>& required,
                                 const std::vector<std::string>& forbidden,
                                 const std::vector<std::string>& names, int n) {
  ArcConstraints c;
  for (const auto& a : required) c.required.insert(parse_arc(a, names, n));
  for (const auto& a : forbidden) c.forbidden.insert(parse_arc(a, names, n));
  c.validate(n);
  return c;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

// Rounded to the verification resolution so float noise does not show.
std::string format_gap(double gap) {
  const double rounded = std::round(gap * 1e9) / 1e9;
  if (rounded == 0.0) return "0.0";
  std::string s = fmt::format("{:.9f}", rounded);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.push_back('0');
  return s;
}

std::string explain_penalties(const CompiledInstance& inst) {
  const int n = inst.vmap.num_variables();
  std::string out = fmt::format("Delta table ({}; row = parent j, column = child i):\n",
                                inst.deltas.mode == DeltaMode::kExact ? "exact" : "upper bound");
  for (int j = 0; j < n; ++j) {
    out += "  ";
    for (int i = 0; i < n; ++i) out += i == j ? fmt::format("{:>12}", "-") : fmt::format("{:12.6f}", inst.deltas.at(j, i));
    out += "\n";
  }
  out += "penalty weights:\n";
  for (int i = 0; i < n; ++i) {
    out += fmt::format("  delta_max[{}] = {:.9g}  (bound {:.9g})\n", i,
                       inst.weights.delta_max[static_cast<std::size_t>(i)], inst.deltas.max_into(i));
  }
  out += fmt::format("  delta_trans = {:.9g}  (bound {:.9g})\n", inst.weights.delta_trans,
                     inst.deltas.max_overall());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out += fmt::format("  delta_consist[{},{}] = {:.9g}\n", i, j, inst.weights.consist(i, j));
  const auto violations = check_sufficiency(inst.weights, inst.deltas);
  out += fmt::format("sufficiency: {}\n", violations.empty() ? "verified" : "unverified");
  for (const auto& v : violations) out += "  " + v.description + "\n";
  return out;
}

std::string describe(const DecodedState& state, const std::vector<std::string>& names) {
  std::string out = "edges:\n";
  const std::string edges = to_edge_list(state, names);
  out += edges.empty() ? "(none)\n" : edges;
  out += to_dot(state, names);
  if (state.violations.empty()) {
    out += "violations: none\n";
  } else {
    out += fmt::format("violations: {}\n", state.violations.size());
    for (const auto& v : state.violations) out += fmt::format("  {}: {}\n", to_string(v.type), v.detail);
  }
  return out;
}

struct SolveOptions {
  std::string method = "sa";
  int sweeps = SaParams{}.sweeps;
  int restarts = SaParams{}.restarts;
  std::optional<double> beta_initial;
  std::optional<double> beta_final;
  int pool = SaParams{}.pool_size;
  std::uint64_t seed = 0;
  int threads = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--method", method, "exhaustive, structured or sa")
        ->check(CLI::IsMember({"exhaustive", "structured", "sa"}));
    cmd->add_option("--sweeps", sweeps, "SA sweeps per restart");
    cmd->add_option("--restarts", restarts, "SA restarts");
    cmd->add_option("--beta-initial", beta_initial, "SA initial inverse temperature");
    cmd->add_option("--beta-final", beta_final, "SA final inverse temperature");
    cmd->add_option("--pool", pool, "number of distinct low-energy states to keep");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--threads", threads, "worker threads (default $BNSLQ_THREADS or 1)");
  }

  Solution run(const CompiledInstance& inst) const {
    if (method == "exhaustive") return solve_exhaustive(inst.qubo);
    if (method == "structured") return solve_structured(inst.poly, inst.weights, inst.vmap);
    SaParams params;
    params.sweeps = sweeps;
    params.restarts = restarts;
    params.beta_initial = beta_initial;
    params.beta_final = beta_final;
    params.pool_size = pool;
    params.seed = seed;
    params.threads = threads;
    return solve_sa(inst.qubo, params);
  }
};

struct PenaltyOptions {
  std::vector<std::string> fix_arcs;
  std::vector<std::string> forbid_arcs;
  Margin margin;
  PenaltyOverride overrides;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--fix-arc", fix_arcs, "required arc from:to (repeatable)");
    cmd->add_option("--forbid-arc", forbid_arcs, "forbidden arc from:to (repeatable)");
    cmd->add_option("--eps-rel", margin.rel, "relative penalty margin");
    cmd->add_option("--eps-abs", margin.abs, "absolute penalty margin");
    cmd->add_option("--delta-max", overrides.delta_max, "override every delta_max");
    cmd->add_option("--delta-trans", overrides.delta_trans, "override delta_trans");
    cmd->add_option("--delta-consist", overrides.delta_consist, "override every delta_consist");
  }

  CompiledInstance compile_table(const LocalScoreTable& table) const {
    const auto constraints =
        parse_constraints(fix_arcs, forbid_arcs, table.names(), table.num_variables());
    CompiledInstance inst = compile(table, constraints, margin, overrides);
    if (!inst.weights.verified) {
      std::cerr << "warning: penalty weights below the sufficiency bounds; instance marked "
                   "unverified\n";
    }
    return inst;
  }
};

struct ScoreOptions {
  std::string data;
  int max_parents = 2;
  std::string prior = "k2";
  double ess = 1.0;

  void add_to(CLI::App* cmd, bool data_required) {
    auto* opt = cmd->add_option("--data", data, "CSV data file");
    if (data_required) opt->required();
    cmd->add_option("--max-parents", max_parents, "maximum parent-set size m");
    cmd->add_option("--prior", prior, "k2 or bdeu")->check(CLI::IsMember({"k2", "bdeu"}, CLI::ignore_case));
    cmd->add_option("--ess", ess, "BDeu equivalent sample size");
  }

  LocalScoreTable table() const {
    const Dataset dataset = load_csv_file(data);
    return score_table(dataset, max_parents, PriorSpec{parse_prior_scheme(prior), ess});
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian network structure learning as QUBO"};
  app.require_subcommand(1);

  ScoreOptions score_opts;
  std::string out_path;
  auto* scores_cmd = app.add_subcommand("scores", "compute the local score table");
  score_opts.add_to(scores_cmd, true);
  scores_cmd->add_option("--out", out_path, "output score JSON (default stdout)");

  std::string scores_path;
  std::string text_path;
  bool explain = false;
  PenaltyOptions penalty_opts;
  auto* build_cmd = app.add_subcommand("build", "assemble the QUBO from a score table");
  build_cmd->add_option("--scores", scores_path, "score JSON")->required();
  build_cmd->add_option("--out", out_path, "output QUBO JSON (default stdout)");
  build_cmd->add_option("--text", text_path, "also write the plain-text sparse format here");
  build_cmd->add_flag("--explain-penalties", explain, "print the Delta table and weights");
  penalty_opts.add_to(build_cmd);

  std::string qubo_path;
  SolveOptions solve_opts;
  auto* solve_cmd = app.add_subcommand("solve", "minimize a QUBO");
  solve_cmd->add_option("--qubo", qubo_path, "QUBO JSON")->required();
  solve_cmd->add_option("--out", out_path, "output solution JSON (default stdout)");
  solve_opts.add_to(solve_cmd);

  std::string bits_text, solution_path, dot_path, edges_path;
  auto* decode_cmd = app.add_subcommand("decode", "read a bit assignment back as a graph");
  decode_cmd->add_option("--qubo", qubo_path, "QUBO JSON")->required();
  auto* bits_opt = decode_cmd->add_option("--bits", bits_text, "0/1 string over the free bits");
  decode_cmd->add_option("--solution", solution_path, "solution JSON")->excludes(bits_opt);
  decode_cmd->add_option("--dot", dot_path, "write DOT here");
  decode_cmd->add_option("--edges", edges_path, "write the edge list here");

  int oracle_m = 0;
  int oracle_threads = 1;
  std::vector<std::string> oracle_fix, oracle_forbid;
  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive structure search over DAGs");
  oracle_cmd->add_option("--scores", scores_path, "score JSON")->required();
  oracle_cmd->add_option("--max-parents", oracle_m, "parent limit (default: the table's)");
  oracle_cmd->add_option("--fix-arc", oracle_fix, "required arc from:to (repeatable)");
  oracle_cmd->add_option("--forbid-arc", oracle_forbid, "forbidden arc from:to (repeatable)");
  oracle_cmd->add_option("--out", out_path, "output JSON (default stdout)");
  oracle_cmd->add_option("--threads", oracle_threads, "worker threads");

  ScoreOptions verify_score_opts;
  PenaltyOptions verify_penalty_opts;
  SolveOptions verify_solve_opts;
  verify_solve_opts.method = "structured";
  auto* verify_cmd = app.add_subcommand("verify", "solve and compare against the exact oracle");
  verify_score_opts.add_to(verify_cmd, false);
  auto* verify_scores = verify_cmd->add_option("--scores", scores_path, "score JSON instead of --data");
  verify_cmd->get_option("--data")->excludes(verify_scores);
  verify_penalty_opts.add_to(verify_cmd);
  verify_solve_opts.add_to(verify_cmd);

  try {
    const int threads = default_threads();
    solve_opts.threads = threads;
    verify_solve_opts.threads = threads;
    oracle_threads = threads;
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (scores_cmd->parsed()) {
      emit(out_path, dump(scores_to_json(score_opts.table())));
      return kExitOk;
    }

    if (build_cmd->parsed()) {
      const LocalScoreTable table = scores_from_json(read_json_file(scores_path));
      const CompiledInstance inst = penalty_opts.compile_table(table);
      if (explain) std::cout << explain_penalties(inst);
      if (!text_path.empty()) write_text_file(text_path, qubo_to_text(inst.qubo));
      if (!out_path.empty() || !explain) emit(out_path, dump(instance_to_json(inst)));
      return kExitOk;
    }

    if (solve_cmd->parsed()) {
      const CompiledInstance inst = instance_from_json(read_json_file(qubo_path));
      emit(out_path, dump(solution_to_json(solve_opts.run(inst))));
      return kExitOk;
    }

    if (decode_cmd->parsed()) {
      const CompiledInstance inst = instance_from_json(read_json_file(qubo_path));
      Bits bits;
      if (!solution_path.empty()) {
        bits = solution_from_json(read_json_file(solution_path)).bits;
      } else if (!bits_text.empty()) {
        bits = parse_bit_string(bits_text);
      } else {
        throw ArgumentError("decode needs --bits or --solution");
      }
      if (static_cast<int>(bits.size()) != inst.qubo.num_bits) {
        throw ArgumentError(fmt::format("expected {} bits, got {}", inst.qubo.num_bits, bits.size()));
      }
      const DecodedState state = decode(inst.vmap, bits);
      if (!dot_path.empty()) write_text_file(dot_path, to_dot(state, inst.names));
      if (!edges_path.empty()) write_text_file(edges_path, to_edge_list(state, inst.names));
      std::cout << describe(state, inst.names);
      std::cout << fmt::format("energy: {}\n", energy(inst.qubo, bits));
      return kExitOk;
    }

    if (oracle_cmd->parsed()) {
      const LocalScoreTable table = scores_from_json(read_json_file(scores_path));
      const auto constraints =
          parse_constraints(oracle_fix, oracle_forbid, table.names(), table.num_variables());
      const int m = oracle_m > 0 ? oracle_m : table.max_parents();
      emit(out_path, dump(oracle_to_json(exact_bnsl(table, m, constraints, oracle_threads))));
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      if (verify_score_opts.data.empty() && scores_path.empty()) {
        throw ArgumentError("verify needs --data or --scores");
      }
      const LocalScoreTable table = scores_path.empty()
                                        ? verify_score_opts.table()
                                        : scores_from_json(read_json_file(scores_path));
      const CompiledInstance inst = verify_penalty_opts.compile_table(table);
      const OracleResult oracle = exact_bnsl(table, table.max_parents(), inst.vmap.constraints(),
                                             verify_solve_opts.threads);
      const Solution solution = verify_solve_opts.run(inst);
      const DecodedState state = decode(inst.vmap, solution.bits);

      const double gap = solution.energy - oracle.best_score;
      bool pass = std::abs(gap) <= kVerifyTolerance && state.feasible();
      std::string note;
      if (state.feasible()) {
        const double decoded = structure_score(table, state.parents);
        if (std::abs(decoded - oracle.best_score) > kVerifyTolerance) {
          pass = false;
          note = fmt::format(" decoded_score={}", decoded);
        }
      } else {
        note = fmt::format(" violations={}", state.violations.size());
      }
      std::cout << fmt::format("{} gap={}{}\n", pass ? "PASS" : "FAIL", format_gap(gap), note);
      std::cout << fmt::format("method: {}\noracle score: {}\nsolver energy: {}\nsufficiency: {}\n",
                               solution.method, oracle.best_score, solution.energy,
                               inst.weights.verified ? "verified" : "unverified");
      std::cout << describe(state, inst.names);
      return pass ? kExitOk : kExitVerifyFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
