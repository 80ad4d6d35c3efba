#include "ucake/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ucake/bounds.hpp"
#include "ucake/error.hpp"
#include "ucake/protocol.hpp"
#include "ucake/simulator.hpp"
#include "ucake/solver.hpp"

namespace ucake {

namespace {

struct SolveOptions {
  std::size_t max_depth = 6;
  std::size_t table_levels = 5;
  std::uint64_t max_scale = 64;
  std::uint64_t max_nodes = 10'000'000;
  std::uint64_t max_entries = kDefaultMaxEntries;
};

struct Solved {
  ProtocolTree tree;
  std::size_t best;   // cuts used by tree
  std::size_t lower;  // proven lower bound on f
  bool exact;
  std::optional<std::string> note;
  bool budget_hit = false;  // search stopped by its depth or node budget
};

Ratio read_ratio(const std::string& a, const std::string& b, std::ostream& err) {
  Ratio raw(parse_natural(a), parse_natural(b));
  Ratio r = reduce(raw);
  if (r != raw) err << "note: " << to_string(raw) << " reduced to lowest terms " << to_string(r) << "\n";
  return r;
}

void add_solve_options(CLI::App* cmd, SolveOptions& opts) {
  cmd->add_option("--max-depth", opts.max_depth, "Deepest witness the search looks for")->capture_default_str();
  cmd->add_option("--max-scale", opts.max_scale, "Largest scale used when inverting products")->capture_default_str();
  cmd->add_option("--max-nodes", opts.max_nodes, "Search node budget")->capture_default_str();
  cmd->add_option("--table-levels", opts.table_levels, "Level sets built before searching")->capture_default_str();
  cmd->add_option("--max-entries", opts.max_entries, "Entry budget for the level table")->capture_default_str();
}

Solved solve_ratio(const Ratio& r, const SolveOptions& opts) {
  const std::size_t lower = lower_bound_int(r);
  const std::size_t upper = upper_bound_int(r);
  if (lower == upper) return {build_near_half(r), upper, lower, true, std::nullopt};

  LevelTable table;
  std::optional<std::string> note;
  const CanonicalKey key = canonical_key(r);
  const std::size_t levels = std::min(opts.table_levels, opts.max_depth);
  try {
    while (table.levels() < levels && !table.find(key)) table.extend(opts.max_entries);
  } catch (const LevelBudgetExceeded& e) {
    table = e.completed();
    note = std::string(e.what()) + "; using " + std::to_string(table.levels()) + " levels";
  }
  if (const auto f = table.f_value(key)) return {witness_tree(r, table), *f, *f, true, note};

  const std::size_t known = std::max(lower, table.levels() + 1);
  if (upper <= known) return {build_near_half(r), upper, upper, true, note};

  const SearchBudget budget{opts.max_depth, opts.max_nodes, opts.max_scale};
  SearchReport report = search_witness(r, budget, &table);
  const std::size_t proven = std::max(known, report.exact_above);
  std::string summary = report.summary(r);
  if (note) summary = *note + "; " + summary;
  const bool budget_hit = report.outcome != SearchOutcome::found;
  if (report.witness && report.depth < upper) {
    return {std::move(*report.witness), report.depth, proven, report.depth == proven, summary, budget_hit};
  }
  return {build_near_half(r), upper, proven, upper == proven, summary, budget_hit};
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  os << text;
  return static_cast<bool>(os);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string f_label(const Ratio& r) { return "f(" + to_string(r.a()) + "," + to_string(r.b()) + ")"; }

// ---------------------------------------------------------------------------
// Subcommands

struct SolveArgs {
  std::string a, b;
  SolveOptions opts;
  std::string out = "witness.json";
};

int run_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  const Ratio r = read_ratio(args.a, args.b, err);
  Solved solved = solve_ratio(r, args.opts);
  if (solved.exact) {
    out << f_label(r) << " = " << solved.best << "\n";
  } else {
    out << f_label(r) << " <= " << solved.best << "\n";
    out << f_label(r) << " >= " << solved.lower << "\n";
  }
  if (solved.note) out << "note: " << *solved.note << "\n";
  if (!args.out.empty()) {
    if (!write_file(args.out, export_tree(solved.tree, ExportFormat::json), err)) return kExitUsage;
    out << "witness: " << args.out << " (" << worst_case_depth(solved.tree) << " cuts)\n";
  }
  return solved.budget_hit ? kExitBudget : kExitOk;
}

struct BoundsArgs {
  std::vector<std::string> numbers;
};

int run_bounds(const BoundsArgs& args, std::ostream& out, std::ostream& err) {
  if (args.numbers.size() % 2 != 0) {
    err << "error: bounds expects pairs A B\n";
    return kExitUsage;
  }
  const LevelTable table = level_sets(4);
  for (std::size_t i = 0; i < args.numbers.size(); i += 2) {
    const Ratio r = read_ratio(args.numbers[i], args.numbers[i + 1], err);
    const std::size_t lower = lower_bound_int(r);
    const std::size_t upper = upper_bound_int(r);
    std::string f = "?";
    if (const auto known = table.f_value(canonical_key(r))) {
      f = std::to_string(*known);
    } else if (lower == upper || upper == table.levels() + 1) {
      f = std::to_string(upper);
    }
    out << to_string(r) << ": lower " << lower << ", f " << f << ", upper " << upper << "\n";
  }
  return kExitOk;
}

struct TreeArgs {
  std::string a, b;
  std::string method = "near-half";
  std::string format = "json";
  std::string out;
  SolveOptions opts;
};

int run_tree(const TreeArgs& args, std::ostream& out, std::ostream& err) {
  const Ratio r = read_ratio(args.a, args.b, err);
  int status = kExitOk;
  std::optional<ProtocolTree> tree;
  if (args.method == "near-half") {
    tree = build_near_half(r);
  } else {
    Solved solved = solve_ratio(r, args.opts);
    if (!solved.exact) err << "note: tree may not be optimal: " << solved.note.value_or("search incomplete") << "\n";
    if (solved.budget_hit) status = kExitBudget;
    tree = std::move(solved.tree);
  }
  const std::string text = export_tree(*tree, args.format == "dot" ? ExportFormat::dot : ExportFormat::json);
  if (args.out.empty()) {
    out << text;
  } else if (!write_file(args.out, text, err)) {
    return kExitUsage;
  }
  return status;
}

struct LevelsArgs {
  std::size_t n = 0;
  std::string out;
  std::uint64_t max_entries = kDefaultMaxEntries;
};

int run_levels(const LevelsArgs& args, std::ostream& out, std::ostream& err) {
  LevelTable table;
  int status = kExitOk;
  try {
    while (table.levels() < args.n) table.extend(args.max_entries);
  } catch (const LevelBudgetExceeded& e) {
    err << "budget: " << e.what() << "; writing " << e.completed().levels() << " complete levels\n";
    table = e.completed();
    status = kExitBudget;
  }
  for (std::size_t n = 0; n <= table.levels(); ++n) {
    const auto bound = sum_bound(n);
    out << "A_" << n << ": " << table.up_to(n).size() << " ratios, max sum " << table.max_sum(n);
    if (bound) out << " (bound " << *bound << ")";
    out << "\n";
  }
  if (!args.out.empty()) {
    std::ostringstream os;
    table.write_jsonl(os);
    if (!write_file(args.out, os.str(), err)) return kExitUsage;
  }
  return status;
}

struct ConstructArgs {
  std::size_t n = 1;
  std::string out;
};

int run_construct(const ConstructArgs& args, std::ostream& out, std::ostream& err) {
  if (args.n == 0) {
    err << "error: construct needs N >= 1\n";
    return kExitUsage;
  }
  const ConstructionChain chain = construction1(args.n);
  for (const ChainItem& item : chain.items) out << to_string(item.ratio) << " sum " << sum(item.ratio) << "\n";
  const auto report = validate_tree(chain.witness);
  out << "witness: " << worst_case_depth(chain.witness) << " cuts, " << (report ? "valid" : "INVALID") << "\n";
  if (!args.out.empty() && !write_file(args.out, export_tree(chain.witness, ExportFormat::json), err)) {
    return kExitUsage;
  }
  return report ? kExitOk : kExitViolation;
}

struct SimulateArgs {
  std::string tree, va, vb;
  std::uint64_t seed = 0;
  std::size_t fuzz = 0;
  std::size_t pieces = 6;
};

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  const ProtocolTree tree = tree_from_json(read_json_file(args.tree));
  if (const auto report = validate_tree(tree); !report) {
    err << "error: invalid tree at " << report.violation->path << ": " << report.violation->reason << "\n";
    return kExitUsage;
  }
  bool pass = true;
  if (!args.va.empty() || !args.vb.empty()) {
    if (args.va.empty() || args.vb.empty()) {
      err << "error: --va and --vb must be given together\n";
      return kExitUsage;
    }
    const ExecutionTrace trace =
        run_protocol(tree, measure_from_json(read_json_file(args.va)), measure_from_json(read_json_file(args.vb)));
    out << trace_to_json(trace).dump(2) << "\n";
    pass = trace.guarantee_holds() && trace.partitions_cake();
  } else if (args.fuzz == 0) {
    err << "error: simulate needs --va and --vb, or --fuzz K\n";
    return kExitUsage;
  }
  if (args.fuzz > 0) {
    const FuzzReport report = fuzz_protocol(tree, args.seed, args.fuzz, args.pieces);
    out << "fuzz: " << report.runs << " runs from seed " << args.seed << ", " << report.failures
        << " failures, at most " << report.max_steps << " cuts\n";
    if (report.first_failure) {
      out << "first failure (seed " << report.first_failure->seed << "):\n"
          << trace_to_json(report.first_failure->trace).dump(2) << "\n";
    }
    pass = pass && report.failures == 0;
  }
  out << "guarantee: " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitViolation;
}

int run_bench(std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  const auto time = [&out](const std::string& name, const auto& body) {
    const auto start = Clock::now();
    const std::string detail = body();
    const std::chrono::duration<double, std::milli> elapsed = Clock::now() - start;
    out << std::left << std::setw(28) << name << std::right << std::setw(10) << std::fixed << std::setprecision(1)
        << elapsed.count() << " ms  " << detail << "\n";
  };
  LevelTable table;
  for (std::size_t n = 1; n <= 5; ++n) {
    time("levels A_" + std::to_string(n), [&] {
      table.extend(kDefaultMaxEntries);
      return std::to_string(table.size()) + " ratios";
    });
  }
  time("f_exact all sums <= 32", [&] {
    std::size_t count = 0;
    for (int s = 2; s <= 32; ++s) {
      for (int a = 0; a <= s; ++a) {
        if (std::gcd(a, s - a) != 1) continue;
        f_exact(Ratio(a, s - a), 5, table);
        ++count;
      }
    }
    return std::to_string(count) + " ratios";
  });
  time("search (9,8)", [] {
    const auto report = search_witness(Ratio(9, 8), SearchBudget{});
    return std::to_string(report.nodes) + " nodes";
  });
  const Ratio giant(58470565, 72019008);
  time("search giant, A_5 table", [&] {
    const auto report = search_witness(giant, SearchBudget{6, 100'000'000, 64}, &table);
    return std::to_string(report.nodes) + " nodes, depth " + std::to_string(report.depth);
  });
  time("near-half giant", [&] { return std::to_string(expanded_size(build_near_half(giant))) + " nodes"; });
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact two-player cake division with unequal entitlements", "ucake"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Compute f(A,B) and write an optimal witness tree");
  solve_cmd->add_option("A", solve.a, "Alice's entitlement")->required();
  solve_cmd->add_option("B", solve.b, "Bob's entitlement")->required();
  add_solve_options(solve_cmd, solve.opts);
  solve_cmd->add_option("--out", solve.out, "Witness JSON file (empty to skip)")->capture_default_str();

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Print lower bound, f if known, and upper bound");
  bounds_cmd->add_option("ratios", bounds.numbers, "A B [A B ...]")->required();

  TreeArgs tree;
  auto* tree_cmd = app.add_subcommand("tree", "Build and export a protocol tree");
  tree_cmd->add_option("A", tree.a, "Alice's entitlement")->required();
  tree_cmd->add_option("B", tree.b, "Bob's entitlement")->required();
  tree_cmd->add_option("--method", tree.method)->check(CLI::IsMember({"near-half", "optimal"}))->capture_default_str();
  tree_cmd->add_option("--format", tree.format)->check(CLI::IsMember({"json", "dot"}))->capture_default_str();
  tree_cmd->add_option("--out", tree.out, "Output file (default: standard output)");
  add_solve_options(tree_cmd, tree.opts);

  LevelsArgs levels;
  auto* levels_cmd = app.add_subcommand("levels", "Build level sets A_0..A_N");
  levels_cmd->add_option("N", levels.n, "Number of levels")->required();
  levels_cmd->add_option("--out", levels.out, "JSON-lines output file");
  levels_cmd->add_option("--max-entries", levels.max_entries)->capture_default_str();

  ConstructArgs construct;
  auto* construct_cmd = app.add_subcommand("construct", "Print the doubling chain with exactly N cuts");
  construct_cmd->add_option("N", construct.n, "Chain length")->required();
  construct_cmd->add_option("--out", construct.out, "Witness JSON file");

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Play a tree against valuation measures");
  simulate_cmd->add_option("--tree", simulate.tree, "Tree JSON file")->required();
  simulate_cmd->add_option("--va", simulate.va, "Alice's measure JSON file");
  simulate_cmd->add_option("--vb", simulate.vb, "Bob's measure JSON file");
  simulate_cmd->add_option("--seed", simulate.seed)->capture_default_str();
  simulate_cmd->add_option("--fuzz", simulate.fuzz, "Number of random measure pairs")->capture_default_str();
  simulate_cmd->add_option("--pieces", simulate.pieces, "Maximum pieces per random measure")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Time level sets and search on a fixed suite");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return run_solve(solve, out, err);
    if (*bounds_cmd) return run_bounds(bounds, out, err);
    if (*tree_cmd) return run_tree(tree, out, err);
    if (*levels_cmd) return run_levels(levels, out, err);
    if (*construct_cmd) return run_construct(construct, out, err);
    if (*simulate_cmd) return run_simulate(simulate, out, err);
    if (*bench_cmd) return run_bench(out);
  } catch (const LevelBudgetExceeded& e) {
    err << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ucake
