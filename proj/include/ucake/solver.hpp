#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ucake/combinators.hpp"
#include "ucake/error.hpp"
#include "ucake/protocol.hpp"
#include "ucake/ratio.hpp"

namespace ucake {

/// One-cut decomposition: key = canonical_key(star(op, x, y)) where x and y
/// are the child keys, each swapped when the matching flag is set.
struct Witness {
  OperatorId op;
  std::array<std::uint32_t, 2> children;  // indices into the table
  std::array<bool, 2> swapped;
};

struct LevelEntry {
  CanonicalKey key;
  std::size_t f;
  std::optional<Witness> witness;  // nullopt only for (0,1)
};

/// Every canonical ratio divisible with at most levels() cuts, each with its
/// exact cut count f and one decomposition into children of count f - 1 or
/// less (max exactly f - 1). Entries are stored in level order.
class LevelTable {
 public:
  LevelTable();

  std::size_t levels() const noexcept { return level_end_.size() - 1; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const LevelEntry> entries() const noexcept { return entries_; }

  /// Entries first reached at level n (A_n minus A_{n-1}).
  std::span<const LevelEntry> level(std::size_t n) const;

  /// Entries of A_n.
  std::span<const LevelEntry> up_to(std::size_t n) const;

  const LevelEntry* find(const CanonicalKey& key) const;
  std::optional<std::size_t> f_value(const CanonicalKey& key) const;
  std::optional<std::pair<CanonicalKey, CanonicalKey>> children(const CanonicalKey& key) const;
  const LevelEntry& at(std::uint32_t index) const { return entries_.at(index); }

  BigInt max_sum(std::size_t n) const;

  /// Adds level levels()+1. Throws LevelBudgetExceeded, leaving the table at
  /// its completed levels, when the table would grow past max_entries.
  void extend(std::uint64_t max_entries);

  /// JSON-lines, one record per key in table order.
  void write_jsonl(std::ostream& os) const;
  static LevelTable read_jsonl(std::istream& is);

 private:
  void extend_small(std::uint64_t max_entries);
  void extend_big(std::uint64_t max_entries);
  void push(CanonicalKey key, std::size_t f, std::optional<Witness> witness);
  void rollback(std::size_t size);

  std::vector<LevelEntry> entries_;
  std::unordered_map<CanonicalKey, std::uint32_t, CanonicalKeyHash> index_;
  std::vector<std::size_t> level_end_;  // entries_[0, level_end_[n]) is A_n
};

class LevelBudgetExceeded : public Error {
 public:
  LevelBudgetExceeded(const std::string& what, LevelTable completed)
      : Error(what), completed_(std::move(completed)) {}
  const LevelTable& completed() const noexcept { return completed_; }

 private:
  LevelTable completed_;
};

inline constexpr std::uint64_t kDefaultMaxEntries = 10'000'000;

/// A_0 = {(0,1)}; A_{m+1} adds the canonical reduced products of every
/// realizable (op, x', y') with x, y in A_m over both orientations of each.
LevelTable level_sets(std::size_t n, std::uint64_t max_entries = kDefaultMaxEntries);

struct ExactResult {
  std::size_t f;
  ProtocolTree witness;
};

/// Smallest n <= n_max with canonical_key(r) in A_n, with a validated witness
/// of depth n. Grows the table on demand; budget errors propagate.
std::optional<ExactResult> f_exact(const Ratio& r, std::size_t n_max, LevelTable& table,
                                  std::uint64_t max_entries = kDefaultMaxEntries);
std::optional<ExactResult> f_exact(const Ratio& r, std::size_t n_max);

/// Tree for a ratio present in the table, rebuilt from its witnesses.
ProtocolTree witness_tree(const Ratio& r, const LevelTable& table);

using ChildPair = std::pair<Ratio, Ratio>;

/// All lowest-terms pairs (x, y) with star(op, x, y) == scale * parent
/// exactly. Pairs whose sums exceed max_child_sum are skipped when a cap is
/// given. Leaf parents ((1,0), (0,1)) yield nothing. The result may contain
/// pairs that are not realizable; see realizable().
std::vector<ChildPair> invert_product(const Ratio& parent, OperatorId op, const BigInt& scale,
                                      const std::optional<BigInt>& max_child_sum = std::nullopt);

struct SearchBudget {
  std::size_t max_depth = 6;
  std::uint64_t max_nodes = 10'000'000;
  std::uint64_t max_scale = 64;
};

enum class SearchOutcome {
  found,
  exhausted,    // no witness up to max_depth among decompositions within max_scale
  node_budget,  // stopped by max_nodes
};

struct SearchReport {
  SearchOutcome outcome = SearchOutcome::exhausted;
  std::optional<ProtocolTree> witness;
  std::size_t depth = 0;         // witness depth when found
  std::size_t proven_above = 0;  // every depth below this was ruled out
  // Every depth below this is impossible outright: by the sum bound, or by
  // the shallow table for depths within its levels. Never above proven_above.
  std::size_t exact_above = 0;
  std::uint64_t nodes = 0;
  std::uint64_t max_scale = 0;

  /// Human-readable status, including the max_scale caveat for any claim
  /// that a depth is impossible.
  std::string summary(const Ratio& r) const;
};

/// Iterative deepening from the lower bound, inverting each node under all
/// operators at scales 1..max_scale and pruning children whose sum exceeds
/// the bound for the remaining depth. With a shallow table, depths up to its
/// level count are answered exactly from the table.
SearchReport search_witness(const Ratio& r, const SearchBudget& budget, const LevelTable* shallow = nullptr);

}  // namespace ucake
