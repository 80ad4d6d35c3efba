#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include <nlohmann/json.hpp>

#include "ucake/combinators.hpp"
#include "ucake/ratio.hpp"

namespace ucake {

struct ProtocolNode;
using NodePtr = std::shared_ptr<const ProtocolNode>;

struct LeafStep {
  Player winner;
};

struct CutStep {
  Player cutter;
  Cutoff cutoff;
  NodePtr take;  // non-cutter values the cut piece strictly above the cutoff
  NodePtr keep;  // otherwise
};

/// One step of a protocol. Nodes are immutable and may be shared between
/// several parents, so a tree is stored as a DAG and expanded on export.
struct ProtocolNode {
  Ratio ratio;  // lowest terms, (Alice, Bob)
  std::variant<LeafStep, CutStep> step;

  bool is_leaf() const noexcept { return std::holds_alternative<LeafStep>(step); }
  const LeafStep& leaf() const { return std::get<LeafStep>(step); }
  const CutStep& cut() const { return std::get<CutStep>(step); }
};

/// Leaf for (1,0) or (0,1); the winner follows from the ratio.
NodePtr make_leaf(const Ratio& ratio);
NodePtr make_cut(Ratio ratio, Player cutter, Cutoff cutoff, NodePtr take, NodePtr keep);

class ProtocolTree {
 public:
  /// Throws std::invalid_argument unless root->ratio == reduce(declared).
  ProtocolTree(Ratio declared, NodePtr root);

  const Ratio& declared_ratio() const noexcept { return declared_; }
  const ProtocolNode& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }

 private:
  Ratio declared_;
  NodePtr root_;
};

/// Cut-near-halves: at (a,b) oriented a <= b with s = a+b, cut t/s for
/// t = floor(s/2); small case when t <= a, between case otherwise.
ProtocolTree build_near_half(const Ratio& r);

/// Child keys of the single cut that divides a ratio; nullopt for leaves.
using DecompositionLookup =
    std::function<std::optional<std::pair<CanonicalKey, CanonicalKey>>(const CanonicalKey&)>;

/// Tree for r realising a decomposition per key: each cutoff comes from
/// recover_cutoff and each branch from splitting the actual (oriented) node
/// ratio, so stored ratios keep the true Alice/Bob orientation. Throws
/// NotADecompositionError when a lookup has no matching cut and
/// std::invalid_argument when a non-leaf key has no decomposition.
ProtocolTree assemble_tree(const Ratio& r, const DecompositionLookup& lookup);

struct Violation {
  std::string path;  // "root", "root/take", "root/take/keep", ...
  std::string reason;
};

struct ValidationReport {
  std::optional<Violation> violation;

  bool valid() const noexcept { return !violation.has_value(); }
  explicit operator bool() const noexcept { return valid(); }
};

/// Checks every node against the cut relations: lowest-terms ratios, leaves
/// exactly (1,0)/(0,1) with the matching winner, the lesser-entitled player
/// cutting, a usable cutoff, and each branch's canonical key equal to the
/// matching child of the cut. Reports the first violation in preorder.
ValidationReport validate_tree(const ProtocolTree& tree);

std::size_t worst_case_depth(const ProtocolTree& tree);

/// Number of nodes in the expanded tree (shared subtrees counted per use).
std::size_t expanded_size(const ProtocolTree& tree);

enum class ExportFormat { json, dot };

std::string export_tree(const ProtocolTree& tree, ExportFormat format);

nlohmann::json tree_to_json(const ProtocolTree& tree);
nlohmann::json node_to_json(const ProtocolNode& node);

/// Accepts {"declared_ratio": ..., "root": node} or a bare node.
ProtocolTree tree_from_json(const nlohmann::json& j);
ProtocolTree parse_tree(const std::string& text);

/// Structural equality of the expanded trees.
bool same_tree(const ProtocolNode& lhs, const ProtocolNode& rhs);
bool same_tree(const ProtocolTree& lhs, const ProtocolTree& rhs);

std::string to_string(Player p);  // "A" or "B"

}  // namespace ucake
