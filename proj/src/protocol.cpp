#include "ucake/protocol.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "ucake/error.hpp"

namespace ucake {

std::string to_string(Player p) { return p == Player::alice ? "A" : "B"; }

namespace {

Player player_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_string()) throw ParseError(std::string("field '") + field + "' must be a string");
  const auto text = j.get<std::string>();
  if (text == "A" || text == "Alice") return Player::alice;
  if (text == "B" || text == "Bob") return Player::bob;
  throw ParseError(std::string("field '") + field + "' must be \"A\" or \"B\", got '" + text + "'");
}

NodePtr node_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("protocol node must be an object");
  if (!j.contains("ratio") || !j.contains("kind")) throw ParseError("protocol node needs 'ratio' and 'kind'");
  Ratio ratio = ratio_from_json(j.at("ratio"));
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    if (!j.contains("winner")) throw ParseError("leaf node needs 'winner'");
    return std::make_shared<const ProtocolNode>(
        ProtocolNode{std::move(ratio), LeafStep{player_from_json(j.at("winner"), "winner")}});
  }
  if (kind == "cut") {
    for (const char* field : {"cutter", "cutoff", "take", "keep"}) {
      if (!j.contains(field)) throw ParseError(std::string("cut node needs '") + field + "'");
    }
    return make_cut(std::move(ratio), player_from_json(j.at("cutter"), "cutter"),
                    Cutoff::parse(j.at("cutoff").get<std::string>()), node_from_json(j.at("take")),
                    node_from_json(j.at("keep")));
  }
  throw ParseError("unknown node kind '" + kind + "'");
}

class Validator {
 public:
  std::optional<Violation> visit(const ProtocolNode& node, const std::string& path) {
    if (!seen_.insert(&node).second) return std::nullopt;
    const Ratio& r = node.ratio;
    if (!r.is_lowest_terms()) return Violation{path, to_string(r) + " is not in lowest terms"};

    if (node.is_leaf()) {
      if (sum(r) != 1) return Violation{path, "leaf ratio " + to_string(r) + " is not (1,0) or (0,1)"};
      const Player expected = r.a() == 1 ? Player::alice : Player::bob;
      if (node.leaf().winner != expected) {
        return Violation{path, "leaf " + to_string(r) + " must allocate to " + to_string(expected)};
      }
      return std::nullopt;
    }

    const CutStep& cut = node.cut();
    if (cut.cutter != lesser_entitled(r)) {
      return Violation{path, "cutter at " + to_string(r) + " must be the lesser-entitled player " +
                                 to_string(lesser_entitled(r))};
    }
    std::optional<CutOutcome> outcome;
    try {
      outcome = split(r, cut.cutoff);
    } catch (const InvalidCutoffError&) {
      return Violation{path, "cutoff " + to_string(cut.cutoff) + " is not usable on " + to_string(r)};
    }
    const auto check_branch = [&](const NodePtr& child, const CutChild& expected,
                                  const char* branch) -> std::optional<Violation> {
      if (canonical_key(child->ratio) != canonical_key(expected.reduced)) {
        return Violation{path + "/" + branch, std::string(branch) + " branch of " + to_string(r) + " at " +
                                                  to_string(cut.cutoff) + " must be " +
                                                  to_string(canonical_key(expected.reduced)) + ", found " +
                                                  to_string(child->ratio)};
      }
      return visit(*child, path + "/" + branch);
    };
    if (auto v = check_branch(cut.take, outcome->take, "take")) return v;
    return check_branch(cut.keep, outcome->keep, "keep");
  }

 private:
  std::unordered_set<const ProtocolNode*> seen_;
};

std::size_t depth_of(const ProtocolNode& node, std::unordered_map<const ProtocolNode*, std::size_t>& memo) {
  if (node.is_leaf()) return 0;
  if (auto it = memo.find(&node); it != memo.end()) return it->second;
  const CutStep& cut = node.cut();
  const std::size_t d = 1 + std::max(depth_of(*cut.take, memo), depth_of(*cut.keep, memo));
  memo.emplace(&node, d);
  return d;
}

std::size_t size_of(const ProtocolNode& node, std::unordered_map<const ProtocolNode*, std::size_t>& memo) {
  if (node.is_leaf()) return 1;
  if (auto it = memo.find(&node); it != memo.end()) return it->second;
  const CutStep& cut = node.cut();
  const std::size_t n = 1 + size_of(*cut.take, memo) + size_of(*cut.keep, memo);
  memo.emplace(&node, n);
  return n;
}

std::string dot_label(const ProtocolNode& node) {
  if (node.is_leaf()) return to_string(node.ratio) + " " + to_string(node.leaf().winner);
  return to_string(node.ratio) + " cut " + to_string(node.cut().cutoff);
}

std::size_t write_dot(const ProtocolNode& node, std::size_t& next_id, std::ostream& os) {
  const std::size_t id = next_id++;
  os << "  n" << id << " [label=\"" << dot_label(node) << "\"];\n";
  if (node.is_leaf()) return id;
  const CutStep& cut = node.cut();
  const std::size_t take = write_dot(*cut.take, next_id, os);
  os << "  n" << id << " -> n" << take << " [label=\"take >" << to_string(cut.cutoff) << "\"];\n";
  const std::size_t keep = write_dot(*cut.keep, next_id, os);
  os << "  n" << id << " -> n" << keep << " [label=\"keep <=" << to_string(cut.cutoff) << "\"];\n";
  return id;
}

}  // namespace

NodePtr make_leaf(const Ratio& ratio) {
  const Ratio r = reduce(ratio);
  if (sum(r) != 1) throw std::invalid_argument("leaf ratio must be (1,0) or (0,1), got " + to_string(ratio));
  return std::make_shared<const ProtocolNode>(ProtocolNode{r, LeafStep{r.a() == 1 ? Player::alice : Player::bob}});
}

NodePtr make_cut(Ratio ratio, Player cutter, Cutoff cutoff, NodePtr take, NodePtr keep) {
  if (!take || !keep) throw std::invalid_argument("cut node needs both branches");
  return std::make_shared<const ProtocolNode>(
      ProtocolNode{std::move(ratio), CutStep{cutter, std::move(cutoff), std::move(take), std::move(keep)}});
}

ProtocolTree::ProtocolTree(Ratio declared, NodePtr root) : declared_(std::move(declared)), root_(std::move(root)) {
  if (!root_) throw std::invalid_argument("protocol tree needs a root");
  if (root_->ratio != reduce(declared_)) {
    throw std::invalid_argument("root ratio " + to_string(root_->ratio) + " does not match declared ratio " +
                                to_string(declared_));
  }
}

ProtocolTree build_near_half(const Ratio& r) {
  std::unordered_map<Ratio, NodePtr, RatioHash> memo;
  const auto build = [&memo](const auto& self, const Ratio& node) -> NodePtr {
    if (auto it = memo.find(node); it != memo.end()) return it->second;
    NodePtr out;
    const BigInt s = sum(node);
    if (s == 1) {
      out = make_leaf(node);
    } else {
      Cutoff cutoff(BigInt(s / 2), s);
      CutOutcome cut = split(node, cutoff);
      NodePtr take = self(self, cut.take.reduced);
      NodePtr keep = self(self, cut.keep.reduced);
      out = make_cut(node, cut.cutter, std::move(cutoff), std::move(take), std::move(keep));
    }
    memo.emplace(node, out);
    return out;
  };
  return ProtocolTree(r, build(build, reduce(r)));
}

ProtocolTree assemble_tree(const Ratio& r, const DecompositionLookup& lookup) {
  std::unordered_map<Ratio, NodePtr, RatioHash> memo;
  const auto build = [&](const auto& self, const Ratio& node) -> NodePtr {
    if (auto it = memo.find(node); it != memo.end()) return it->second;
    NodePtr out;
    if (node.is_leaf()) {
      out = make_leaf(node);
    } else {
      const auto children = lookup(canonical_key(node));
      if (!children) throw std::invalid_argument("no decomposition recorded for " + to_string(node));
      RecoveredCut recovered = recover_cutoff(node, children->first.ratio(), children->second.ratio());
      CutOutcome cut = split(node, recovered.cutoff);
      NodePtr take = self(self, cut.take.reduced);
      NodePtr keep = self(self, cut.keep.reduced);
      out = make_cut(node, cut.cutter, std::move(recovered.cutoff), std::move(take), std::move(keep));
    }
    memo.emplace(node, out);
    return out;
  };
  return ProtocolTree(r, build(build, reduce(r)));
}

ValidationReport validate_tree(const ProtocolTree& tree) {
  Validator validator;
  return {validator.visit(tree.root(), "root")};
}

std::size_t worst_case_depth(const ProtocolTree& tree) {
  std::unordered_map<const ProtocolNode*, std::size_t> memo;
  return depth_of(tree.root(), memo);
}

std::size_t expanded_size(const ProtocolTree& tree) {
  std::unordered_map<const ProtocolNode*, std::size_t> memo;
  return size_of(tree.root(), memo);
}

nlohmann::json node_to_json(const ProtocolNode& node) {
  nlohmann::json j;
  j["ratio"] = ratio_to_json(node.ratio);
  if (node.is_leaf()) {
    j["kind"] = "leaf";
    j["winner"] = to_string(node.leaf().winner);
    return j;
  }
  const CutStep& cut = node.cut();
  j["kind"] = "cut";
  j["cutter"] = to_string(cut.cutter);
  j["cutoff"] = to_string(cut.cutoff);
  j["take"] = node_to_json(*cut.take);
  j["keep"] = node_to_json(*cut.keep);
  return j;
}

nlohmann::json tree_to_json(const ProtocolTree& tree) {
  return {{"declared_ratio", ratio_to_json(tree.declared_ratio())}, {"root", node_to_json(tree.root())}};
}

std::string export_tree(const ProtocolTree& tree, ExportFormat format) {
  if (format == ExportFormat::json) return tree_to_json(tree).dump(2) + "\n";
  std::ostringstream os;
  os << "digraph protocol {\n  node [shape=box];\n";
  std::size_t next_id = 0;
  write_dot(tree.root(), next_id, os);
  os << "}\n";
  return os.str();
}

ProtocolTree tree_from_json(const nlohmann::json& j) {
  if (j.is_object() && j.contains("root")) {
    NodePtr root = node_from_json(j.at("root"));
    Ratio declared = j.contains("declared_ratio") ? ratio_from_json(j.at("declared_ratio")) : root->ratio;
    return ProtocolTree(std::move(declared), std::move(root));
  }
  NodePtr root = node_from_json(j);
  Ratio declared = root->ratio;
  return ProtocolTree(std::move(declared), std::move(root));
}

ProtocolTree parse_tree(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tree JSON: ") + e.what());
  }
  return tree_from_json(j);
}

bool same_tree(const ProtocolNode& lhs, const ProtocolNode& rhs) {
  if (&lhs == &rhs) return true;
  if (lhs.ratio != rhs.ratio || lhs.is_leaf() != rhs.is_leaf()) return false;
  if (lhs.is_leaf()) return lhs.leaf().winner == rhs.leaf().winner;
  const CutStep& l = lhs.cut();
  const CutStep& r = rhs.cut();
  return l.cutter == r.cutter && l.cutoff == r.cutoff && same_tree(*l.take, *r.take) && same_tree(*l.keep, *r.keep);
}

bool same_tree(const ProtocolTree& lhs, const ProtocolTree& rhs) {
  return lhs.declared_ratio() == rhs.declared_ratio() && same_tree(lhs.root(), rhs.root());
}

}  // namespace ucake
