#include "ucake/solver.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ucake/bounds.hpp"

namespace ucake {

namespace {

struct SmallKey {
  std::uint64_t lo;
  std::uint64_t hi;
  friend bool operator==(const SmallKey&, const SmallKey&) = default;
};

struct SmallKeyHash {
  std::size_t operator()(const SmallKey& k) const noexcept {
    std::uint64_t h = k.lo * 0x9e3779b97f4a7c15ULL;
    h ^= k.hi + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Fast path bound: with every sum <= 2^31, every raw product component is
// below 2 * 2^31 * 2^31 = 2^63.
constexpr std::uint64_t kSmallSumLimit = std::uint64_t{1} << 31;

bool realizable_small(OperatorId op, SmallKey x, SmallKey y) {
  switch (op) {
    case OperatorId::op1:
      return x.hi * y.lo > x.lo * y.hi;
    case OperatorId::op2:
      return x.lo > 0 && y.lo > 0;
    case OperatorId::op3:
      return x.hi > 0 && y.hi > 0;
  }
  return false;
}

// Components named lo/hi here are just (a, b) of an oriented ratio.
SmallKey star_small(OperatorId op, SmallKey x, SmallKey y) {
  switch (op) {
    case OperatorId::op1:
      return {(x.lo + x.hi) * y.lo, (y.lo + y.hi) * x.hi};
    case OperatorId::op2:
      return {x.lo * y.lo, x.lo * y.lo + y.hi * x.lo + y.lo * x.hi};
    case OperatorId::op3:
      return {x.lo * y.hi + x.hi * y.lo + y.hi * x.hi, y.hi * x.hi};
  }
  return {0, 0};
}

SmallKey canonical_small(SmallKey raw) {
  const std::uint64_t g = std::gcd(raw.lo, raw.hi);
  SmallKey out{raw.lo / g, raw.hi / g};
  if (out.lo > out.hi) std::swap(out.lo, out.hi);
  return out;
}

Ratio oriented_child(const CanonicalKey& key, bool swapped) {
  return swapped ? Ratio(key.hi, key.lo) : Ratio(key.lo, key.hi);
}

BigInt floor_div(const BigInt& n, const BigInt& d) {
  // d > 0
  BigInt q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

BigInt ceil_div(const BigInt& n, const BigInt& d) {
  BigInt q = n / d;
  if (n % d != 0 && n > 0) ++q;
  return q;
}

// Targets of an inversion together with their factorizations.
struct FactoredTarget {
  BigInt a;
  BigInt b;
  Factorization fa;
  Factorization fb;
};

void invert_op1(const FactoredTarget& t, const std::optional<BigInt>& cap, std::vector<ChildPair>& out) {
  // a = (a1 + b1) * a2, b = (a2 + b2) * b1
  if (t.a == 0 || t.b == 0) return;
  const std::vector<BigInt> da = divisors(t.fa);
  const std::vector<BigInt> db = divisors(t.fb);
  for (const BigInt& a2 : da) {
    const BigInt u = t.a / a2;  // a1 + b1
    if (cap && u > *cap) continue;
    for (const BigInt& b1 : db) {
      if (b1 > u) break;
      const BigInt v = t.b / b1;  // a2 + b2
      if (v < a2) break;
      if (cap && v > *cap) continue;
      BigInt a1 = u - b1;
      BigInt b2 = v - a2;
      if (gcd(a1, b1) != 1 || gcd(a2, b2) != 1) continue;
      out.emplace_back(Ratio(std::move(a1), b1), Ratio(a2, std::move(b2)));
    }
  }
}

void invert_op2(const FactoredTarget& t, const std::optional<BigInt>& cap, std::vector<ChildPair>& out) {
  // a = a1 * a2, b - a = a2 * b1 + a1 * b2
  if (t.a == 0 || t.b == 0 || t.b < t.a) return;
  const BigInt rest = t.b - t.a;
  for (const BigInt& a1 : divisors(t.fa)) {
    const BigInt a2 = t.a / a1;
    if (cap && (a1 > *cap || a2 > *cap)) continue;
    const ExtendedGcd eg = extended_gcd(a2, a1);
    if (rest % eg.g != 0) continue;
    const BigInt scale = rest / eg.g;
    const BigInt b1_0 = eg.x * scale;
    const BigInt b2_0 = eg.y * scale;
    const BigInt step1 = a1 / eg.g;  // b1 = b1_0 + t * step1
    const BigInt step2 = a2 / eg.g;  // b2 = b2_0 - t * step2
    BigInt t_lo = ceil_div(-b1_0, step1);
    BigInt t_hi = floor_div(b2_0, step2);
    if (cap) {
      t_hi = std::min(t_hi, floor_div(*cap - a1 - b1_0, step1));
      t_lo = std::max(t_lo, ceil_div(b2_0 - (*cap - a2), step2));
    }
    for (BigInt k = t_lo; k <= t_hi; ++k) {
      BigInt b1 = b1_0 + k * step1;
      BigInt b2 = b2_0 - k * step2;
      if (gcd(a1, b1) != 1 || gcd(a2, b2) != 1) continue;
      out.emplace_back(Ratio(a1, std::move(b1)), Ratio(a2, std::move(b2)));
    }
  }
}

void invert_factored(const FactoredTarget& t, OperatorId op, const std::optional<BigInt>& cap,
                     std::vector<ChildPair>& out) {
  switch (op) {
    case OperatorId::op1:
      invert_op1(t, cap, out);
      return;
    case OperatorId::op2:
      invert_op2(t, cap, out);
      return;
    case OperatorId::op3: {
      // op3(x, y) = swap(op2(swap x, swap y))
      const FactoredTarget mirrored{t.b, t.a, t.fb, t.fa};
      std::vector<ChildPair> tmp;
      invert_op2(mirrored, cap, tmp);
      for (auto& [x, y] : tmp) out.emplace_back(x.swapped(), y.swapped());
      return;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// LevelTable

LevelTable::LevelTable() {
  push(canonical_key(Ratio(0, 1)), 0, std::nullopt);
  level_end_.push_back(entries_.size());
}

std::span<const LevelEntry> LevelTable::level(std::size_t n) const {
  if (n > levels()) throw std::out_of_range("level " + std::to_string(n) + " not built");
  const std::size_t begin = n == 0 ? 0 : level_end_[n - 1];
  return std::span<const LevelEntry>(entries_).subspan(begin, level_end_[n] - begin);
}

std::span<const LevelEntry> LevelTable::up_to(std::size_t n) const {
  if (n > levels()) throw std::out_of_range("level " + std::to_string(n) + " not built");
  return std::span<const LevelEntry>(entries_).first(level_end_[n]);
}

const LevelEntry* LevelTable::find(const CanonicalKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::optional<std::size_t> LevelTable::f_value(const CanonicalKey& key) const {
  const LevelEntry* e = find(key);
  if (!e) return std::nullopt;
  return e->f;
}

std::optional<std::pair<CanonicalKey, CanonicalKey>> LevelTable::children(const CanonicalKey& key) const {
  const LevelEntry* e = find(key);
  if (!e || !e->witness) return std::nullopt;
  return std::pair{entries_[e->witness->children[0]].key, entries_[e->witness->children[1]].key};
}

BigInt LevelTable::max_sum(std::size_t n) const {
  BigInt best = 0;
  for (const LevelEntry& e : up_to(n)) best = std::max(best, BigInt(e.key.lo + e.key.hi));
  return best;
}

void LevelTable::push(CanonicalKey key, std::size_t f, std::optional<Witness> witness) {
  const auto idx = static_cast<std::uint32_t>(entries_.size());
  index_.emplace(key, idx);
  entries_.push_back({std::move(key), f, witness});
}

void LevelTable::rollback(std::size_t size) {
  while (entries_.size() > size) {
    index_.erase(entries_.back().key);
    entries_.pop_back();
  }
}

void LevelTable::extend(std::uint64_t max_entries) {
  if (max_sum(levels()) <= kSmallSumLimit) {
    extend_small(max_entries);
  } else {
    extend_big(max_entries);
  }
}

void LevelTable::extend_small(std::uint64_t max_entries) {
  const std::size_t m = levels();
  const std::size_t end = level_end_[m];
  const std::size_t fresh = m == 0 ? 0 : level_end_[m - 1];
  const std::size_t start_size = entries_.size();

  std::vector<SmallKey> current;
  current.reserve(end);
  std::unordered_set<SmallKey, SmallKeyHash> seen;
  seen.reserve(end * 8);
  for (std::size_t i = 0; i < end; ++i) {
    const SmallKey k{entries_[i].key.lo.convert_to<std::uint64_t>(), entries_[i].key.hi.convert_to<std::uint64_t>()};
    current.push_back(k);
    seen.insert(k);
  }

  for (std::size_t i = 0; i < end; ++i) {
    for (std::size_t j = 0; j < end; ++j) {
      // Pairs from older levels were all combined when level m was built.
      if (i < fresh && j < fresh) continue;
      for (bool sx : {false, true}) {
        const SmallKey x = sx ? SmallKey{current[i].hi, current[i].lo} : current[i];
        for (bool sy : {false, true}) {
          const SmallKey y = sy ? SmallKey{current[j].hi, current[j].lo} : current[j];
          for (OperatorId op : kAllOperators) {
            if (!realizable_small(op, x, y)) continue;
            const SmallKey key = canonical_small(star_small(op, x, y));
            if (!seen.insert(key).second) continue;
            push({BigInt(key.lo), BigInt(key.hi)}, m + 1,
                 Witness{op, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}, {sx, sy}});
            if (entries_.size() > max_entries) {
              rollback(start_size);
              throw LevelBudgetExceeded("level " + std::to_string(m + 1) + " exceeds " +
                                            std::to_string(max_entries) + " entries",
                                        *this);
            }
          }
        }
      }
    }
  }
  level_end_.push_back(entries_.size());
}

void LevelTable::extend_big(std::uint64_t max_entries) {
  const std::size_t m = levels();
  const std::size_t end = level_end_[m];
  const std::size_t fresh = m == 0 ? 0 : level_end_[m - 1];
  const std::size_t start_size = entries_.size();

  for (std::size_t i = 0; i < end; ++i) {
    for (std::size_t j = 0; j < end; ++j) {
      if (i < fresh && j < fresh) continue;
      for (bool sx : {false, true}) {
        const Ratio x = oriented_child(entries_[i].key, sx);
        for (bool sy : {false, true}) {
          const Ratio y = oriented_child(entries_[j].key, sy);
          for (OperatorId op : kAllOperators) {
            if (!realizable(op, x, y)) continue;
            CanonicalKey key = canonical_key(star(op, x, y));
            if (index_.contains(key)) continue;
            push(std::move(key), m + 1,
                 Witness{op, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}, {sx, sy}});
            if (entries_.size() > max_entries) {
              rollback(start_size);
              throw LevelBudgetExceeded("level " + std::to_string(m + 1) + " exceeds " +
                                            std::to_string(max_entries) + " entries",
                                        *this);
            }
          }
        }
      }
    }
  }
  level_end_.push_back(entries_.size());
}

void LevelTable::write_jsonl(std::ostream& os) const {
  for (const LevelEntry& e : entries_) {
    nlohmann::ordered_json j;
    j["key"] = key_to_json(e.key);
    j["f"] = e.f;
    if (e.witness) {
      j["op"] = to_string(e.witness->op);
      j["children"] = nlohmann::ordered_json::array(
          {key_to_json(entries_[e.witness->children[0]].key), key_to_json(entries_[e.witness->children[1]].key)});
      j["swap"] = nlohmann::ordered_json::array({e.witness->swapped[0], e.witness->swapped[1]});
    } else {
      j["op"] = nullptr;
      j["children"] = nullptr;
      j["swap"] = nullptr;
    }
    os << j.dump() << '\n';
  }
}

LevelTable LevelTable::read_jsonl(std::istream& is) {
  struct Record {
    CanonicalKey key;
    std::size_t f;
    std::optional<std::tuple<OperatorId, CanonicalKey, CanonicalKey, bool, bool>> witness;
  };
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Record rec{key_from_json(j.at("key")), j.at("f").get<std::size_t>(), std::nullopt};
      if (!j.at("op").is_null()) {
        const auto& ch = j.at("children");
        const auto& sw = j.at("swap");
        rec.witness = std::tuple{operator_from_string(j.at("op").get<std::string>()), key_from_json(ch.at(0)),
                                 key_from_json(ch.at(1)), sw.at(0).get<bool>(), sw.at(1).get<bool>()};
      }
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("level table line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const Record& l, const Record& r) { return l.f < r.f; });

  LevelTable table;
  if (records.empty() || records.front().key != table.entries_.front().key || records.front().f != 0 ||
      records.front().witness) {
    throw ParseError("level table must start with the (0,1) leaf at f = 0");
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    Record& rec = records[i];
    if (!rec.witness) throw ParseError("entry " + to_string(rec.key) + " has no witness");
    if (rec.f == 0) throw ParseError("only (0,1) may have f = 0");
    while (rec.f > table.levels() + 1) {
      if (table.entries_.size() == table.level_end_.back()) {
        throw ParseError("level " + std::to_string(table.levels() + 1) + " is missing");
      }
      table.level_end_.push_back(table.entries_.size());
    }
    if (table.index_.contains(rec.key)) throw ParseError("duplicate key " + to_string(rec.key));
    const auto& [op, k1, k2, s1, s2] = *rec.witness;
    const LevelEntry* c1 = table.find(k1);
    const LevelEntry* c2 = table.find(k2);
    if (!c1 || !c2) throw ParseError("children of " + to_string(rec.key) + " are not in earlier levels");
    const Ratio x = oriented_child(k1, s1);
    const Ratio y = oriented_child(k2, s2);
    if (!realizable(op, x, y) || canonical_key(star(op, x, y)) != rec.key || std::max(c1->f, c2->f) + 1 != rec.f) {
      throw ParseError("witness of " + to_string(rec.key) + " does not reproduce it");
    }
    const auto i1 = table.index_.at(k1);
    const auto i2 = table.index_.at(k2);
    table.push(rec.key, rec.f, Witness{op, {i1, i2}, {s1, s2}});
  }
  if (table.entries_.size() > table.level_end_.back()) table.level_end_.push_back(table.entries_.size());
  return table;
}

LevelTable level_sets(std::size_t n, std::uint64_t max_entries) {
  LevelTable table;
  while (table.levels() < n) table.extend(max_entries);
  return table;
}

ProtocolTree witness_tree(const Ratio& r, const LevelTable& table) {
  return assemble_tree(r, [&table](const CanonicalKey& key) { return table.children(key); });
}

std::optional<ExactResult> f_exact(const Ratio& r, std::size_t n_max, LevelTable& table, std::uint64_t max_entries) {
  const CanonicalKey key = canonical_key(r);
  if (lower_bound_int(r) > n_max) return std::nullopt;
  while (!table.f_value(key) && table.levels() < n_max) table.extend(max_entries);
  const auto f = table.f_value(key);
  if (!f || *f > n_max) return std::nullopt;
  ProtocolTree tree = witness_tree(r, table);
  if (auto report = validate_tree(tree); !report) {
    throw std::logic_error("assembled witness for " + to_string(r) + " is invalid at " + report.violation->path +
                           ": " + report.violation->reason);
  }
  if (worst_case_depth(tree) != *f) throw std::logic_error("witness depth differs from f for " + to_string(r));
  return ExactResult{*f, std::move(tree)};
}

std::optional<ExactResult> f_exact(const Ratio& r, std::size_t n_max) {
  LevelTable table;
  return f_exact(r, n_max, table);
}

// ---------------------------------------------------------------------------
// Inversion and top-down search

std::vector<ChildPair> invert_product(const Ratio& parent, OperatorId op, const BigInt& scale,
                                      const std::optional<BigInt>& max_child_sum) {
  if (scale <= 0) throw std::invalid_argument("scale must be positive");
  std::vector<ChildPair> out;
  if (parent.is_leaf()) return out;
  FactoredTarget t{parent.a() * scale, parent.b() * scale, {}, {}};
  t.fa = factorize(t.a);
  t.fb = factorize(t.b);
  invert_factored(t, op, max_child_sum, out);
  return out;
}

namespace {

struct NodeBudgetHit {};

class WitnessSearch {
 public:
  WitnessSearch(const SearchBudget& budget, const LevelTable* shallow) : budget_(budget), shallow_(shallow) {}

  bool achievable(const CanonicalKey& key, std::size_t depth) {
    if (key.lo == 0) return true;
    Memo& memo = memo_[key];
    if (memo.witness_depth && *memo.witness_depth <= depth) return true;
    if (memo.ruled_out && *memo.ruled_out >= depth) return false;
    if (depth == 0) return rule_out(key, depth);

    const Ratio parent = key.ratio();
    if (lower_bound_int(parent) > depth) return rule_out(key, depth);
    if (shallow_ && depth <= shallow_->levels()) {
      const LevelEntry* e = shallow_->find(key);
      if (!e || e->f > depth) return rule_out(key, depth);
      return record(key, e->f, *shallow_->children(key));
    }
    if (shallow_) {
      if (const LevelEntry* e = shallow_->find(key)) return record(key, e->f, *shallow_->children(key));
    }

    charge();
    const std::optional<BigInt> cap = sum_bound(depth - 1);
    const Factorization& fa = factors(key.lo);
    const Factorization& fb = factors(key.hi);
    std::vector<ChildPair> pairs;
    for (OperatorId op : kAllOperators) {
      for (std::uint64_t m = 1; m <= budget_.max_scale; ++m) {
        const BigInt scale(m);
        const Factorization& fm = factors(scale);
        FactoredTarget t{key.lo * scale, key.hi * scale, merge_factorizations(fa, fm), merge_factorizations(fb, fm)};
        pairs.clear();
        invert_factored(t, op, cap, pairs);
        for (const auto& [x, y] : pairs) {
          if (!realizable(op, x, y)) continue;
          charge();
          const CanonicalKey k1 = canonical_key(x);
          const CanonicalKey k2 = canonical_key(y);
          if (achievable(k1, depth - 1) && achievable(k2, depth - 1)) {
            const std::size_t d = 1 + std::max(witness_depth(k1), witness_depth(k2));
            return record(key, d, {k1, k2});
          }
        }
      }
    }
    return rule_out(key, depth);
  }

  std::optional<std::pair<CanonicalKey, CanonicalKey>> children(const CanonicalKey& key) const {
    auto it = memo_.find(key);
    if (it == memo_.end()) return std::nullopt;
    return it->second.children;
  }

  std::uint64_t nodes() const noexcept { return nodes_; }

 private:
  struct Memo {
    std::optional<std::size_t> witness_depth;
    std::optional<std::size_t> ruled_out;  // no witness with this many cuts or fewer
    std::optional<std::pair<CanonicalKey, CanonicalKey>> children;
  };

  void charge() {
    if (++nodes_ > budget_.max_nodes) throw NodeBudgetHit{};
  }

  bool rule_out(const CanonicalKey& key, std::size_t depth) {
    Memo& memo = memo_[key];
    if (!memo.ruled_out || *memo.ruled_out < depth) memo.ruled_out = depth;
    return false;
  }

  bool record(const CanonicalKey& key, std::size_t depth, std::pair<CanonicalKey, CanonicalKey> children) {
    Memo& memo = memo_[key];
    if (!memo.witness_depth || depth < *memo.witness_depth) {
      memo.witness_depth = depth;
      memo.children = std::move(children);
    }
    return true;
  }

  std::size_t witness_depth(const CanonicalKey& key) const {
    if (key.lo == 0) return 0;
    return *memo_.at(key).witness_depth;
  }

  const Factorization& factors(const BigInt& n) {
    auto it = factor_cache_.find(n);
    if (it == factor_cache_.end()) it = factor_cache_.emplace(n, factorize(n)).first;
    return it->second;
  }

  SearchBudget budget_;
  const LevelTable* shallow_;
  std::uint64_t nodes_ = 0;
  std::unordered_map<CanonicalKey, Memo, CanonicalKeyHash> memo_;
  std::unordered_map<BigInt, Factorization> factor_cache_;
};

}  // namespace

SearchReport search_witness(const Ratio& r, const SearchBudget& budget, const LevelTable* shallow) {
  if (budget.max_nodes == 0 || budget.max_scale == 0) throw std::invalid_argument("search budget must be positive");
  SearchReport report;
  report.outcome = SearchOutcome::exhausted;
  report.max_scale = budget.max_scale;
  const CanonicalKey key = canonical_key(r);
  const std::size_t lower = lower_bound_int(r);
  report.proven_above = lower;
  report.exact_above = lower;
  WitnessSearch search(budget, shallow);
  for (std::size_t depth = lower; depth <= budget.max_depth; ++depth) {
    bool found = false;
    try {
      found = search.achievable(key, depth);
    } catch (const NodeBudgetHit&) {
      report.outcome = SearchOutcome::node_budget;
      report.nodes = search.nodes();
      return report;
    }
    if (found) {
      // Nodes answered by the shallow table keep their decompositions there.
      ProtocolTree tree = assemble_tree(r, [&](const CanonicalKey& k) {
        auto children = search.children(k);
        if (!children && shallow) children = shallow->children(k);
        return children;
      });
      if (auto v = validate_tree(tree); !v) {
        throw std::logic_error("search witness for " + to_string(r) + " is invalid at " + v.violation->path + ": " +
                               v.violation->reason);
      }
      report.outcome = SearchOutcome::found;
      report.depth = worst_case_depth(tree);
      report.witness = std::move(tree);
      report.nodes = search.nodes();
      return report;
    }
    report.proven_above = depth + 1;
    if (shallow && depth <= shallow->levels() && report.exact_above == depth) report.exact_above = depth + 1;
  }
  report.nodes = search.nodes();
  return report;
}

std::string SearchReport::summary(const Ratio& r) const {
  std::ostringstream os;
  switch (outcome) {
    case SearchOutcome::found:
      os << "witness for " << to_string(r) << " with " << depth << " cuts";
      break;
    case SearchOutcome::exhausted:
      os << "no witness for " << to_string(r) << " within the depth limit";
      break;
    case SearchOutcome::node_budget:
      os << "node budget exhausted for " << to_string(r) << " after " << nodes << " nodes";
      break;
  }
  if (exact_above > 0) os << "; no protocol with fewer than " << exact_above << " cuts exists";
  if (proven_above > exact_above) {
    os << "; none with fewer than " << proven_above << " cuts among decompositions of scale <= " << max_scale
       << " (a larger scale could still admit one)";
  }
  return os.str();
}

}  // namespace ucake
