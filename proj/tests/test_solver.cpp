#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "role_oracle.hpp"
#include "ucake/bounds.hpp"
#include "ucake/error.hpp"
#include "ucake/solver.hpp"

using namespace ucake;

namespace {

using KeyPair = std::pair<std::pair<BigInt, BigInt>, std::pair<BigInt, BigInt>>;

std::set<KeyPair> as_set(const std::vector<ChildPair>& pairs) {
  std::set<KeyPair> out;
  for (const auto& [x, y] : pairs) out.insert({{x.a(), x.b()}, {y.a(), y.b()}});
  return out;
}

// Every lowest-terms (x, y) with sums up to the limit whose raw product is
// exactly scale * parent.
std::set<KeyPair> brute_force_inverse(const Ratio& parent, OperatorId op, long long scale, long long max_sum) {
  std::vector<std::pair<long long, long long>> ratios;
  for (long long s = 1; s <= max_sum; ++s) {
    for (long long a = 0; a <= s; ++a) {
      if (std::gcd(a, s - a) == 1) ratios.emplace_back(a, s - a);
    }
  }
  const long long ta = parent.a().convert_to<long long>() * scale;
  const long long tb = parent.b().convert_to<long long>() * scale;
  std::set<KeyPair> out;
  for (const auto& [a1, b1] : ratios) {
    for (const auto& [a2, b2] : ratios) {
      long long pa = 0, pb = 0;
      switch (op) {
        case OperatorId::op1: pa = (a1 + b1) * a2; pb = (a2 + b2) * b1; break;
        case OperatorId::op2: pa = a1 * a2; pb = a1 * a2 + b2 * a1 + a2 * b1; break;
        case OperatorId::op3: pa = a1 * b2 + b1 * a2 + b2 * b1; pb = b2 * b1; break;
      }
      if (pa == ta && pb == tb) out.insert({{a1, b1}, {a2, b2}});
    }
  }
  return out;
}

LevelTable& shared_table() {
  static LevelTable table = level_sets(4);
  return table;
}

}  // namespace

TEST(LevelSets, SmallLevelsByHand) {
  const LevelTable t = level_sets(2);
  ASSERT_EQ(t.level(0).size(), 1u);
  EXPECT_EQ(t.level(0)[0].key, (CanonicalKey{0, 1}));
  ASSERT_EQ(t.up_to(1).size(), 2u);
  EXPECT_EQ(t.level(1)[0].key, (CanonicalKey{1, 1}));
  EXPECT_EQ(t.f_value(CanonicalKey{1, 3}), 2u);
  EXPECT_EQ(t.f_value(CanonicalKey{1, 2}), 2u);
  EXPECT_EQ(t.up_to(2).size(), 4u);
}

TEST(LevelSets, MonotoneAndBounded) {
  const LevelTable& t = shared_table();
  for (std::size_t n = 0; n <= t.levels(); ++n) {
    EXPECT_LE(t.max_sum(n), *sum_bound(n)) << n;
    if (n > 0) EXPECT_GT(t.up_to(n).size(), t.up_to(n - 1).size());
    for (const LevelEntry& e : t.level(n)) EXPECT_EQ(e.f, n);
  }
}

TEST(LevelSets, WitnessesReproduceEveryEntry) {
  const LevelTable& t = shared_table();
  for (const LevelEntry& e : t.entries()) {
    if (!e.witness) {
      EXPECT_EQ(e.key, (CanonicalKey{0, 1}));
      continue;
    }
    const LevelEntry& c1 = t.at(e.witness->children[0]);
    const LevelEntry& c2 = t.at(e.witness->children[1]);
    EXPECT_EQ(std::max(c1.f, c2.f) + 1, e.f);
    const Ratio x = e.witness->swapped[0] ? c1.key.ratio().swapped() : c1.key.ratio();
    const Ratio y = e.witness->swapped[1] ? c2.key.ratio().swapped() : c2.key.ratio();
    EXPECT_TRUE(realizable(e.witness->op, x, y));
    EXPECT_EQ(canonical_key(star(e.witness->op, x, y)), e.key);
    EXPECT_LE(lower_bound_int(e.key.ratio()), e.f);
    EXPECT_LE(e.f, upper_bound_int(e.key.ratio()));
  }
}

TEST(LevelSets, MembershipMatchesRoleOracle) {
  // A_4 has largest sum 397, so this covers it completely.
  const LevelTable& t = shared_table();
  oracle::RoleOracle o;
  std::size_t in_table = 0;
  for (long long s = 1; s <= 400; ++s) {
    for (long long a = 0; 2 * a <= s; ++a) {
      if (std::gcd(a, s - a) != 1) continue;
      const auto expected = o.f(a, s - a, 4);
      const auto actual = t.f_value(CanonicalKey{a, s - a});
      ASSERT_EQ(actual.has_value(), expected.has_value()) << a << "," << s - a;
      if (actual) {
        EXPECT_EQ(static_cast<int>(*actual), *expected) << a << "," << s - a;
        ++in_table;
      }
    }
  }
  EXPECT_EQ(in_table, t.size());
}

TEST(LevelSets, BudgetKeepsCompletedLevels) {
  LevelTable t = level_sets(3);
  try {
    t.extend(100);
    FAIL() << "expected the budget to be exceeded";
  } catch (const LevelBudgetExceeded& e) {
    EXPECT_EQ(e.completed().levels(), 3u);
    EXPECT_EQ(e.completed().size(), 20u);
  }
  EXPECT_EQ(t.levels(), 3u);
  EXPECT_EQ(t.size(), 20u);
  EXPECT_THROW(level_sets(4, 100), LevelBudgetExceeded);
}

TEST(LevelSets, JsonLinesRoundTrip) {
  const LevelTable& t = shared_table();
  std::stringstream ss;
  t.write_jsonl(ss);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), R"({"key":["0","1"],"f":0,"op":null,"children":null,"swap":null})");
  std::istringstream in(text);
  const LevelTable back = LevelTable::read_jsonl(in);
  EXPECT_EQ(back.levels(), t.levels());
  EXPECT_EQ(back.size(), t.size());
  std::stringstream again;
  back.write_jsonl(again);
  EXPECT_EQ(again.str(), text);
}

TEST(LevelSets, JsonLinesRejectsTampering) {
  std::stringstream ss;
  level_sets(2).write_jsonl(ss);
  std::string text = ss.str();
  std::string wrong_f = text;
  wrong_f.replace(wrong_f.find(R"("key":["1","3"],"f":2)"), 21, R"("key":["1","3"],"f":1)");
  std::istringstream in1(wrong_f);
  EXPECT_THROW(LevelTable::read_jsonl(in1), ParseError);
  std::istringstream in2(text + "not json\n");
  EXPECT_THROW(LevelTable::read_jsonl(in2), ParseError);
  std::istringstream in3(text.substr(text.find('\n') + 1));
  EXPECT_THROW(LevelTable::read_jsonl(in3), ParseError);
}

TEST(Exact, Examples) {
  EXPECT_EQ(f_exact(Ratio(9, 8), 5)->f, 3u);
  EXPECT_EQ(f_exact(Ratio(1, 1), 5)->f, 1u);
  EXPECT_EQ(f_exact(Ratio(1, 0), 5)->f, 0u);
  EXPECT_EQ(f_exact(Ratio(1, 3), 5)->f, 2u);
  EXPECT_FALSE(f_exact(Ratio(1, 3), 1).has_value());
  EXPECT_FALSE(f_exact(Ratio(58470565, 72019008), 4).has_value());
}

TEST(Exact, WitnessesValidateAtExactDepth) {
  LevelTable& t = shared_table();
  for (long long s = 1; s <= 40; ++s) {
    for (long long a = 0; a <= s; ++a) {
      if (std::gcd(a, s - a) != 1) continue;
      const Ratio r(a, s - a);
      const auto result = f_exact(r, 4, t);
      if (!result) continue;
      EXPECT_TRUE(validate_tree(result->witness).valid()) << to_string(r);
      EXPECT_EQ(worst_case_depth(result->witness), result->f);
      EXPECT_EQ(result->witness.root().ratio, r);
    }
  }
}

TEST(Exact, NineEightWitnessCutsFiveSeventeenths) {
  const auto result = f_exact(Ratio(9, 8), 3);
  ASSERT_TRUE(result);
  const CutStep& root = result->witness.root().cut();
  EXPECT_EQ(root.cutoff, Cutoff(5, 17));
  std::set<std::pair<BigInt, BigInt>> keys;
  for (const NodePtr& child : {root.take, root.keep}) {
    const CanonicalKey k = canonical_key(child->ratio);
    keys.insert({k.lo, k.hi});
  }
  EXPECT_EQ(keys, (std::set<std::pair<BigInt, BigInt>>{{1, 2}, {1, 3}}));
}

TEST(Invert, Examples) {
  EXPECT_TRUE(as_set(invert_product(Ratio(9, 8), OperatorId::op1, 1)).contains({{1, 2}, {3, 1}}));
  EXPECT_TRUE(as_set(invert_product(Ratio(1, 3), OperatorId::op2, 1)).contains({{1, 1}, {1, 1}}));
  // a1*a2 = 1 and b1 + b2 = 0 leave only the two leaves.
  EXPECT_EQ(as_set(invert_product(Ratio(1, 1), OperatorId::op2, 1)), (std::set<KeyPair>{{{1, 0}, {1, 0}}}));
  EXPECT_TRUE(invert_product(Ratio(1, 0), OperatorId::op1, 1).empty());
  EXPECT_THROW(invert_product(Ratio(1, 2), OperatorId::op1, 0), std::invalid_argument);
}

TEST(Invert, MatchesBruteForce) {
  for (const Ratio& parent : {Ratio(9, 8), Ratio(1, 3), Ratio(3, 13), Ratio(5, 7), Ratio(2, 9), Ratio(11, 4)}) {
    for (OperatorId op : kAllOperators) {
      for (long long scale : {1, 2, 3, 6}) {
        // Children of a product with sum S have sums at most S + 1.
        const long long limit = static_cast<long long>(sum(parent).convert_to<long long>()) * scale + 1;
        EXPECT_EQ(as_set(invert_product(parent, op, BigInt(scale))), brute_force_inverse(parent, op, scale, limit))
            << to_string(parent) << " op" << to_string(op) << " scale " << scale;
      }
    }
  }
}

TEST(Invert, CapFiltersBySum) {
  const auto all = invert_product(Ratio(3, 13), OperatorId::op2, 4);
  const auto capped = invert_product(Ratio(3, 13), OperatorId::op2, 4, BigInt(8));
  std::set<KeyPair> expected;
  for (const auto& [x, y] : all) {
    if (sum(x) <= 8 && sum(y) <= 8) expected.insert({{x.a(), x.b()}, {y.a(), y.b()}});
  }
  EXPECT_EQ(as_set(capped), expected);
}

TEST(Search, Examples) {
  const SearchReport nine_eight = search_witness(Ratio(9, 8), SearchBudget{3, 1'000'000, 64});
  ASSERT_EQ(nine_eight.outcome, SearchOutcome::found);
  EXPECT_EQ(nine_eight.depth, 3u);
  EXPECT_TRUE(validate_tree(*nine_eight.witness).valid());

  const SearchReport one_one = search_witness(Ratio(1, 1), SearchBudget{1, 1000, 64});
  ASSERT_EQ(one_one.outcome, SearchOutcome::found);
  EXPECT_EQ(one_one.depth, 1u);

  const SearchReport chain = search_witness(Ratio(39, 217), SearchBudget{4, 10'000'000, 64});
  ASSERT_EQ(chain.outcome, SearchOutcome::found);
  EXPECT_EQ(chain.depth, 4u);
}

TEST(Search, ExhaustionCarriesScaleCaveat) {
  const SearchReport r = search_witness(Ratio(3, 8), SearchBudget{3, 10'000'000, 16});
  EXPECT_EQ(r.outcome, SearchOutcome::exhausted);
  EXPECT_FALSE(r.witness.has_value());
  EXPECT_EQ(r.proven_above, 4u);
  EXPECT_EQ(r.exact_above, 3u);
  const std::string text = r.summary(Ratio(3, 8));
  EXPECT_NE(text.find("scale <= 16"), std::string::npos) << text;
  EXPECT_NE(text.find("larger scale"), std::string::npos) << text;
}

TEST(Search, ShallowTableMakesRuleOutsExact) {
  const SearchReport r = search_witness(Ratio(3, 8), SearchBudget{4, 10'000'000, 16}, &shared_table());
  ASSERT_EQ(r.outcome, SearchOutcome::found);
  EXPECT_EQ(r.depth, 4u);
  EXPECT_EQ(r.exact_above, 4u);
  EXPECT_EQ(r.summary(Ratio(3, 8)).find("larger scale"), std::string::npos);
}

TEST(Search, NodeBudget) {
  const SearchReport r = search_witness(Ratio(13, 19), SearchBudget{6, 5, 64});
  EXPECT_EQ(r.outcome, SearchOutcome::node_budget);
  EXPECT_NE(r.summary(Ratio(13, 19)).find("node budget"), std::string::npos);
}

TEST(Search, AgreesWithLevelSetsOnSmallSums) {
  LevelTable& t = shared_table();
  for (long long s = 1; s <= 20; ++s) {
    for (long long a = 0; 2 * a <= s; ++a) {
      if (std::gcd(a, s - a) != 1) continue;
      const Ratio r(a, s - a);
      const auto exact = f_exact(r, 4, t);
      const std::size_t f = exact ? exact->f : 5;
      const SearchReport rep = search_witness(r, SearchBudget{5, 10'000'000, 64});
      ASSERT_EQ(rep.outcome, SearchOutcome::found) << to_string(r);
      EXPECT_EQ(rep.depth, f) << to_string(r);
    }
  }
}
