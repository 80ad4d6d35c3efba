#include "ucake/bounds.hpp"

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ucake/combinators.hpp"

namespace ucake {

ConstructionChain construction1(std::size_t n) {
  if (n == 0) throw std::invalid_argument("construction1 starts at n = 1");
  std::vector<ChainItem> items;
  items.push_back({1, Ratio(1, 1), BigInt(1)});
  for (std::size_t level = 2; level <= n; ++level) {
    const Ratio& prev = items.back().ratio;
    const Ratio raw = star(OperatorId::op2, prev, prev.swapped());
    BigInt g = gcd(raw.a(), raw.b());
    if (g != 1) {
      throw std::logic_error("construction step " + std::to_string(level) + " is not in lowest terms: " +
                             to_string(raw));
    }
    items.push_back({level, raw, std::move(g)});
  }

  std::unordered_map<CanonicalKey, CanonicalKey, CanonicalKeyHash> previous;
  for (std::size_t i = 1; i < items.size(); ++i) {
    previous.emplace(canonical_key(items[i].ratio), canonical_key(items[i - 1].ratio));
  }
  const CanonicalKey one_one = canonical_key(Ratio(1, 1));
  const CanonicalKey leaf = canonical_key(Ratio(0, 1));
  ProtocolTree witness = assemble_tree(
      items.back().ratio, [&](const CanonicalKey& key) -> std::optional<std::pair<CanonicalKey, CanonicalKey>> {
        if (key == one_one) return std::pair{leaf, leaf};
        if (auto it = previous.find(key); it != previous.end()) return std::pair{it->second, it->second};
        return std::nullopt;
      });
  return {std::move(items), std::move(witness)};
}

std::size_t lower_bound_int(const Ratio& r) {
  // s <= 2^(2^n - 1)  <=>  ceil(lg s) <= 2^n - 1  <=>  ceil(lg s) + 1 <= 2^n.
  const std::size_t lg = ceil_log2(sum(r));
  std::size_t n = 0;
  while ((std::size_t{1} << n) < lg + 1) ++n;
  return n;
}

std::size_t upper_bound_int(const Ratio& r) { return ceil_log2(sum(r)); }

std::optional<BigInt> sum_bound(std::size_t n) {
  if (n > 32) return std::nullopt;
  return pow2((std::size_t{1} << n) - 1);
}

}  // namespace ucake
