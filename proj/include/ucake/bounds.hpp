#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ucake/number.hpp"
#include "ucake/protocol.hpp"
#include "ucake/ratio.hpp"

namespace ucake {

struct ChainItem {
  std::size_t level;  // n, starting at 1
  Ratio ratio;        // lowest terms
  BigInt raw_gcd;     // gcd of the raw op2 product (1 for the base item)
};

/// Sequence (1,1), then item(n) = item(n-1) op2 swap(item(n-1)); each item
/// has sum 2^(2^(n-1)) and can be divided with n cuts.
struct ConstructionChain {
  std::vector<ChainItem> items;
  ProtocolTree witness;  // depth-n tree for the last item
};

/// Throws std::invalid_argument for n == 0, and std::logic_error if a raw
/// product is ever not in lowest terms.
ConstructionChain construction1(std::size_t n);

/// min{n >= 0 : a+b <= 2^(2^n - 1)}, using integer comparisons only.
std::size_t lower_bound_int(const Ratio& r);

/// ceil(lg(a+b)), the cut count of cut-near-halves.
std::size_t upper_bound_int(const Ratio& r);

/// 2^(2^n - 1), the largest sum any ratio divisible with n cuts can have.
/// nullopt when n is too large for the bound to be a useful filter (n > 32).
std::optional<BigInt> sum_bound(std::size_t n);

}  // namespace ucake
