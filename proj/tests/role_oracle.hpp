#pragma once

// Brute-force cut-count oracle that never touches the combination operators.
//
// A subproblem (a, b) with a <= b is cut by the a-player at u units out of
// a + b. The three ways play can continue are:
//   take   (other player takes the cut piece):        (a, b - u)
//   keep-A (a < u < b, other player takes the rest):  (a, u - a)
//   keep-B (u <= a, cutter keeps the cut piece):      (a - u, b)
// A ratio is divisible with m cuts when some u makes both continuations
// divisible with m - 1 cuts. Any child divisible with m - 1 cuts has sum at
// most 2^(2^(m-1) - 1), so every candidate child is enumerated explicitly and
// the cut position is solved from it; the sibling is then checked
// recursively.

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

class RoleOracle {
 public:
  // Smallest m <= max_cuts with (a, b) divisible in m cuts.
  std::optional<int> f(std::int64_t a, std::int64_t b, int max_cuts = 4) {
    for (int m = 0; m <= max_cuts; ++m) {
      if (divisible(a, b, m)) return m;
    }
    return std::nullopt;
  }

  bool divisible(std::int64_t a, std::int64_t b, int m) {
    const auto [lo, hi] = key(a, b);
    if (lo == 0) return true;
    if (m == 0 || lo + hi > bound(m)) return false;
    const auto memo_key = std::tuple{lo, hi, m};
    if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    const bool result = search(lo, hi, m);
    memo_.emplace(memo_key, result);
    return result;
  }

  const std::vector<std::pair<std::int64_t, std::int64_t>>& candidates(int m) {
    if (auto it = candidates_.find(m); it != candidates_.end()) return it->second;
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::int64_t s = 1; s <= bound(m); ++s) {
      for (std::int64_t p = 0; 2 * p <= s; ++p) {
        if (std::gcd(p, s - p) == 1 && divisible(p, s - p, m)) out.emplace_back(p, s - p);
      }
    }
    return candidates_.emplace(m, std::move(out)).first->second;
  }

 private:
  static std::int64_t bound(int m) { return std::int64_t{1} << ((1 << m) - 1); }

  static std::pair<std::int64_t, std::int64_t> key(std::int64_t x, std::int64_t y) {
    const std::int64_t g = std::gcd(x, y);
    x /= g;
    y /= g;
    return x <= y ? std::pair{x, y} : std::pair{y, x};
  }

  bool search(std::int64_t a, std::int64_t b, int m) {
    const auto children = candidates(m - 1);  // copy: recursion may add entries
    for (const auto& [p0, q0] : children) {
      for (const auto& [p, q] : {std::pair{p0, q0}, std::pair{q0, p0}}) {
        if (q > 0) {
          // keep-B continuation proportional to (p, q); scale by q
          const std::int64_t A = a * q, B = b * q, U = A - p * b;
          if (U > 0 && U <= A && divisible(A, B - U, m - 1)) return true;
        }
        if (p > 0) {
          const std::int64_t A = a * p, B = b * p;
          // take continuation proportional to (p, q)
          const std::int64_t U = B - q * a;
          if (U > 0 && U <= A && divisible(A - U, B, m - 1)) return true;
          if (U > A && U < B && divisible(A, U - A, m - 1)) return true;
          // keep-A continuation proportional to (p, q)
          const std::int64_t V = A + q * a;
          if (V > A && V < B && divisible(A, B - V, m - 1)) return true;
        }
      }
    }
    return false;
  }

  std::map<std::tuple<std::int64_t, std::int64_t, int>, bool> memo_;
  std::map<int, std::vector<std::pair<std::int64_t, std::int64_t>>> candidates_;
};

}  // namespace oracle
