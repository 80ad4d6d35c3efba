#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "ucake/number.hpp"

namespace ucake {

enum class Player { alice, bob };

constexpr Player other(Player p) { return p == Player::alice ? Player::bob : Player::alice; }

/// Entitlement ratio (a:b) between Alice (a) and Bob (b).
///
/// Both components are non-negative and not both zero; (0,0) is rejected by
/// the constructor with DegenerateRatioError. Values are exact and unbounded.
class Ratio {
 public:
  Ratio(BigInt a, BigInt b);
  Ratio(long long a, long long b) : Ratio(BigInt(a), BigInt(b)) {}

  const BigInt& a() const noexcept { return a_; }
  const BigInt& b() const noexcept { return b_; }
  const BigInt& share(Player p) const noexcept { return p == Player::alice ? a_ : b_; }

  Ratio swapped() const { return Ratio(b_, a_); }
  Ratio scaled(const BigInt& factor) const;

  bool is_lowest_terms() const;
  bool is_leaf() const noexcept { return a_ == 0 || b_ == 0; }

  friend bool operator==(const Ratio& lhs, const Ratio& rhs) = default;

 private:
  BigInt a_;
  BigInt b_;
};

/// Unordered lowest-terms representative: gcd(lo, hi) = 1 and lo <= hi.
struct CanonicalKey {
  BigInt lo;
  BigInt hi;

  Ratio ratio() const { return Ratio(lo, hi); }
  friend bool operator==(const CanonicalKey& lhs, const CanonicalKey& rhs) = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& key) const noexcept;
};

struct RatioHash {
  std::size_t operator()(const Ratio& r) const noexcept;
};

/// (a/g, b/g) with g = gcd(a, b), where gcd(0, x) = x.
Ratio reduce(const Ratio& r);

CanonicalKey canonical_key(const Ratio& r);

BigInt sum(const Ratio& r);

/// Ordered proportionality a1*b2 = a2*b1; (1,2) is not equivalent to (2,1).
bool equivalent(const Ratio& lhs, const Ratio& rhs);

/// The player who is owed less; Alice when the entitlements are equal.
Player lesser_entitled(const Ratio& r);

/// Orientation putting the lesser-entitled player first.
Ratio oriented(const Ratio& r);

std::string to_string(const Ratio& r);  // "(a,b)"
std::string to_string(const CanonicalKey& key);
std::ostream& operator<<(std::ostream& os, const Ratio& r);
std::ostream& operator<<(std::ostream& os, const CanonicalKey& key);

// JSON form: two-element array of decimal digit strings.
nlohmann::json ratio_to_json(const Ratio& r);
Ratio ratio_from_json(const nlohmann::json& j);
nlohmann::json key_to_json(const CanonicalKey& key);
CanonicalKey key_from_json(const nlohmann::json& j);

}  // namespace ucake
