#include "ucake/ratio.hpp"

#include <utility>

#include "ucake/error.hpp"

namespace ucake {

Ratio::Ratio(BigInt a, BigInt b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_ < 0 || b_ < 0) throw std::invalid_argument("ratio components must be non-negative");
  if (a_ == 0 && b_ == 0) throw DegenerateRatioError("ratio (0,0) has no meaning");
}

Ratio Ratio::scaled(const BigInt& factor) const {
  if (factor <= 0) throw std::invalid_argument("scale factor must be positive");
  return Ratio(a_ * factor, b_ * factor);
}

bool Ratio::is_lowest_terms() const { return gcd(a_, b_) == 1; }

std::size_t CanonicalKeyHash::operator()(const CanonicalKey& key) const noexcept {
  const std::size_t h1 = std::hash<BigInt>{}(key.lo);
  const std::size_t h2 = std::hash<BigInt>{}(key.hi);
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

std::size_t RatioHash::operator()(const Ratio& r) const noexcept {
  return CanonicalKeyHash{}(CanonicalKey{r.a(), r.b()});
}

Ratio reduce(const Ratio& r) {
  const BigInt g = gcd(r.a(), r.b());
  if (g == 1) return r;
  return Ratio(r.a() / g, r.b() / g);
}

CanonicalKey canonical_key(const Ratio& r) {
  Ratio reduced = reduce(r);
  if (reduced.a() <= reduced.b()) return {reduced.a(), reduced.b()};
  return {reduced.b(), reduced.a()};
}

BigInt sum(const Ratio& r) { return r.a() + r.b(); }

bool equivalent(const Ratio& lhs, const Ratio& rhs) { return lhs.a() * rhs.b() == rhs.a() * lhs.b(); }

Player lesser_entitled(const Ratio& r) { return r.b() < r.a() ? Player::bob : Player::alice; }

Ratio oriented(const Ratio& r) { return lesser_entitled(r) == Player::alice ? r : r.swapped(); }

std::string to_string(const Ratio& r) { return "(" + to_string(r.a()) + "," + to_string(r.b()) + ")"; }

std::string to_string(const CanonicalKey& key) { return "(" + to_string(key.lo) + "," + to_string(key.hi) + ")"; }

std::ostream& operator<<(std::ostream& os, const Ratio& r) { return os << to_string(r); }

std::ostream& operator<<(std::ostream& os, const CanonicalKey& key) { return os << to_string(key); }

nlohmann::json ratio_to_json(const Ratio& r) { return nlohmann::json::array({to_string(r.a()), to_string(r.b())}); }

Ratio ratio_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
    throw ParseError("ratio must be a two-element array of digit strings");
  }
  return Ratio(parse_natural(j[0].get<std::string>()), parse_natural(j[1].get<std::string>()));
}

nlohmann::json key_to_json(const CanonicalKey& key) {
  return nlohmann::json::array({to_string(key.lo), to_string(key.hi)});
}

CanonicalKey key_from_json(const nlohmann::json& j) {
  const Ratio r = ratio_from_json(j);
  CanonicalKey key = canonical_key(r);
  if (key.lo != r.a() || key.hi != r.b()) throw ParseError("key " + to_string(r) + " is not canonical");
  return key;
}

}  // namespace ucake
