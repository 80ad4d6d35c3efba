#include "ucake/combinators.hpp"

#include <algorithm>
#include <utility>

#include "ucake/error.hpp"

namespace ucake {

Cutoff::Cutoff(BigInt k, BigInt d) : k_(std::move(k)), d_(std::move(d)) {
  if (d_ <= 0 || k_ <= 0 || k_ >= d_) {
    throw InvalidCutoffError("cutoff " + to_string(k_) + "/" + to_string(d_) + " is not strictly between 0 and 1");
  }
  const BigInt g = gcd(k_, d_);
  if (g != 1) {
    k_ /= g;
    d_ /= g;
  }
}

Cutoff Cutoff::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) throw ParseError("cutoff must be 'k/d', got '" + std::string(text) + "'");
  return Cutoff(parse_natural(text.substr(0, slash)), parse_natural(text.substr(slash + 1)));
}

std::string to_string(const Cutoff& c) { return to_string(c.k()) + "/" + to_string(c.d()); }

std::string to_string(OperatorId op) { return std::to_string(static_cast<int>(op)); }

OperatorId operator_from_string(std::string_view text) {
  if (text == "1") return OperatorId::op1;
  if (text == "2") return OperatorId::op2;
  if (text == "3") return OperatorId::op3;
  throw ParseError("unknown operator '" + std::string(text) + "'");
}

Ratio star(OperatorId op, const Ratio& r1, const Ratio& r2) {
  const BigInt& a1 = r1.a();
  const BigInt& b1 = r1.b();
  const BigInt& a2 = r2.a();
  const BigInt& b2 = r2.b();
  BigInt x, y;
  switch (op) {
    case OperatorId::op1:
      x = (a1 + b1) * a2;
      y = (a2 + b2) * b1;
      break;
    case OperatorId::op2:
      x = a1 * a2;
      y = a1 * a2 + b2 * a1 + a2 * b1;
      break;
    case OperatorId::op3:
      x = a1 * b2 + b1 * a2 + b2 * b1;
      y = b2 * b1;
      break;
  }
  if (x == 0 && y == 0) {
    throw DegenerateProductError("op" + to_string(op) + " of " + to_string(r1) + " and " + to_string(r2) +
                                 " is (0,0)");
  }
  return Ratio(std::move(x), std::move(y));
}

bool realizable(OperatorId op, const Ratio& r1, const Ratio& r2) {
  switch (op) {
    case OperatorId::op1:
      return r1.b() * r2.a() > r1.a() * r2.b();
    case OperatorId::op2:
      return r1.a() > 0 && r2.a() > 0;
    case OperatorId::op3:
      return r1.b() > 0 && r2.b() > 0;
  }
  return false;
}

CutChildren apply_cut(const Ratio& oriented_parent, const Cutoff& c) {
  const BigInt& a = oriented_parent.a();
  const BigInt& b = oriented_parent.b();
  if (a > b) throw std::invalid_argument("apply_cut expects the parent oriented with a <= b");
  if (!oriented_parent.is_lowest_terms()) throw std::invalid_argument("apply_cut expects a lowest-terms parent");

  const BigInt ks = c.k() * (a + b);
  const BigInt ad = a * c.d();
  const BigInt bd = b * c.d();
  const auto child = [](BigInt x, BigInt y) {
    Ratio raw(std::move(x), std::move(y));
    Ratio reduced = reduce(raw);
    return CutChild{std::move(raw), std::move(reduced)};
  };

  if (ad < ks && ks < bd) {
    return {CutCase::between, child(ad, bd - ks), child(ad, ks - ad)};
  }
  if (ks <= ad) {
    return {CutCase::small, child(ad, bd - ks), child(ad - ks, bd)};
  }
  throw InvalidCutoffError("cutoff " + to_string(c) + " is not usable on " + to_string(oriented_parent));
}

CutOutcome split(const Ratio& parent, const Cutoff& c) {
  const Player cutter = lesser_entitled(parent);
  CutChildren children = apply_cut(oriented(parent), c);
  if (cutter == Player::bob) {
    const auto flip = [](const CutChild& ch) { return CutChild{ch.raw.swapped(), ch.reduced.swapped()}; };
    return {cutter, children.kind, flip(children.take), flip(children.keep)};
  }
  return {cutter, children.kind, std::move(children.take), std::move(children.keep)};
}

namespace {

// Position u of the cut in units of the raw product's sum, so that the
// cutoff is u / sum(product).
BigInt cut_position(OperatorId op, const Ratio& x, const Ratio& y, const Ratio& product) {
  const BigInt total = sum(product);
  BigInt u;
  switch (op) {
    case OperatorId::op1:
      return x.b() * y.a() - x.a() * y.b();
    case OperatorId::op2:
      u = product.a() + x.b() * y.a();
      break;
    case OperatorId::op3:
      u = product.b() + x.a() * y.b();
      break;
  }
  BigInt mirrored = total - u;
  return std::min(u, mirrored);
}

bool same_pair(const CanonicalKey& p1, const CanonicalKey& p2, const CanonicalKey& q1, const CanonicalKey& q2) {
  return (p1 == q1 && p2 == q2) || (p1 == q2 && p2 == q1);
}

}  // namespace

RecoveredCut recover_cutoff(const Ratio& parent, const Ratio& child1, const Ratio& child2) {
  if (!parent.is_lowest_terms()) throw std::invalid_argument("recover_cutoff expects a lowest-terms parent");
  const CanonicalKey parent_key = canonical_key(parent);
  const CanonicalKey k1 = canonical_key(child1);
  const CanonicalKey k2 = canonical_key(child2);

  for (OperatorId op : kAllOperators) {
    for (bool swap1 : {false, true}) {
      for (bool swap2 : {false, true}) {
        const Ratio x = swap1 ? child1.swapped() : child1;
        const Ratio y = swap2 ? child2.swapped() : child2;
        if (!realizable(op, x, y)) continue;
        const Ratio product = star(op, x, y);
        if (canonical_key(product) != parent_key) continue;
        try {
          Cutoff cutoff(cut_position(op, x, y, product), sum(product));
          const CutOutcome out = split(parent, cutoff);
          if (same_pair(canonical_key(out.take.reduced), canonical_key(out.keep.reduced), k1, k2)) {
            return {op, std::move(cutoff)};
          }
        } catch (const InvalidCutoffError&) {
          continue;
        }
      }
    }
  }
  throw NotADecompositionError("no single cut turns " + to_string(parent) + " into " + to_string(k1) + " and " +
                               to_string(k2));
}

}  // namespace ucake
