#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ucake/number.hpp"
#include "ucake/ratio.hpp"

namespace ucake {

/// Fraction k/d of the current piece, by the cutter's measure. Always stored in
/// lowest terms with 0 < k < d; anything else throws InvalidCutoffError.
class Cutoff {
 public:
  Cutoff(BigInt k, BigInt d);
  Cutoff(long long k, long long d) : Cutoff(BigInt(k), BigInt(d)) {}

  static Cutoff parse(std::string_view text);  // "k/d"

  const BigInt& k() const noexcept { return k_; }
  const BigInt& d() const noexcept { return d_; }
  BigRational value() const { return BigRational(k_, d_); }

  friend bool operator==(const Cutoff& lhs, const Cutoff& rhs) = default;

 private:
  BigInt k_;
  BigInt d_;
};

std::string to_string(const Cutoff& c);  // "k/d"

enum class OperatorId { op1 = 1, op2 = 2, op3 = 3 };

inline constexpr std::array<OperatorId, 3> kAllOperators{OperatorId::op1, OperatorId::op2, OperatorId::op3};

std::string to_string(OperatorId op);  // "1", "2", "3"
OperatorId operator_from_string(std::string_view text);

/// Raw (unreduced) combination of two child ratios:
///   op1: ((a1+b1)*a2, (a2+b2)*b1)
///   op2: (a1*a2, a1*a2 + b2*a1 + a2*b1)
///   op3: (a1*b2 + b1*a2 + b2*b1, b2*b1)
/// Throws DegenerateProductError when the product is (0,0).
Ratio star(OperatorId op, const Ratio& r1, const Ratio& r2);

/// True when a single cut on star(op, r1, r2) really yields children r1 and r2.
///
/// op1 needs b1*a2 > a1*b2 (the cut is positive); op2 needs a1, a2 > 0; op3
/// needs b1, b2 > 0. Products failing this are algebraic artefacts with no
/// protocol step behind them.
bool realizable(OperatorId op, const Ratio& r1, const Ratio& r2);

enum class CutCase {
  // a/(a+b) < k/d < b/(a+b): the cut piece and the rest both exceed the
  // cutter's due share, so the non-cutter always receives one of them.
  between,
  // k(a+b) <= min(a,b)*d: the cut piece is at most either due share, so it
  // goes to whoever values it more and the rest stays in play.
  small,
};

struct CutChild {
  Ratio raw;
  Ratio reduced;
};

/// Children of a cut, in the (cutter, other) orientation of the parent.
/// take: the non-cutter valued the cut piece above the cutoff.
/// keep: otherwise.
struct CutChildren {
  CutCase kind;
  CutChild take;
  CutChild keep;
};

/// Children of cutting an oriented parent (lowest terms, a <= b, the
/// a-holder cuts) at c. Throws InvalidCutoffError when c satisfies neither
/// case condition and std::invalid_argument when the parent is not oriented.
CutChildren apply_cut(const Ratio& oriented_parent, const Cutoff& c);

/// Outcome of a cut on a parent in (Alice, Bob) orientation. The cutter is the
/// lesser-entitled player (Alice on ties) and both children are reported in
/// (Alice, Bob) orientation.
struct CutOutcome {
  Player cutter;
  CutCase kind;
  CutChild take;
  CutChild keep;
};

CutOutcome split(const Ratio& parent, const Cutoff& c);

struct RecoveredCut {
  OperatorId op;
  Cutoff cutoff;
};

/// Operator and cutoff turning parent into children with the canonical keys
/// of child1 and child2 (the parent must be in lowest terms, in any
/// orientation). Operators are tried in order op1, op2, op3 and child
/// orientations with child1 unswapped first; the first hit wins. When two
/// cutoffs symmetric about 1/2 give the same pair, the smaller is returned.
/// Throws NotADecompositionError when nothing matches.
RecoveredCut recover_cutoff(const Ratio& parent, const Ratio& child1, const Ratio& child2);

}  // namespace ucake
