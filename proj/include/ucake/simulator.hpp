#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucake/combinators.hpp"
#include "ucake/number.hpp"
#include "ucake/protocol.hpp"
#include "ucake/ratio.hpp"

namespace ucake {

/// Sub-interval [lo, hi] of the unit cake.
struct Piece {
  BigRational lo;
  BigRational hi;
  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Piecewise-constant probability density on [0, 1].
class ValuationMeasure {
 public:
  /// breakpoints 0 = x_0 < ... < x_m = 1 and m nonnegative densities with
  /// total mass exactly 1; throws std::invalid_argument otherwise.
  ValuationMeasure(std::vector<BigRational> breakpoints, std::vector<BigRational> densities);

  static ValuationMeasure uniform();

  const std::vector<BigRational>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<BigRational>& densities() const noexcept { return densities_; }

  /// Mass of [0, x] for x in [0, 1].
  BigRational cumulative(const BigRational& x) const;

  friend bool operator==(const ValuationMeasure&, const ValuationMeasure&) = default;

 private:
  std::vector<BigRational> breakpoints_;
  std::vector<BigRational> densities_;
};

BigRational measure_eval(const ValuationMeasure& v, const Piece& p);
BigRational measure_eval(const ValuationMeasure& v, const std::vector<Piece>& pieces);

/// Leftmost x in within with measure_eval(v, [within.lo, x]) == target.
/// Throws InfeasibleCutError when target is negative or exceeds the value
/// of within.
BigRational measure_cut(const ValuationMeasure& v, const Piece& within, const BigRational& target);

enum class Branch { take, keep };

std::string to_string(Branch b);

struct TraceStep {
  Ratio ratio;  // actual (Alice, Bob) entitlements of the subproblem
  Player cutter;
  Cutoff cutoff;
  Piece current;
  BigRational position;     // right end of the cut piece
  BigRational other_value;  // non-cutter's value of the cut piece
  BigRational threshold;    // cutoff times non-cutter's value of the current piece
  Branch branch;
};

struct PlayerOutcome {
  std::vector<Piece> pieces;
  BigRational value;  // own valuation of all pieces
  BigRational due;    // entitlement share of the whole cake
  bool satisfied() const { return value >= due; }
};

struct ExecutionTrace {
  Ratio ratio;
  std::vector<TraceStep> steps;
  PlayerOutcome alice;
  PlayerOutcome bob;

  bool guarantee_holds() const { return alice.satisfied() && bob.satisfied(); }

  /// Allocated pieces tile [0, 1] with disjoint interiors.
  bool partitions_cake() const;
};

/// Plays a valid tree from the full cake. The node cutoff is a fraction of
/// the cutter's value of the current piece; the non-cutter takes the cut
/// (left) piece only when they value it strictly above the cutoff fraction
/// of their own value of the current piece. Child nodes stored with Alice
/// and Bob swapped relative to the actual subproblem are played with the
/// roles exchanged.
ExecutionTrace run_protocol(const ProtocolTree& t, const ValuationMeasure& va, const ValuationMeasure& vb);

/// Deterministic measure with m pieces drawn from mt19937_64(seed). Piece
/// widths and densities are small random integers normalised exactly;
/// densities may be zero. m == 1 gives the uniform measure.
ValuationMeasure random_measure(std::uint64_t seed, std::size_t m);

struct FuzzFailure {
  std::uint64_t seed;
  ExecutionTrace trace;
};

struct FuzzReport {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::size_t max_steps = 0;
  std::optional<FuzzFailure> first_failure;
};

/// Runs the tree on `count` measure pairs. Pair i uses seeds 2(seed+i) and
/// 2(seed+i)+1 with piece counts 1 + seed % max_pieces for each player.
FuzzReport fuzz_protocol(const ProtocolTree& t, std::uint64_t seed, std::size_t count, std::size_t max_pieces = 6);

nlohmann::json measure_to_json(const ValuationMeasure& v);
ValuationMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json trace_to_json(const ExecutionTrace& trace);

}  // namespace ucake
