#include "ucake/simulator.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "ucake/error.hpp"

namespace ucake {

namespace {

nlohmann::json rationals_to_json(const std::vector<BigRational>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (const BigRational& v : values) out.push_back(to_string(v));
  return out;
}

std::vector<BigRational> rationals_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw ParseError(std::string("field '") + field + "' must be an array of strings");
  std::vector<BigRational> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw ParseError(std::string("field '") + field + "' must hold \"p/q\" strings");
    out.push_back(parse_rational(item.get<std::string>()));
  }
  return out;
}

nlohmann::json piece_to_json(const Piece& p) { return nlohmann::json::array({to_string(p.lo), to_string(p.hi)}); }

nlohmann::json outcome_to_json(const PlayerOutcome& o) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const Piece& p : o.pieces) pieces.push_back(piece_to_json(p));
  return {{"pieces", pieces}, {"value", to_string(o.value)}, {"due", to_string(o.due)}, {"satisfied", o.satisfied()}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Measures

ValuationMeasure::ValuationMeasure(std::vector<BigRational> breakpoints, std::vector<BigRational> densities)
    : breakpoints_(std::move(breakpoints)), densities_(std::move(densities)) {
  if (breakpoints_.size() < 2 || densities_.size() + 1 != breakpoints_.size()) {
    throw std::invalid_argument("a measure with m pieces needs m+1 breakpoints and m densities");
  }
  if (breakpoints_.front() != 0 || breakpoints_.back() != 1) {
    throw std::invalid_argument("breakpoints must start at 0 and end at 1");
  }
  BigRational mass = 0;
  for (std::size_t i = 0; i < densities_.size(); ++i) {
    if (breakpoints_[i + 1] <= breakpoints_[i]) throw std::invalid_argument("breakpoints must be strictly increasing");
    if (densities_[i] < 0) throw std::invalid_argument("densities must be nonnegative");
    mass += densities_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
  }
  if (mass != 1) throw std::invalid_argument("measure has total mass " + to_string(mass) + ", expected 1");
}

ValuationMeasure ValuationMeasure::uniform() { return ValuationMeasure({0, 1}, {1}); }

BigRational ValuationMeasure::cumulative(const BigRational& x) const {
  if (x < 0 || x > 1) throw std::invalid_argument("position " + to_string(x) + " is outside [0,1]");
  BigRational mass = 0;
  for (std::size_t i = 0; i < densities_.size() && breakpoints_[i] < x; ++i) {
    const BigRational& right = std::min(x, breakpoints_[i + 1]);
    mass += densities_[i] * (right - breakpoints_[i]);
  }
  return mass;
}

BigRational measure_eval(const ValuationMeasure& v, const Piece& p) {
  if (p.lo > p.hi) throw std::invalid_argument("piece has lo > hi");
  return v.cumulative(p.hi) - v.cumulative(p.lo);
}

BigRational measure_eval(const ValuationMeasure& v, const std::vector<Piece>& pieces) {
  BigRational total = 0;
  for (const Piece& p : pieces) total += measure_eval(v, p);
  return total;
}

BigRational measure_cut(const ValuationMeasure& v, const Piece& within, const BigRational& target) {
  const BigRational available = measure_eval(v, within);
  if (target < 0 || target > available) {
    throw InfeasibleCutError("cannot cut a piece worth " + to_string(target) + " out of [" + to_string(within.lo) +
                             ", " + to_string(within.hi) + "] worth " + to_string(available));
  }
  if (target == 0) return within.lo;
  const auto& xs = v.breakpoints();
  const auto& ds = v.densities();
  BigRational acc = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (xs[i + 1] <= within.lo) continue;
    const BigRational start = std::max(xs[i], within.lo);
    const BigRational end = std::min(xs[i + 1], within.hi);
    if (start >= end) break;
    const BigRational mass = ds[i] * (end - start);
    if (ds[i] > 0 && acc + mass >= target) return start + (target - acc) / ds[i];
    acc += mass;
  }
  throw std::logic_error("measure_cut ran past a feasible target");
}

ValuationMeasure random_measure(std::uint64_t seed, std::size_t m) {
  if (m == 0) throw std::invalid_argument("a measure needs at least one piece");
  std::mt19937_64 rng(seed);
  std::vector<BigInt> widths(m);
  std::vector<BigInt> weights(m);
  BigInt total_width = 0;
  for (std::size_t i = 0; i < m; ++i) {
    widths[i] = BigInt(rng() % 16 + 1);
    total_width += widths[i];
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < m; ++i) {
    weights[i] = BigInt(rng() % 8);
    any_positive = any_positive || weights[i] > 0;
  }
  if (!any_positive) weights[rng() % m] = 1;

  std::vector<BigRational> breakpoints{BigRational(0)};
  BigInt running = 0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    running += widths[i];
    breakpoints.emplace_back(running, total_width);
  }
  breakpoints.emplace_back(1);

  BigInt mass = 0;  // in units of 1/total_width
  for (std::size_t i = 0; i < m; ++i) mass += weights[i] * widths[i];
  std::vector<BigRational> densities;
  for (std::size_t i = 0; i < m; ++i) densities.emplace_back(weights[i] * total_width, mass);
  return ValuationMeasure(std::move(breakpoints), std::move(densities));
}

// ---------------------------------------------------------------------------
// Execution

std::string to_string(Branch b) { return b == Branch::take ? "take" : "keep"; }

bool ExecutionTrace::partitions_cake() const {
  std::vector<Piece> all = alice.pieces;
  all.insert(all.end(), bob.pieces.begin(), bob.pieces.end());
  std::sort(all.begin(), all.end(), [](const Piece& l, const Piece& r) { return l.lo < r.lo || (l.lo == r.lo && l.hi < r.hi); });
  BigRational edge = 0;
  for (const Piece& p : all) {
    if (p.lo != edge || p.hi < p.lo) return false;
    edge = p.hi;
  }
  return edge == 1;
}

ExecutionTrace run_protocol(const ProtocolTree& t, const ValuationMeasure& va, const ValuationMeasure& vb) {
  const Ratio declared = reduce(t.declared_ratio());
  ExecutionTrace trace{declared, {}, {}, {}};
  const auto measure_of = [&](Player p) -> const ValuationMeasure& { return p == Player::alice ? va : vb; };
  const auto pieces_of = [&](Player p) -> std::vector<Piece>& {
    return p == Player::alice ? trace.alice.pieces : trace.bob.pieces;
  };

  const ProtocolNode* node = &t.root();
  bool flipped = false;  // stored node ratios have Alice and Bob exchanged
  Piece current{0, 1};
  const auto actual = [&](Player p) { return flipped ? other(p) : p; };

  while (!node->is_leaf()) {
    const CutStep& cut = node->cut();
    const CutOutcome outcome = split(node->ratio, cut.cutoff);
    const Player cutter = actual(cut.cutter);
    const Player chooser = other(cutter);
    const BigRational fraction = cut.cutoff.value();

    const BigRational position =
        measure_cut(measure_of(cutter), current, fraction * measure_eval(measure_of(cutter), current));
    const Piece left{current.lo, position};
    const Piece right{position, current.hi};
    const BigRational other_value = measure_eval(measure_of(chooser), left);
    const BigRational threshold = fraction * measure_eval(measure_of(chooser), current);
    const Branch branch = other_value > threshold ? Branch::take : Branch::keep;

    trace.steps.push_back({flipped ? node->ratio.swapped() : node->ratio, cutter, cut.cutoff, current, position,
                           other_value, threshold, branch});

    const CutChild* expected = nullptr;
    const ProtocolNode* next = nullptr;
    if (branch == Branch::take) {
      pieces_of(chooser).push_back(left);
      current = right;
      expected = &outcome.take;
      next = cut.take.get();
    } else if (outcome.kind == CutCase::between) {
      pieces_of(chooser).push_back(right);
      current = left;
      expected = &outcome.keep;
      next = cut.keep.get();
    } else {
      pieces_of(cutter).push_back(left);
      current = right;
      expected = &outcome.keep;
      next = cut.keep.get();
    }
    if (next->ratio != expected->reduced) {
      if (next->ratio != expected->reduced.swapped()) {
        throw std::invalid_argument("tree node " + to_string(next->ratio) + " does not follow from " +
                                    to_string(node->ratio) + " at " + to_string(cut.cutoff));
      }
      flipped = !flipped;
    }
    node = next;
  }
  pieces_of(actual(node->leaf().winner)).push_back(current);

  const BigInt s = sum(declared);
  trace.alice.value = measure_eval(va, trace.alice.pieces);
  trace.alice.due = BigRational(declared.a(), s);
  trace.bob.value = measure_eval(vb, trace.bob.pieces);
  trace.bob.due = BigRational(declared.b(), s);
  return trace;
}

FuzzReport fuzz_protocol(const ProtocolTree& t, std::uint64_t seed, std::size_t count, std::size_t max_pieces) {
  if (max_pieces == 0) throw std::invalid_argument("max_pieces must be positive");
  FuzzReport report;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t pair_seed = seed + i;
    const std::uint64_t sa = 2 * pair_seed;
    const std::uint64_t sb = 2 * pair_seed + 1;
    const ValuationMeasure va = random_measure(sa, 1 + sa % max_pieces);
    const ValuationMeasure vb = random_measure(sb, 1 + sb % max_pieces);
    ExecutionTrace trace = run_protocol(t, va, vb);
    ++report.runs;
    report.max_steps = std::max(report.max_steps, trace.steps.size());
    if (!trace.guarantee_holds() || !trace.partitions_cake()) {
      ++report.failures;
      if (!report.first_failure) report.first_failure = FuzzFailure{pair_seed, std::move(trace)};
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json measure_to_json(const ValuationMeasure& v) {
  return {{"breakpoints", rationals_to_json(v.breakpoints())}, {"densities", rationals_to_json(v.densities())}};
}

ValuationMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("densities")) {
    throw ParseError("measure needs 'breakpoints' and 'densities'");
  }
  try {
    return ValuationMeasure(rationals_from_json(j.at("breakpoints"), "breakpoints"),
                            rationals_from_json(j.at("densities"), "densities"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid measure: ") + e.what());
  }
}

nlohmann::json trace_to_json(const ExecutionTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& s : trace.steps) {
    steps.push_back({{"ratio", ratio_to_json(s.ratio)},
                     {"cutter", to_string(s.cutter)},
                     {"cutoff", to_string(s.cutoff)},
                     {"piece", piece_to_json(s.current)},
                     {"position", to_string(s.position)},
                     {"other_value", to_string(s.other_value)},
                     {"threshold", to_string(s.threshold)},
                     {"branch", to_string(s.branch)}});
  }
  return {{"ratio", ratio_to_json(trace.ratio)},
          {"steps", steps},
          {"alice", outcome_to_json(trace.alice)},
          {"bob", outcome_to_json(trace.bob)},
          {"guarantee", trace.guarantee_holds()}};
}

}  // namespace ucake
