#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "demonlab/params.hpp"
#include "demonlab/percolation.hpp"
#include "demonlab/sequences.hpp"

namespace demonlab::mazery {

using params::LevelParams;

// Right-closed interval (a, b] on the line; a may be -1.
struct Interval {
  long a = -1;
  long b = 0;
  long size() const { return b - a; }
  bool contains(const Interval& o) const { return a <= o.a && o.b <= b; }
  bool disjoint(const Interval& o) const { return b <= o.a || o.b <= a; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Closed integer rectangle [x0,x1] x [y0,y1].
struct RectI {
  long x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  long size() const { return std::max(x1 - x0, y1 - y0); }
  bool contains(const RectI& o) const {
    return x0 <= o.x0 && o.x1 <= x1 && y0 <= o.y0 && o.y1 <= y1;
  }
};

enum class TrapKind { Base, Uncorrelated, Correlated1, Correlated2, MissingHole };

struct Trap {
  RectI rect;
  TrapKind kind = TrapKind::Base;
  bool boundary = false;  // verdict may depend on values outside the window
};

// Direction of the sequence an object constrains: vertical objects live on
// the x axis (bodies of X-intervals), horizontal ones on the y axis.
enum class Dir : int { Vertical = 0, Horizontal = 1 };

enum class WallKind { Inherited, Emerging, Compound };

struct WallValue {
  Interval body;
  double rank = 0;
  Dir dir = Dir::Vertical;
  bool is_wall = false;  // walls are the designated subset of barriers
  WallKind kind = WallKind::Inherited;
  int emerge_type = 0;              // 1..3 for emerging barriers
  double r1 = 0, r2 = 0;            // compound components
  int comp_i = 0;                   // compound distance class
  bool boundary = false;
};

struct Hole {
  Interval interval;  // transversal projection (a1, a2]
  bool good = false;
};

struct CondProbEstimate {
  double value = 0;
  bool exact = false;
  long samples = 0;
  double lo = 0, hi = 0;  // 95% interval; degenerate when exact
};

// Evaluates P(event(Y-window) | Y(start-1) = s) for a decidable predicate
// of the window values. Exact enumeration of walk continuations when their
// count fits the budget, Monte Carlo with a Wilson interval otherwise.
class CondProbEstimator {
 public:
  long exact_budget = 2000000;
  long mc_samples = 4000;
  std::uint64_t master_seed = 0;
  bool force_monte_carlo = false;
  mutable long fallback_count = 0;

  // pred receives the values at positions [lo, hi]. cond_state is Y(lo-1);
  // pass 0 to condition on the uniform initial distribution instead.
  CondProbEstimate estimate(int m, bool loops, long lo, long hi, int cond_state,
                            const std::function<bool(const std::vector<int>&)>& pred,
                            std::uint64_t object_key) const;
};

class Mazery {
 public:
  int level = 1;
  LevelParams params;
  int m = 2;
  bool loops = false;
  double tau = 1.75;  // rank_star / rank_lb, kept for rank ceiling checks
  long lo = 0, hi = 0;          // window [lo, hi] on both axes
  long core_lo = 0, core_hi = 0;
  ColorSequence x, y;
  std::vector<Trap> traps;
  std::vector<WallValue> bars[2];  // per Dir, sorted by body; walls flagged
  std::shared_ptr<const Mazery> prev;
  std::vector<std::string> erase_log;

  // Verdict for "rect contains a trap" as a function of arbitrary sequence
  // values (locality: depends only on the rect's projections).
  std::function<bool(const ColorSequence&, const ColorSequence&, const RectI&)>
      trap_rule;
  // Optional: recompute the barriers of one direction under a hypothetical
  // sequence; fixtures use this for wall-dependent events.
  std::function<std::vector<WallValue>(const ColorSequence&, Dir)> barrier_rule;

  const ColorSequence& seq(Dir d) const { return d == Dir::Vertical ? x : y; }
  long pad() const;
  bool in_core(const Interval& body) const;
  bool trap_in(const RectI& rect, const ColorSequence* yov = nullptr) const;

  std::vector<const WallValue*> walls(Dir d) const;

  // One-dimensional cleanness of an endpoint of I, per the recursive rules.
  bool end_clean(Dir d, const Interval& I, bool left_end, bool strong,
                 const ColorSequence* yov = nullptr) const;
  bool point_side_clean(Dir d, long p, bool left_side, bool strong,
                        const ColorSequence* yov = nullptr) const;
  bool point_clean(Dir d, long p, bool strong = false,
                   const ColorSequence* yov = nullptr) const;

  // Trap-cleanness of a rectangle corner (lower-left or upper-right).
  bool trap_clean(const RectI& q, bool lower_left,
                  const ColorSequence* yov = nullptr) const;
  // H-cleanness: trap-clean plus strong cleanness of the x projection.
  bool h_clean(const RectI& q, bool lower_left,
               const ColorSequence* yov = nullptr) const;
  bool corner_clean(const RectI& q, bool lower_left,
                    const ColorSequence* yov = nullptr) const;
  // Upper-right (resp. lower-left) cleanness of a point, via the size-Delta
  // minimum of the monotone cleanness relations.
  bool point_clean_2d(long px, long py, bool upper_right,
                      const ColorSequence* yov = nullptr) const;

  bool interval_hop(Dir d, const Interval& I,
                    const ColorSequence* yov = nullptr) const;
  bool rect_hop(const RectI& q, const ColorSequence* yov = nullptr) const;
  bool wall_dominant(const WallValue& w) const;
};

Mazery base_mazery(const ColorSequence& x, const ColorSequence& y, long window,
                   double w);
Mazery base_mazery(const ColorSequence& x, const ColorSequence& y, long window,
                   const LevelParams& lp);

std::vector<Trap> detect_uncorrelated(const Mazery& M);
std::vector<Trap> detect_correlated(const Mazery& M, const CondProbEstimator& est);
std::vector<Trap> detect_missing_hole(const Mazery& M, const CondProbEstimator& est);
std::vector<WallValue> derive_emerging(const Mazery& M, const CondProbEstimator& est);
std::vector<WallValue> derive_compound(const Mazery& M,
                                       const std::vector<WallValue>& emerging);
Mazery scale_up(const Mazery& M, const CondProbEstimator& est,
                const LevelParams& params_next);

std::optional<Hole> find_hole(const Mazery& M, const WallValue& wall,
                              const Interval& search,
                              const ColorSequence* yov = nullptr);

struct ConditionCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  bool all_pass() const;
};

ConditionReport check_conditions(const Mazery& M, RngStream sampler);

struct DiagLine {
  std::string name;
  double estimate = 0;
  double lo = 0, hi = 0;
  double bound = 0;
  std::string verdict;  // pass / indeterminate / fail
};

std::vector<DiagLine> probability_diagnostics(const Mazery& M, long trials,
                                              RngStream stream);

std::string dump(const Mazery& M);

}  // namespace demonlab::mazery
