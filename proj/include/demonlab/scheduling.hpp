#pragma once

#include <vector>

#include "demonlab/percolation.hpp"
#include "demonlab/sequences.hpp"

namespace demonlab {

enum class Step : std::uint8_t { Right, Up };

// Oriented lattice path from the origin.
struct Path {
  std::vector<Step> steps;
};

// Delay sequences for the two walks. Walk delta occupies state index n
// during [t(n), t(n+1)); the last state is held forever.
struct Schedule {
  std::vector<long> t0;
  std::vector<long> t1;
};

// t_delta(n) = earliest path-step index at which the delta coordinate
// equals n. Output sequences are strictly increasing with t(0)=0.
Schedule path_to_schedule(const Path& path);

// Extract a witness path from the DP table: origin to the farthest
// reachable ring, following stored predecessors. Refuses instances with
// X(0)=Y(0) (a time-0 collision is unavoidable).
Path extract_path(const ReachSet& rs);

// Collision test per the triple definition: collision at (a,n,k) iff
// t_a(n) <= t_b(k) < t_a(n+1) and z_b(k) = z_a(n), with t_a(n+1) = +inf
// for the last n. Returns true iff no collision.
bool verify_no_collision(const ColorSequence& z0, const ColorSequence& z1,
                         const Schedule& sched);

// Binary-variant collision test: collision at (a,n) iff z_a(n)=1 and no k
// has z_b(k)=0 and t_a(n)=t_b(k).
bool verify_binary_schedule(const BitSequence& z0, const BitSequence& z1,
                            const Schedule& sched);

// Timing for an alignment witness: each move is one time tick; a symbol's
// time is the index of the move consuming it. t(0)=0 can fail on one side
// when the witness opens with skips; finite-horizon artifact.
Schedule moves_to_schedule(const std::vector<AlignMove>& moves);

}  // namespace demonlab
