#include "demonlab/scheduling.hpp"

#include <algorithm>
#include <limits>

namespace demonlab {

Schedule path_to_schedule(const Path& path) {
  Schedule s;
  s.t0.push_back(0);
  s.t1.push_back(0);
  long x = 0, y = 0;
  long step_index = 0;
  for (Step st : path.steps) {
    ++step_index;
    if (st == Step::Right) {
      ++x;
      s.t0.push_back(step_index);
    } else {
      ++y;
      s.t1.push_back(step_index);
    }
  }
  return s;
}

Path extract_path(const ReachSet& rs) {
  if (!rs.open(0, 0))
    throw InvalidParameter("extract_path: origin closed, collision at time 0 unavoidable");
  const long far = rs.frontier();
  // Pick a reachable point on the farthest ring.
  long ei = -1, ej = -1;
  for (long i = 0; i <= far && ei < 0; ++i)
    if (rs.reach(i, far)) ei = i, ej = far;
  if (ei < 0)
    for (long j = 0; j <= far && ei < 0; ++j)
      if (rs.reach(far, j)) ei = far, ej = j;
  std::vector<Step> rev;
  long i = ei, j = ej;
  while (!(i == 0 && j == 0)) {
    if (rs.witness(i, j) == Witness::Left) {
      rev.push_back(Step::Right);
      --i;
    } else {
      rev.push_back(Step::Up);
      --j;
    }
  }
  Path p;
  p.steps.assign(rev.rbegin(), rev.rend());
  return p;
}

namespace {

void check_monotone(const std::vector<long>& t) {
  if (t.empty()) throw InvalidParameter("schedule: empty delay sequence");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] <= t[i - 1]) throw InvalidParameter("schedule: not strictly increasing");
}

constexpr long kInf = std::numeric_limits<long>::max();

long next_time(const std::vector<long>& t, std::size_t n) {
  return n + 1 < t.size() ? t[n + 1] : kInf;
}

}  // namespace

bool verify_no_collision(const ColorSequence& z0, const ColorSequence& z1,
                         const Schedule& sched) {
  check_monotone(sched.t0);
  check_monotone(sched.t1);
  if (z0.size() < sched.t0.size() || z1.size() < sched.t1.size())
    throw InvalidParameter("verify_no_collision: schedule exceeds sequences");
  auto collides = [](const ColorSequence& za, const std::vector<long>& ta,
                     const ColorSequence& zb, const std::vector<long>& tb) {
    for (std::size_t n = 0; n < ta.size(); ++n)
      for (std::size_t k = 0; k < tb.size(); ++k)
        if (ta[n] <= tb[k] && tb[k] < next_time(ta, n) && zb[k] == za[n]) return true;
    return false;
  };
  return !collides(z0, sched.t0, z1, sched.t1) && !collides(z1, sched.t1, z0, sched.t0);
}

bool verify_binary_schedule(const BitSequence& z0, const BitSequence& z1,
                            const Schedule& sched) {
  check_monotone(sched.t0);
  check_monotone(sched.t1);
  if (z0.size() < sched.t0.size() || z1.size() < sched.t1.size())
    throw InvalidParameter("verify_binary_schedule: schedule exceeds sequences");
  auto collides = [](const BitSequence& za, const std::vector<long>& ta,
                     const BitSequence& zb, const std::vector<long>& tb) {
    for (std::size_t n = 0; n < ta.size(); ++n) {
      if (za[n] != 1) continue;
      bool matched = false;
      for (std::size_t k = 0; k < tb.size() && !matched; ++k)
        if (zb[k] == 0 && tb[k] == ta[n]) matched = true;
      if (!matched) return true;
    }
    return false;
  };
  return !collides(z0, sched.t0, z1, sched.t1) && !collides(z1, sched.t1, z0, sched.t0);
}

Schedule moves_to_schedule(const std::vector<AlignMove>& moves) {
  Schedule s;
  long t = 0;
  for (AlignMove mv : moves) {
    if (mv == AlignMove::Emit || mv == AlignMove::Skip0) s.t0.push_back(t);
    if (mv == AlignMove::Emit || mv == AlignMove::Skip1) s.t1.push_back(t);
    ++t;
  }
  return s;
}

}  // namespace demonlab
