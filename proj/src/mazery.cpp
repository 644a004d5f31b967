#include "demonlab/mazery.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_set>

namespace demonlab::mazery {

namespace {

long iceil(double v) { return static_cast<long>(std::ceil(v - 1e-9)); }

long dist_point_rect(long px, long py, const RectI& r) {
  const long dx = px < r.x0 ? r.x0 - px : (px > r.x1 ? px - r.x1 : 0);
  const long dy = py < r.y0 ? r.y0 - py : (py > r.y1 ? py - r.y1 : 0);
  return std::max(dx, dy);
}

void wilson(long k, long n, double& lo, double& hi) {
  const double z = 1.959963984540054;
  const double p = static_cast<double>(k) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n)) / denom;
  lo = std::max(0.0, center - half);
  hi = std::min(1.0, center + half);
}

bool body_less(const WallValue& a, const WallValue& b) {
  if (a.body.a != b.body.a) return a.body.a < b.body.a;
  if (a.body.b != b.body.b) return a.body.b < b.body.b;
  return a.rank < b.rank;
}

int comp_distance_class(long d) {
  static const std::vector<long long> table =
      params::distance_classes(params::ExponentSet{}, 64);
  int i = 0;
  while (i + 1 < static_cast<int>(table.size()) && table[i + 1] <= d) ++i;
  return i;
}

}  // namespace

bool ConditionReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

CondProbEstimate CondProbEstimator::estimate(
    int m, bool loops, long lo, long hi, int cond_state,
    const std::function<bool(const std::vector<int>&)>& pred,
    std::uint64_t object_key) const {
  if (hi < lo) throw InvalidParameter("estimate: empty window");
  const long len = hi - lo + 1;
  const int branch = loops ? m : m - 1;
  if (branch < 1) throw InvalidParameter("estimate: no moves available");

  double count = 1;
  for (long i = 0; i < len; ++i) {
    count *= (i == 0 && cond_state == 0) ? m : branch;
    if (count > static_cast<double>(exact_budget)) break;
  }

  CondProbEstimate out;
  if (!force_monte_carlo && count <= static_cast<double>(exact_budget)) {
    std::vector<int> vals(static_cast<std::size_t>(len));
    double total = 0;
    // depth-first over walk continuations, weight = product of step probs
    std::function<void(long, int, double)> rec = [&](long i, int cur,
                                                     double wgt) {
      if (i == len) {
        if (pred(vals)) total += wgt;
        return;
      }
      if (i == 0 && cur == 0) {
        for (int c = 1; c <= m; ++c) {
          vals[0] = c;
          rec(1, c, wgt / m);
        }
        return;
      }
      for (int c = 1; c <= m; ++c) {
        if (!loops && c == cur) continue;
        vals[static_cast<std::size_t>(i)] = c;
        rec(i + 1, c, wgt / branch);
      }
    };
    rec(0, cond_state, 1.0);
    out.value = total;
    out.exact = true;
    out.lo = out.hi = total;
    return out;
  }

  if (!force_monte_carlo) ++fallback_count;
  RngStream stream(master_seed, object_key);
  long hits = 0;
  std::vector<int> vals(static_cast<std::size_t>(len));
  for (long t = 0; t < mc_samples; ++t) {
    int cur = cond_state;
    for (long i = 0; i < len; ++i) {
      if (i == 0 && cur == 0)
        cur = static_cast<int>(
                  stream.uniform_below(static_cast<std::uint64_t>(m))) +
              1;
      else
        cur = walk_step(m, loops, cur, stream);
      vals[static_cast<std::size_t>(i)] = cur;
    }
    if (pred(vals)) ++hits;
  }
  out.value = static_cast<double>(hits) / mc_samples;
  out.exact = false;
  out.samples = mc_samples;
  wilson(hits, mc_samples, out.lo, out.hi);
  return out;
}

long Mazery::pad() const {
  const double gp = 2.2 * params.g;
  return iceil(std::max(4 * gp + 4 * params.delta, params.f) + params.delta);
}

bool Mazery::in_core(const Interval& body) const {
  return core_lo <= body.a && body.b <= core_hi;
}

bool Mazery::trap_in(const RectI& rect, const ColorSequence* yov) const {
  if (yov && trap_rule) return trap_rule(x, *yov, rect);
  if (level == 1) {
    const ColorSequence& ys = yov ? *yov : y;
    for (long j = rect.y0; j <= rect.y1; ++j)
      for (long i = rect.x0; i <= rect.x1; ++i)
        if (x[static_cast<std::size_t>(i)] == ys[static_cast<std::size_t>(j)])
          return true;
    return false;
  }
  for (const Trap& t : traps)
    if (rect.contains(t.rect)) return true;
  return false;
}

std::vector<const WallValue*> Mazery::walls(Dir d) const {
  std::vector<const WallValue*> out;
  for (const auto& w : bars[static_cast<int>(d)])
    if (w.is_wall) out.push_back(&w);
  return out;
}

bool Mazery::end_clean(Dir d, const Interval& I, bool left_end, bool strong,
                       const ColorSequence* yov) const {
  if (!prev) return true;
  if (!prev->end_clean(d, I, left_end, strong, yov)) return false;
  const double third = prev->params.f / 3.0;
  const long p = left_end ? I.a : I.b;
  auto offending = [&](const WallValue& w) {
    if (!strong && !w.is_wall) return false;  // weak: walls only
    if (!I.contains(w.body)) return false;
    const long e = left_end ? w.body.a : w.body.b;
    return std::abs(e - p) < third;
  };
  if (yov && d == Dir::Horizontal && prev->barrier_rule) {
    for (const auto& w : prev->barrier_rule(*yov, d))
      if (offending(w)) return false;
    return true;
  }
  for (const auto& w : prev->bars[static_cast<int>(d)])
    if (offending(w)) return false;
  return true;
}

bool Mazery::point_side_clean(Dir d, long p, bool left_side, bool strong,
                              const ColorSequence* yov) const {
  // cleanness is monotone with its minimum at interval size Delta
  const long D = iceil(params.delta);
  if (left_side) return end_clean(d, {p - D, p}, false, strong, yov);
  return end_clean(d, {p, p + D}, true, strong, yov);
}

bool Mazery::point_clean(Dir d, long p, bool strong,
                         const ColorSequence* yov) const {
  return point_side_clean(d, p, true, strong, yov) &&
         point_side_clean(d, p, false, strong, yov);
}

bool Mazery::trap_clean(const RectI& q, bool lower_left,
                        const ColorSequence* yov) const {
  if (!prev) return true;
  if (!prev->trap_clean(q, lower_left, yov)) return false;
  const long g = iceil(prev->params.g);
  const long px = lower_left ? q.x0 : q.x1;
  const long py = lower_left ? q.y0 : q.y1;
  if (prev->level == 1) {
    const ColorSequence& ys = yov ? *yov : prev->y;
    const long ix0 = std::max(q.x0, px - g + 1);
    const long ix1 = std::min(q.x1, px + g - 1);
    const long iy0 = std::max(q.y0, py - g + 1);
    const long iy1 = std::min(q.y1, py + g - 1);
    for (long j = iy0; j <= iy1; ++j)
      for (long i = ix0; i <= ix1; ++i)
        if (prev->x[static_cast<std::size_t>(i)] ==
            ys[static_cast<std::size_t>(j)])
          return false;
    return true;
  }
  for (const Trap& t : prev->traps)
    if (q.contains(t.rect) && dist_point_rect(px, py, t.rect) < g) return false;
  return true;
}

bool Mazery::h_clean(const RectI& q, bool lower_left,
                     const ColorSequence* yov) const {
  if (!trap_clean(q, lower_left, yov)) return false;
  const Interval px{q.x0, q.x1};
  return end_clean(Dir::Vertical, px, lower_left, true, yov);
}

bool Mazery::corner_clean(const RectI& q, bool lower_left,
                          const ColorSequence* yov) const {
  if (!trap_clean(q, lower_left, yov)) return false;
  const Interval px{q.x0, q.x1}, py{q.y0, q.y1};
  return end_clean(Dir::Vertical, px, lower_left, false, yov) &&
         end_clean(Dir::Horizontal, py, lower_left, false, yov);
}

bool Mazery::point_clean_2d(long px, long py, bool upper_right,
                            const ColorSequence* yov) const {
  const long D = iceil(params.delta);
  if (upper_right) {
    RectI q{px, py, px + D, py + D};
    return trap_clean(q, true, yov) &&
           point_side_clean(Dir::Vertical, px, false, false, yov) &&
           point_side_clean(Dir::Horizontal, py, false, false, yov);
  }
  RectI q{px - D, py - D, px, py};
  return trap_clean(q, false, yov) &&
         point_side_clean(Dir::Vertical, px, true, false, yov) &&
         point_side_clean(Dir::Horizontal, py, true, false, yov);
}

bool Mazery::interval_hop(Dir d, const Interval& I,
                          const ColorSequence* yov) const {
  if (!end_clean(d, I, true, false, yov) || !end_clean(d, I, false, false, yov))
    return false;
  for (const auto& w : bars[static_cast<int>(d)])
    if (w.is_wall && !I.disjoint(w.body)) return false;
  return true;
}

bool Mazery::rect_hop(const RectI& q, const ColorSequence* yov) const {
  if (!corner_clean(q, true, yov) || !corner_clean(q, false, yov)) return false;
  if (trap_in(q, yov)) return false;
  const Interval ix{q.x0 - 1, q.x1}, iy{q.y0 - 1, q.y1};
  for (const auto& w : bars[0])
    if (w.is_wall && !ix.disjoint(w.body)) return false;
  for (const auto& w : bars[1])
    if (w.is_wall && !iy.disjoint(w.body)) return false;
  return true;
}

bool Mazery::wall_dominant(const WallValue& w) const {
  if (!w.is_wall) return false;
  const long D = iceil(params.delta);
  auto walls_d = walls(w.dir);
  // every wall meeting w must be contained in it
  for (const auto* o : walls_d)
    if (o != &w && !(o->body == w.body) && !o->body.disjoint(w.body) &&
        !w.body.contains(o->body))
      return false;
  auto wall_free = [&](long from, long to) {  // cells (from, to]
    for (const auto* o : walls_d) {
      if (o->body == w.body) continue;
      if (w.body.contains(o->body)) continue;
      if (!(to <= o->body.a || o->body.b <= from)) return false;
    }
    return true;
  };
  const bool left_ok =
      w.body.a - D <= lo - 1 || wall_free(w.body.a - D, w.body.a);
  const bool right_ok = w.body.b + D > hi || wall_free(w.body.b, w.body.b + D);
  return left_ok && right_ok;
}

Mazery base_mazery(const ColorSequence& xs, const ColorSequence& ys,
                   long window, const LevelParams& lp) {
  if (window < 2) throw InvalidParameter("base_mazery: window too small");
  if (xs.size() < static_cast<std::size_t>(window + 1) ||
      ys.size() < static_cast<std::size_t>(window + 1))
    throw InvalidParameter("base_mazery: sequences shorter than window");
  if (xs.m < 2) throw InvalidParameter("base_mazery: need at least two colors");
  if (!(lp.w > 1.0 / (xs.m - 1) && lp.w < 1.0))
    throw InvalidParameter("base_mazery: need 1/(m-1) < w < 1");
  Mazery M;
  M.level = 1;
  M.params = lp;
  M.m = xs.m;
  M.loops = xs.loops;
  M.tau = lp.rank_star > 0 && lp.rank_lb > 0 ? lp.rank_star / lp.rank_lb : 1.75;
  M.lo = 0;
  M.hi = window;
  M.x = xs;
  M.y = ys;
  M.core_lo = M.lo + M.pad();
  M.core_hi = M.hi - M.pad();
  for (long j = 0; j <= window; ++j)
    for (long i = 0; i <= window; ++i)
      if (xs[static_cast<std::size_t>(i)] == ys[static_cast<std::size_t>(j)])
        M.traps.push_back({{i, j, i, j}, TrapKind::Base, false});
  M.trap_rule = [](const ColorSequence& xx, const ColorSequence& yy,
                   const RectI& rect) {
    for (long j = rect.y0; j <= rect.y1; ++j)
      for (long i = rect.x0; i <= rect.x1; ++i)
        if (xx[static_cast<std::size_t>(i)] == yy[static_cast<std::size_t>(j)])
          return true;
    return false;
  };
  return M;
}

Mazery base_mazery(const ColorSequence& xs, const ColorSequence& ys,
                   long window, double w) {
  LevelParams lp;
  lp.level = 1;
  lp.rank_lb = 60;
  lp.rank_star = 105;
  lp.rank_hat = 150;
  lp.delta = 1;
  lp.delta_star = 12;
  lp.f = 4;
  lp.g = 2;
  lp.g_prime = 4.4;
  lp.lambda1 = 7;
  lp.lambda2 = 5;
  lp.len1 = 28;
  lp.len2 = 20;
  lp.len3 = 2;
  lp.w = w;
  lp.sigma = 0;
  lp.q = 0.05;
  lp.log2_T = 30;
  lp.T = std::exp2(30);
  lp.p_bar = std::exp2(-30);
  return base_mazery(xs, ys, window, lp);
}

std::vector<Trap> detect_uncorrelated(const Mazery& M) {
  std::vector<Trap> out;
  const long f = iceil(M.params.f);
  std::vector<const Trap*> ts;
  ts.reserve(M.traps.size());
  for (const auto& t : M.traps) ts.push_back(&t);
  std::sort(ts.begin(), ts.end(), [](const Trap* a, const Trap* b) {
    if (a->rect.x0 != b->rect.x0) return a->rect.x0 < b->rect.x0;
    return a->rect.y0 < b->rect.y0;
  });
  std::unordered_set<std::uint64_t> seen;
  auto key_of = [](const RectI& r) {
    return (static_cast<std::uint64_t>(r.x0 + 1) << 40) ^
           (static_cast<std::uint64_t>(r.y0 + 1) << 16) ^
           (static_cast<std::uint64_t>(r.x1 - r.x0) << 8) ^
           static_cast<std::uint64_t>(r.y1 - r.y0);
  };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t k = i + 1; k < ts.size(); ++k) {
      const RectI& a = ts[i]->rect;
      const RectI& b = ts[k]->rect;
      if (b.x0 - a.x0 > f) break;  // sorted by starting point
      if (std::abs(b.y0 - a.y0) > f) continue;
      const bool xdisj = a.x1 < b.x0 || b.x1 < a.x0;
      const bool ydisj = a.y1 < b.y0 || b.y1 < a.y0;
      if (!xdisj || !ydisj) continue;
      RectI r{std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
              std::max(a.y1, b.y1)};
      if (!seen.insert(key_of(r)).second) continue;
      Trap t{r, TrapKind::Uncorrelated, false};
      t.boundary = !(M.core_lo <= r.x0 && r.x1 <= M.core_hi &&
                     M.core_lo <= r.y0 && r.y1 <= M.core_hi);
      out.push_back(t);
    }
  }
  return out;
}

namespace {

// Exact distribution of the set of colors visited over `len` walk steps,
// conditioned on the preceding state (0 = uniform start).
std::vector<double> colorset_dist(int m, bool loops, long len, int cond) {
  const std::size_t nsets = 1u << m;
  std::vector<double> cur(static_cast<std::size_t>(m + 1) * nsets, 0.0);
  auto idx = [&](int c, unsigned s) {
    return static_cast<std::size_t>(c) * nsets + s;
  };
  const int branch = loops ? m : m - 1;
  if (cond == 0) {
    for (int c = 1; c <= m; ++c) cur[idx(c, 1u << (c - 1))] = 1.0 / m;
  } else {
    for (int c = 1; c <= m; ++c) {
      if (!loops && c == cond) continue;
      cur[idx(c, 1u << (c - 1))] += 1.0 / branch;
    }
  }
  for (long step = 1; step < len; ++step) {
    std::vector<double> nxt(cur.size(), 0.0);
    for (int c = 1; c <= m; ++c)
      for (unsigned s = 0; s < nsets; ++s) {
        const double p = cur[idx(c, s)];
        if (p == 0) continue;
        for (int c2 = 1; c2 <= m; ++c2) {
          if (!loops && c2 == c) continue;
          nxt[idx(c2, s | (1u << (c2 - 1)))] += p / branch;
        }
      }
    cur.swap(nxt);
  }
  std::vector<double> dist(nsets, 0.0);
  for (int c = 1; c <= m; ++c)
    for (unsigned s = 0; s < nsets; ++s) dist[s] += cur[idx(c, s)];
  return dist;
}

// Every right-closed lam-subinterval of closed [u, v] contains a marked
// position.
bool gaps_covered(const std::vector<char>& present, long u, long v, long lam) {
  long last = u - 1;
  for (long i = u; i <= v; ++i) {
    if (!present[static_cast<std::size_t>(i)]) continue;
    if (i - last > lam) return false;
    last = i;
  }
  return v - last < lam;
}

struct CondCache {
  // condsup[j][pos]: sup over the preceding state of the conditional
  // probability of the covering event for the closed interval
  // [pos, pos+L[j]] along the given axis.
  std::vector<double> condsup[2];
  long L[2] = {0, 0};
  long lam[2] = {0, 0};
};

void fill_lengths(const Mazery& M, CondCache& cc) {
  const long D = iceil(M.params.delta);
  cc.lam[0] = 7 * D;
  cc.lam[1] = iceil(2.2 * M.params.g);
  cc.L[0] = 4 * cc.lam[0];
  cc.L[1] = 4 * cc.lam[1];
}

// First-level conditionals are exact: whether a cell column contains a trap
// depends on the transversal window only through the set of colors it
// visits, so we integrate the covering event against the color-set
// distribution of the walk.
CondCache level1_conditionals(const Mazery& M, Dir axis) {
  CondCache cc;
  fill_lengths(M, cc);
  const ColorSequence& a = M.seq(axis);
  const long n = M.hi;
  const long D = iceil(M.params.delta);
  const std::size_t nsets = 1u << M.m;
  std::vector<std::vector<double>> dist(static_cast<std::size_t>(M.m) + 1);
  for (int s = 1; s <= M.m; ++s)
    dist[static_cast<std::size_t>(s)] =
        colorset_dist(M.m, M.loops, 5 * D + 1, s);
  std::vector<char> present(static_cast<std::size_t>(n + 1), 0);
  for (int j = 0; j < 2; ++j) {
    const long L = cc.L[j];
    if (L > n) continue;
    cc.condsup[j].assign(static_cast<std::size_t>(n - L + 1), 0.0);
    std::vector<char> holds(nsets, 0);
    for (long pos = 0; pos + L <= n; ++pos) {
      for (unsigned s = 0; s < nsets; ++s) {
        for (long i = pos; i <= pos + L; ++i)
          present[static_cast<std::size_t>(i)] =
              (s >> (a[static_cast<std::size_t>(i)] - 1)) & 1;
        holds[s] = gaps_covered(present, pos, pos + L, cc.lam[j]) ? 1 : 0;
      }
      double best = 0;
      for (int st = 1; st <= M.m; ++st) {
        double p = 0;
        const auto& d = dist[static_cast<std::size_t>(st)];
        for (unsigned s = 0; s < nsets; ++s)
          if (holds[s]) p += d[s];
        best = std::max(best, p);
      }
      cc.condsup[j][static_cast<std::size_t>(pos)] = best;
    }
  }
  return cc;
}

// Conditional covering probability for general levels through the trap rule
// of the structure; only column traps register, which matches the fixtures
// that exercise this path.
double general_condsup(const Mazery& M, const CondProbEstimator& est, Dir axis,
                       long pos, long L, long lam, std::uint64_t key) {
  if (!M.trap_rule) return 0.0;
  const long D = iceil(M.params.delta);
  const long len = 5 * D;
  double best = 0;
  for (int s = 1; s <= M.m; ++s) {
    auto pred = [&](const std::vector<int>& vals) {
      ColorSequence hyp;
      hyp.m = M.m;
      hyp.loops = M.loops;
      hyp.values.assign(vals.begin(), vals.end());
      for (long c = pos - 1; c <= pos + L - lam; ++c) {
        bool found = false;
        for (long i = std::max(pos, c + 1);
             !found && i <= std::min(pos + L, c + lam); ++i) {
          RectI cell{i, 0, i, len};
          found = axis == Dir::Vertical ? M.trap_rule(M.x, hyp, cell)
                                        : M.trap_rule(hyp, M.y, cell);
        }
        if (!found) return false;
      }
      return true;
    };
    best = std::max(
        best, est.estimate(M.m, M.loops, 0, len, s, pred,
                           key * 131 + static_cast<std::uint64_t>(s))
                  .value);
  }
  return best;
}

// Prefix counts of uncovered lam-subintervals, per transversal offset b.
// bad(c) refers to the subinterval (c, c+lam]; pb[c+2] accumulates over
// sentinel c = -1 upward.
std::vector<long> bad_prefix(const std::vector<char>& present, long n,
                             long lam) {
  std::vector<long> nxt(static_cast<std::size_t>(n + 2), n + 1);
  for (long i = n; i >= 0; --i)
    nxt[static_cast<std::size_t>(i)] =
        present[static_cast<std::size_t>(i)] ? i
                                             : nxt[static_cast<std::size_t>(i + 1)];
  std::vector<long> pb(static_cast<std::size_t>(n + 3), 0);
  for (long c = -1; c <= n; ++c) {
    const bool bad =
        c + 1 <= n ? nxt[static_cast<std::size_t>(c + 1)] - c > lam : true;
    pb[static_cast<std::size_t>(c + 2)] =
        pb[static_cast<std::size_t>(c + 1)] + (bad ? 1 : 0);
  }
  return pb;
}

}  // namespace

std::vector<Trap> detect_correlated(const Mazery& M,
                                    const CondProbEstimator& est) {
  std::vector<Trap> out;
  const long D = iceil(M.params.delta);
  const double w2 = M.params.w * M.params.w;
  const long n = M.hi;
  const bool exact = M.level == 1 && M.m <= 16;
  for (int ori = 0; ori < 2; ++ori) {
    const Dir axis = ori == 0 ? Dir::Vertical : Dir::Horizontal;
    const ColorSequence& a = M.seq(axis);
    const ColorSequence& t = M.seq(ori == 0 ? Dir::Horizontal : Dir::Vertical);
    CondCache cc;
    if (exact)
      cc = level1_conditionals(M, axis);
    else
      fill_lengths(M, cc);
    for (int j = 0; j < 2; ++j) {
      const long L = cc.L[j], lam = cc.lam[j];
      if (L > n) continue;
      std::vector<char> present(static_cast<std::size_t>(n + 1), 0);
      std::vector<int> counts(static_cast<std::size_t>(M.m + 1), 0);
      for (long b = 0; b + 5 * D <= n; ++b) {
        if (M.level == 1) {
          if (b == 0) {
            for (long p = 0; p <= 5 * D; ++p)
              ++counts[static_cast<std::size_t>(t[static_cast<std::size_t>(p)])];
          } else {
            --counts[static_cast<std::size_t>(t[static_cast<std::size_t>(b - 1)])];
            ++counts[static_cast<std::size_t>(
                t[static_cast<std::size_t>(b + 5 * D)])];
          }
          for (long i = 0; i <= n; ++i)
            present[static_cast<std::size_t>(i)] =
                counts[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])] >
                0;
        } else {
          std::fill(present.begin(), present.end(), 0);
          for (const Trap& tr : M.traps) {
            const long tx0 = ori == 0 ? tr.rect.x0 : tr.rect.y0;
            const long tx1 = ori == 0 ? tr.rect.x1 : tr.rect.y1;
            const long ty0 = ori == 0 ? tr.rect.y0 : tr.rect.x0;
            const long ty1 = ori == 0 ? tr.rect.y1 : tr.rect.x1;
            if (ty0 >= b && ty1 <= b + 5 * D && tx0 == tx1)
              present[static_cast<std::size_t>(tx0)] = 1;
          }
        }
        auto pb = bad_prefix(present, n, lam);
        for (long pos = 0; pos + L <= n; ++pos) {
          // subinterval starts c range over [pos-1, pos+L-lam]
          if (pb[static_cast<std::size_t>(pos + L - lam + 2)] -
                  pb[static_cast<std::size_t>(pos)] !=
              0)
            continue;
          double sup;
          if (exact) {
            sup = cc.condsup[j][static_cast<std::size_t>(pos)];
          } else {
            const std::uint64_t key =
                ((static_cast<std::uint64_t>(ori * 2 + j) * 8192 +
                  static_cast<std::uint64_t>(pos)) *
                 8192) +
                static_cast<std::uint64_t>(b);
            sup = general_condsup(M, est, axis, pos, L, lam, key);
          }
          if (sup > w2) continue;
          RectI r = ori == 0 ? RectI{pos, b, pos + L, b + 5 * D}
                             : RectI{b, pos, b + 5 * D, pos + L};
          Trap tr{r, j == 0 ? TrapKind::Correlated1 : TrapKind::Correlated2,
                  false};
          tr.boundary = !(M.core_lo <= r.x0 && r.x1 <= M.core_hi &&
                          M.core_lo <= r.y0 && r.y1 <= M.core_hi);
          out.push_back(tr);
        }
      }
    }
  }
  return out;
}

std::optional<Hole> find_hole(const Mazery& M, const WallValue& wall,
                              const Interval& search,
                              const ColorSequence* yov) {
  const long D = iceil(M.params.delta);
  const long u = wall.body.a, v = wall.body.b;
  if (u < 0 || v > M.hi) return std::nullopt;
  const bool horiz = wall.dir == Dir::Horizontal;
  const long a_lo = std::max(search.a, 0L);
  const long b_hi = std::min(search.b, M.hi);
  std::optional<Hole> first;
  for (long a1 = a_lo; a1 < b_hi; ++a1) {
    for (long a2 = a1 + 1; a2 <= std::min(b_hi, a1 + (v - u)); ++a2) {
      bool crossing;
      if (horiz) {
        const ColorSequence& ys = yov ? *yov : M.y;
        crossing = reachable_in_rect(
            M.x, ys, {{a1, u}, {a2, v}, RectKind::LeftOpen}, true);
      } else {
        const ColorSequence& xs = yov ? *yov : M.x;
        crossing = reachable_in_rect(
            xs, M.y, {{u, a1}, {v, a2}, RectKind::BottomOpen}, true);
      }
      if (!crossing) continue;
      bool good;
      if (horiz) {
        // hole on the x axis: trap-cleanness plus strong cleanness of the
        // x projection at both crossing endpoints
        good = M.h_clean({a1 - D, u - D, a1, u}, false, yov) &&
               M.h_clean({a2, v, a2 + D, v + D}, true, yov);
      } else {
        auto v_clean = [&](const RectI& q, bool ll) {
          return M.trap_clean(q, ll) &&
                 M.end_clean(Dir::Horizontal, {q.y0, q.y1}, ll, true);
        };
        good = v_clean({u - D, a1 - D, u, a1}, false) &&
               v_clean({v, a2, v + D, a2 + D}, true);
      }
      if (good) return Hole{{a1, a2}, true};
      if (!first) first = Hole{{a1, a2}, false};
    }
  }
  return first;
}

std::vector<Trap> detect_missing_hole(const Mazery& M,
                                      const CondProbEstimator& est) {
  std::vector<Trap> out;
  const long D = iceil(M.params.delta);
  const long G = iceil(M.params.g);
  const double w2 = M.params.w * M.params.w;
  const long n = M.hi;
  for (int ori = 0; ori < 2; ++ori) {
    const Dir wall_dir = ori == 0 ? Dir::Horizontal : Dir::Vertical;
    if (M.bars[static_cast<int>(wall_dir)].empty() && !M.barrier_rule)
      continue;
    auto realized_l3 = [&](long pos, long b, const ColorSequence* yov) {
      std::vector<WallValue> hyp_bars;
      const std::vector<WallValue>* list = &M.bars[static_cast<int>(wall_dir)];
      if (yov && M.barrier_rule) {
        hyp_bars = M.barrier_rule(*yov, wall_dir);
        list = &hyp_bars;
      }
      for (const auto& wv : *list) {
        if (wv.rank >= M.params.rank_star) continue;  // light only
        if (wv.body.a != b + D || wv.body.b > b + 3 * D) continue;
        auto hole = find_hole(M, wv, {pos + D - 1, pos + G - D}, yov);
        if (!hole || !hole->good) return true;
      }
      return false;
    };
    for (long pos = 0; pos + G <= n; ++pos) {
      for (long b = 0; b + 3 * D <= n; ++b) {
        if (!realized_l3(pos, b, nullptr)) continue;
        double sup = 0;
        for (int s = 1; s <= M.m; ++s) {
          auto pred = [&](const std::vector<int>& vals) {
            ColorSequence hyp = ori == 0 ? M.y : M.x;
            for (long i = 0; i < static_cast<long>(vals.size()); ++i)
              hyp.values[static_cast<std::size_t>(b + i)] =
                  vals[static_cast<std::size_t>(i)];
            return realized_l3(pos, b, &hyp);
          };
          const std::uint64_t key =
              ((static_cast<std::uint64_t>(ori) * 8192 +
                static_cast<std::uint64_t>(pos)) *
                   8192 +
               static_cast<std::uint64_t>(b)) *
                  17 +
              static_cast<std::uint64_t>(s);
          auto e = est.estimate(M.m, M.loops, b, b + 3 * D, s, pred, key);
          sup = std::max(sup, e.value);
        }
        if (sup > w2) continue;
        RectI r = ori == 0 ? RectI{pos, b, pos + G, b + 3 * D}
                           : RectI{b, pos, b + 3 * D, pos + G};
        Trap t{r, TrapKind::MissingHole, false};
        t.boundary = !(M.core_lo <= r.x0 && r.x1 <= M.core_hi &&
                       M.core_lo <= r.y0 && r.y1 <= M.core_hi);
        out.push_back(t);
      }
    }
  }
  return out;
}

std::vector<WallValue> derive_emerging(const Mazery& M,
                                       const CondProbEstimator& est) {
  std::vector<WallValue> out;
  const long D = iceil(M.params.delta);
  const long G = iceil(M.params.g);
  const double w2 = M.params.w * M.params.w;
  const long n = M.hi;
  const bool exact = M.level == 1 && M.m <= 16;

  for (int di = 0; di < 2; ++di) {
    const Dir dir = static_cast<Dir>(di);
    CondCache cc;
    if (exact)
      cc = level1_conditionals(M, dir);
    else
      fill_lengths(M, cc);

    auto heavy_walls = [&]() {
      std::vector<Interval> hv;
      for (const auto& w : M.bars[di])
        if (w.is_wall && w.rank >= M.params.rank_star) hv.push_back(w.body);
      return hv;
    }();

    auto pre_wall_ok = [&](const Interval& body) {
      // (a) the body is a hop, or a dominant light wall flanked by hops
      bool a_ok = M.interval_hop(dir, body);
      if (!a_ok) {
        for (const auto& w : M.bars[di]) {
          if (!w.is_wall || w.rank >= M.params.rank_star) continue;
          if (!body.contains(w.body) || !M.wall_dominant(w)) continue;
          const Interval left{body.a, w.body.a}, right{w.body.b, body.b};
          const bool lok = left.size() == 0 || M.interval_hop(dir, left);
          const bool rok = right.size() == 0 || M.interval_hop(dir, right);
          if (lok && rok) {
            a_ok = true;
            break;
          }
        }
      }
      if (!a_ok) return false;
      // (b) each end borders a wall or an external hop of size >= Delta
      auto end_ok = [&](long e, bool left) {
        for (const auto& w : M.bars[di])
          if (w.is_wall && (left ? w.body.b == e : w.body.a == e)) return true;
        const Interval adj = left ? Interval{e - D, e} : Interval{e, e + D};
        if (adj.a < M.lo - 1 || adj.b > M.hi) return true;  // window edge
        return M.interval_hop(dir, adj);
      };
      return end_ok(body.a, true) && end_ok(body.b, false);
    };

    auto emit = [&](const Interval& body, int type) {
      WallValue wv;
      wv.body = body;
      wv.rank = M.params.rank_hat;
      wv.dir = dir;
      wv.kind = WallKind::Emerging;
      wv.emerge_type = type;
      wv.boundary = !M.in_core(body);
      out.push_back(wv);
    };

    for (int j = 0; j < 2; ++j) {
      const long L = cc.L[j], lam = cc.lam[j];
      if (L > n) continue;
      std::vector<double> condsup;
      if (exact) {
        condsup = cc.condsup[j];
      } else {
        condsup.assign(static_cast<std::size_t>(n - L + 1), 0.0);
        for (long p = 0; p + L <= n; ++p)
          condsup[static_cast<std::size_t>(p)] = general_condsup(
              M, est, dir, p, L, lam,
              0xE4E26ULL + static_cast<std::uint64_t>(j * 100000 + p));
      }
      for (long len = L; len <= L + 4 * D; ++len) {
        for (long u = -1; u + len <= n; ++u) {
          const long v = u + len;
          bool found = false;
          for (long up = std::max(0L, u + 1); up <= u + 2 * D && !found; ++up) {
            const long vp = up + L;
            if (vp > v || vp <= v - 2 * D || vp > n) continue;
            if (condsup[static_cast<std::size_t>(up)] > w2) found = true;
          }
          if (!found) continue;
          if (!pre_wall_ok({u, v})) continue;
          emit({u, v}, j + 1);
        }
      }
    }

    // type 3: a light potential wall across the transversal direction with
    // no good hole; needs a barrier rule for hypothetical sequences
    if (M.barrier_rule) {
      const Dir tdir = dir == Dir::Vertical ? Dir::Horizontal : Dir::Vertical;
      auto cond3 = [&](long up) {
        double sup = 0;
        for (int s = 1; s <= M.m; ++s) {
          auto pred = [&](const std::vector<int>& vals) {
            ColorSequence hyp = dir == Dir::Vertical ? M.y : M.x;
            hyp.values[0] = s;
            for (long i = 0; i < static_cast<long>(vals.size()); ++i)
              hyp.values[static_cast<std::size_t>(1 + i)] =
                  vals[static_cast<std::size_t>(i)];
            for (const auto& wv : M.barrier_rule(hyp, tdir)) {
              if (wv.rank >= M.params.rank_star) continue;
              if (wv.body.a != 1 + D || wv.body.b > 1 + 3 * D) continue;
              auto hole = find_hole(M, wv, {up + D - 1, up + G - D}, &hyp);
              if (!hole || !hole->good) return true;
            }
            return false;
          };
          sup = std::max(
              sup, est.estimate(M.m, M.loops, 1, 1 + 3 * D, s, pred,
                                0x373ULL + static_cast<std::uint64_t>(
                                               up * 64 + s + di * 7))
                       .value);
        }
        return sup;
      };
      for (long len = G; len <= G + 4 * D; ++len) {
        for (long u = -1; u + len <= n; ++u) {
          const long v = u + len;
          bool found = false;
          for (long up = std::max(0L, u + 1); up <= u + 2 * D && !found; ++up) {
            const long vp = up + G;
            if (vp > v || vp <= v - 2 * D || vp > n) continue;
            if (cond3(up) > w2) found = true;
          }
          if (!found) continue;
          if (!pre_wall_ok({u, v})) continue;
          emit({u, v}, 3);
        }
      }
    }

    // designation: greedy in type order 1, 3, 2, then window order, keeping
    // the chosen walls disjoint from each other and from the heavy walls
    std::vector<WallValue*> cands;
    for (auto& wv : out)
      if (wv.dir == dir) cands.push_back(&wv);
    std::stable_sort(cands.begin(), cands.end(),
                     [](const WallValue* a, const WallValue* b) {
                       auto ord = [](int t) { return t == 1 ? 0 : t == 3 ? 1 : 2; };
                       if (ord(a->emerge_type) != ord(b->emerge_type))
                         return ord(a->emerge_type) < ord(b->emerge_type);
                       return body_less(*a, *b);
                     });
    std::vector<Interval> taken = heavy_walls;
    for (auto* wv : cands) {
      bool ok = true;
      for (const auto& iv : taken)
        if (!iv.disjoint(wv->body)) ok = false;
      if (!ok) continue;
      wv->is_wall = true;
      taken.push_back(wv->body);
    }
  }
  std::sort(out.begin(), out.end(), [](const WallValue& a, const WallValue& b) {
    if (a.dir != b.dir) return a.dir < b.dir;
    return body_less(a, b);
  });
  return out;
}

std::vector<WallValue> derive_compound(const Mazery& M,
                                       const std::vector<WallValue>& emerging) {
  // Components are restricted to walls and inherited heavy barriers; light
  // non-wall barriers never anchor a compound here, which keeps the object
  // count tractable without losing any wall of the next level.
  std::vector<WallValue> out;
  const double light_bound = M.tau * M.params.rank_star;
  const long f = iceil(M.params.f);
  for (int di = 0; di < 2; ++di) {
    const Dir dir = static_cast<Dir>(di);
    std::vector<WallValue> pool;
    for (const auto& w : emerging)
      if (w.dir == dir && (w.is_wall || w.kind == WallKind::Inherited))
        pool.push_back(w);
    for (const auto& w : M.bars[di])
      if (w.rank >= M.params.rank_star) {
        WallValue inh = w;
        inh.kind = WallKind::Inherited;
        pool.push_back(inh);
      }
    std::sort(pool.begin(), pool.end(), body_less);

    std::unordered_set<std::uint64_t> seen;
    auto key_of = [](const WallValue& w) {
      return (static_cast<std::uint64_t>(w.body.a + 1) << 40) ^
             (static_cast<std::uint64_t>(w.body.b + 1) << 16) ^
             static_cast<std::uint64_t>(std::llround(w.rank * 1024));
    };
    auto other_wall_in_gap = [&](long p, long q) {
      for (const auto& w : pool)
        if (w.is_wall && !(w.body.b <= p || q <= w.body.a)) return true;
      return false;
    };
    auto combine = [&](const WallValue& w1, const WallValue& w2)
        -> std::optional<WallValue> {
      const long d = w2.body.a - w1.body.b;
      if (d < 0 || d > f) return std::nullopt;
      const int i = comp_distance_class(d);
      WallValue c;
      c.body = {w1.body.a, w2.body.b};
      c.rank = w1.rank + w2.rank - i;
      c.dir = dir;
      c.kind = WallKind::Compound;
      c.r1 = w1.rank;
      c.r2 = w2.rank;
      c.comp_i = i;
      c.boundary = w1.boundary || w2.boundary || !M.in_core(c.body);
      const bool gap_hop =
          d == 0 || (!other_wall_in_gap(w1.body.b, w2.body.a) &&
                     M.interval_hop(dir, {w1.body.b, w2.body.a}));
      c.is_wall = w1.is_wall && w2.is_wall && gap_hop;
      return c;
    };

    std::vector<WallValue> pass1;
    for (const auto& w1 : pool) {
      if (w1.rank >= light_bound) continue;  // first pass: left part light
      for (const auto& w2 : pool) {
        if (w2.body.a < w1.body.b) continue;
        if (w2.body.a - w1.body.b > f) continue;
        if (auto c = combine(w1, w2)) {
          if (seen.insert(key_of(*c)).second) {
            pass1.push_back(*c);
            out.push_back(*c);
          }
        }
      }
    }
    std::vector<const WallValue*> lefts;
    for (const auto& w : pool) lefts.push_back(&w);
    for (const auto& w : pass1) lefts.push_back(&w);
    for (const auto* w1 : lefts) {
      for (const auto& w2 : pool) {
        if (w2.rank >= light_bound) continue;  // second pass: right part light
        if (w2.body.a < w1->body.b) continue;
        if (w2.body.a - w1->body.b > f) continue;
        if (auto c = combine(*w1, w2)) {
          if (seen.insert(key_of(*c)).second) out.push_back(*c);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const WallValue& a, const WallValue& b) {
    if (a.dir != b.dir) return a.dir < b.dir;
    return body_less(a, b);
  });
  return out;
}

namespace {

// Trap rule of a second-level structure: rebuild a first-level structure on
// the rectangle's projections and rerun the detectors there. Pure in the
// sequence values, so locality holds by construction.
std::function<bool(const ColorSequence&, const ColorSequence&, const RectI&)>
make_level2_trap_rule(LevelParams lp) {
  return [lp](const ColorSequence& xx, const ColorSequence& yy,
              const RectI& rect) {
    const long xext = rect.x1 - rect.x0;
    const long yext = rect.y1 - rect.y0;
    const long nwin = std::max({xext, yext, 2L});
    auto slice = [&](const ColorSequence& s, long off, long ext) {
      ColorSequence r;
      r.m = s.m;
      r.loops = s.loops;
      r.values.reserve(static_cast<std::size_t>(nwin + 1));
      for (long i = 0; i <= ext; ++i)
        r.values.push_back(s[static_cast<std::size_t>(off + i)]);
      while (static_cast<long>(r.values.size()) <= nwin)
        r.values.push_back(r.values.back() % s.m + 1);
      return r;
    };
    Mazery sub = base_mazery(slice(xx, rect.x0, xext), slice(yy, rect.y0, yext),
                             nwin, lp);
    CondProbEstimator est;
    auto inside = [&](const RectI& r) {
      return r.x1 <= xext && r.y1 <= yext;
    };
    for (const auto& t : detect_uncorrelated(sub))
      if (inside(t.rect)) return true;
    for (const auto& t : detect_correlated(sub, est))
      if (inside(t.rect)) return true;
    return false;
  };
}

}  // namespace

Mazery scale_up(const Mazery& M, const CondProbEstimator& est,
                const LevelParams& params_next) {
  if (params_next.delta + 1e-9 < 3 * M.params.f)
    throw InvalidParameter("scale_up: next delta below 3f");
  if (params_next.rank_lb + 1e-9 < M.params.rank_star)
    throw InvalidParameter("scale_up: next rank below current heavy threshold");

  Mazery next;
  next.level = M.level + 1;
  next.params = params_next;
  next.m = M.m;
  next.loops = M.loops;
  next.tau = params_next.rank_star > 0 && params_next.rank_lb > 0
                 ? params_next.rank_star / params_next.rank_lb
                 : M.tau;
  next.lo = M.lo;
  next.hi = M.hi;
  next.x = M.x;
  next.y = M.y;
  next.prev = std::make_shared<Mazery>(M);
  next.core_lo = next.lo + next.pad();
  next.core_hi = next.hi - next.pad();

  auto add_traps = [&](std::vector<Trap> ts) {
    for (auto& t : ts) {
      t.boundary = !(next.core_lo <= t.rect.x0 && t.rect.x1 <= next.core_hi &&
                     next.core_lo <= t.rect.y0 && t.rect.y1 <= next.core_hi);
      next.traps.push_back(t);
    }
  };
  add_traps(detect_uncorrelated(M));
  add_traps(detect_correlated(M, est));
  add_traps(detect_missing_hole(M, est));

  auto emerging = derive_emerging(M, est);
  auto compounds = derive_compound(M, emerging);

  // dominant light walls disappear and drag along every wall inside them
  std::vector<Interval> removed_dominant[2];
  std::ostringstream log;
  for (int di = 0; di < 2; ++di)
    for (const auto& w : M.bars[di]) {
      if (!w.is_wall || w.rank >= M.params.rank_star) continue;
      if (!M.wall_dominant(w)) continue;
      removed_dominant[di].push_back(w.body);
      log.str("");
      log << "dominant light wall removed dir=" << (di == 0 ? 'v' : 'h')
          << " body=(" << w.body.a << "," << w.body.b << "]";
      next.erase_log.push_back(log.str());
    }

  for (int di = 0; di < 2; ++di) {
    for (const auto& w : M.bars[di]) {
      if (w.rank < M.params.rank_star) continue;
      bool erased = false;
      if (w.is_wall)
        for (const auto& iv : removed_dominant[di])
          if (iv.contains(w.body) && !(iv == w.body)) erased = true;
      if (erased) {
        log.str("");
        log << "wall erased inside dominant removal dir="
            << (di == 0 ? 'v' : 'h') << " body=(" << w.body.a << ","
            << w.body.b << "]";
        next.erase_log.push_back(log.str());
        continue;
      }
      WallValue inh = w;
      inh.kind = WallKind::Inherited;
      inh.boundary = !next.in_core(inh.body);
      next.bars[di].push_back(inh);
    }
    for (const auto& w : emerging)
      if (static_cast<int>(w.dir) == di) {
        WallValue e = w;
        e.boundary = !next.in_core(e.body);
        next.bars[di].push_back(e);
      }
    for (const auto& w : compounds)
      if (static_cast<int>(w.dir) == di) next.bars[di].push_back(w);
    std::sort(next.bars[di].begin(), next.bars[di].end(), body_less);
  }

  if (M.level == 1) next.trap_rule = make_level2_trap_rule(M.params);
  return next;
}

namespace {

struct StretchInfo {
  std::vector<Interval> externals;      // wall-free, big enough or at an edge
  std::vector<Interval> small_gaps;     // wall-free but below Delta
  std::vector<std::vector<const WallValue*>> stretches;
};

StretchInfo analyze_line(const Mazery& M, Dir d) {
  StretchInfo info;
  const long D = iceil(M.params.delta);
  auto ws = M.walls(d);
  std::sort(ws.begin(), ws.end(), [](const WallValue* a, const WallValue* b) {
    return body_less(*a, *b);
  });
  // complement components of the union of wall bodies
  std::vector<Interval> unions;
  for (const auto* w : ws) {
    if (!unions.empty() && w->body.a <= unions.back().b)
      unions.back().b = std::max(unions.back().b, w->body.b);
    else
      unions.push_back(w->body);
  }
  long cursor = M.lo - 1;
  std::vector<Interval> comps;
  for (const auto& u : unions) {
    if (u.a > cursor) comps.push_back({cursor, u.a});
    cursor = std::max(cursor, u.b);
  }
  if (cursor < M.hi) comps.push_back({cursor, M.hi});
  for (const auto& c : comps) {
    if (c.size() >= D || c.a == M.lo - 1 || c.b == M.hi)
      info.externals.push_back(c);
    else
      info.small_gaps.push_back(c);
  }
  // stretches: maximal wall runs between consecutive proper externals
  std::vector<const WallValue*> cur;
  long stretch_end = M.lo - 1;
  auto flush = [&]() {
    if (!cur.empty()) info.stretches.push_back(cur);
    cur.clear();
  };
  for (const auto* w : ws) {
    bool separated = false;
    for (const auto& e : info.externals)
      if (e.a >= stretch_end && e.b <= w->body.a && e.size() > 0)
        separated = true;
    if (separated) flush();
    cur.push_back(w);
    stretch_end = std::max(stretch_end, w->body.b);
  }
  flush();
  return info;
}

bool stretch_spanned(const Mazery& M, Dir d,
                     const std::vector<const WallValue*>& ws) {
  if (ws.empty()) return true;
  long s = ws.front()->body.a, e = s;
  for (const auto* w : ws) {
    s = std::min(s, w->body.a);
    e = std::max(e, w->body.b);
  }
  const std::size_t k = ws.size();
  std::vector<char> reach(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    if (ws[i]->body.a == s) reach[i] = 1;
  auto gap_ok = [&](long p, long q) {
    if (p == q) return true;
    if (p > q) return false;
    for (const auto* w : ws)
      if (!(w->body.b <= p || q <= w->body.a)) return false;
    return M.interval_hop(d, {p, q});
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (reach[i]) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (!reach[j]) continue;
        if (gap_ok(ws[j]->body.b, ws[i]->body.a)) {
          reach[i] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    if (reach[i] && ws[i]->body.b == e) return true;
  return false;
}

}  // namespace

ConditionReport check_conditions(const Mazery& M, RngStream sampler) {
  ConditionReport rep;
  const long D = iceil(M.params.delta);
  const long n = M.hi;
  auto add = [&](std::string name, bool pass, std::string detail) {
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
  };
  std::ostringstream det;

  add("sigma-range", M.params.sigma >= 0 && M.params.sigma < 0.5,
      "sigma=" + std::to_string(M.params.sigma));
  add("q-bound", M.params.q > 0 && M.params.q < 0.1,
      "q=" + std::to_string(M.params.q));

  {
    bool ok = true;
    long worst = 0;
    for (const auto& t : M.traps) {
      worst = std::max(worst, t.rect.size());
      if (static_cast<double>(t.rect.size()) > M.params.delta + 1e-9) ok = false;
    }
    for (int di = 0; di < 2; ++di)
      for (const auto& w : M.bars[di]) {
        worst = std::max(worst, w.body.size());
        if (static_cast<double>(w.body.size()) > M.params.delta + 1e-9)
          ok = false;
      }
    add("object-sizes", ok,
        "max size " + std::to_string(worst) + " vs delta " +
            std::to_string(M.params.delta));
  }

  {
    bool ok = true;
    const double ub = M.tau > 1 ? (2 * M.tau / (M.tau - 1)) * M.params.rank_lb
                                : 1e300;
    long cnt = 0;
    for (int di = 0; di < 2; ++di)
      for (const auto& w : M.bars[di]) {
        if (!w.is_wall) continue;
        ++cnt;
        if (w.rank < M.params.rank_lb - 1e-9 || w.rank > ub + 1e-9) ok = false;
      }
    det.str("");
    det << cnt << " walls in [" << M.params.rank_lb << "," << ub << "]";
    add("rank-window", ok, det.str());
  }

  {
    bool ok = true;
    for (int di = 0; di < 2; ++di) {
      std::vector<Interval> em;
      for (const auto& w : M.bars[di])
        if (w.is_wall && w.kind == WallKind::Emerging) em.push_back(w.body);
      for (std::size_t i = 0; i < em.size(); ++i)
        for (std::size_t j = i + 1; j < em.size(); ++j)
          if (!em[i].disjoint(em[j])) ok = false;
    }
    add("emerging-wall-disjointness", ok, "");
  }

  {
    bool ok = true;
    long checked = 0;
    for (int di = 0; di < 2; ++di) {
      const Dir d = static_cast<Dir>(di);
      auto info = analyze_line(M, d);
      for (const auto& e : info.externals) {
        ++checked;
        const bool lc = e.a <= M.lo - 1 || M.end_clean(d, e, true, false);
        const bool rc = e.b >= M.hi || M.end_clean(d, e, false, false);
        if (!(lc && rc)) ok = false;
      }
    }
    add("external-intervals-clean", ok,
        std::to_string(checked) + " externals checked");
  }

  {
    bool ok = true;
    long checked = 0;
    for (int di = 0; di < 2; ++di) {
      const Dir d = static_cast<Dir>(di);
      auto info = analyze_line(M, d);
      for (const auto& st : info.stretches) {
        ++checked;
        if (!stretch_spanned(M, d, st)) ok = false;
      }
    }
    add("spanning", ok, std::to_string(checked) + " stretches checked");
  }

  {
    bool ok = true;
    long tried = 0;
    for (int trial = 0; trial < 200 && tried < 60; ++trial) {
      const Dir d = static_cast<Dir>(sampler.uniform_below(2));
      if (3 * D > n) break;
      const long a = static_cast<long>(
          sampler.uniform_below(static_cast<std::uint64_t>(n - 3 * D + 1)));
      const Interval I{a - 1, a + 3 * D - 1};
      bool has_wall = false;
      for (const auto& w : M.bars[static_cast<int>(d)])
        if (w.is_wall && !I.disjoint(w.body)) has_wall = true;
      if (has_wall) continue;
      ++tried;
      bool found = false;
      for (long p = I.a + D + 1; p <= I.a + 2 * D && !found; ++p)
        if (M.point_clean(d, p)) found = true;
      if (!found) ok = false;
    }
    add("wall-free-clean-point", ok, std::to_string(tried) + " intervals");
  }

  {
    bool ok = true;
    long tried = 0;
    for (int trial = 0; trial < 200 && tried < 40; ++trial) {
      if (3 * D > n) break;
      const long ax = static_cast<long>(
          sampler.uniform_below(static_cast<std::uint64_t>(n - 3 * D + 1)));
      const long ay = static_cast<long>(
          sampler.uniform_below(static_cast<std::uint64_t>(n - 3 * D + 1)));
      const RectI q{ax, ay, ax + 3 * D, ay + 3 * D};
      if (M.trap_in(q)) continue;
      const Interval ix{ax - 1, ax + 3 * D}, iy{ay - 1, ay + 3 * D};
      bool has_wall = false;
      for (const auto& w : M.bars[0])
        if (w.is_wall && !ix.disjoint(w.body)) has_wall = true;
      for (const auto& w : M.bars[1])
        if (w.is_wall && !iy.disjoint(w.body)) has_wall = true;
      if (has_wall) continue;
      ++tried;
      for (long a = ax + D + 1; a <= ax + 2 * D; ++a) {
        if (!M.point_clean(Dir::Vertical, a)) continue;
        bool found = false;
        for (long b = ay + D + 1; b <= ay + 2 * D && !found; ++b)
          if (M.point_clean_2d(a, b, true)) found = true;
        if (!found) ok = false;
      }
    }
    add("wall-free-clean-point-2d", ok, std::to_string(tried) + " squares");
  }

  {
    bool ok = true;
    long tried = 0;
    const double sigma = M.params.sigma;
    for (int trial = 0; trial < 400 && tried < 60; ++trial) {
      const long dx = 1 + static_cast<long>(
                              sampler.uniform_below(static_cast<std::uint64_t>(
                                  std::max(1L, 3 * D))));
      const long dy = 1 + static_cast<long>(
                              sampler.uniform_below(static_cast<std::uint64_t>(
                                  std::max(1L, 3 * D))));
      if (dx > n || dy > n) continue;
      const double slope = static_cast<double>(dy) / dx;
      if (std::min(slope, 1.0 / slope) < sigma) continue;
      const long ux = static_cast<long>(
          sampler.uniform_below(static_cast<std::uint64_t>(n - dx + 1)));
      const long uy = static_cast<long>(
          sampler.uniform_below(static_cast<std::uint64_t>(n - dy + 1)));
      const RectI q{ux, uy, ux + dx, uy + dy};
      if (!M.rect_hop(q)) continue;
      ++tried;
      if (!reachable_in_rect(
              M.x, M.y, {{ux, uy}, {ux + dx, uy + dy}, RectKind::Closed}, true))
        ok = false;
    }
    add("hop-reachability", ok, std::to_string(tried) + " hop rectangles");
  }

  return rep;
}

std::vector<DiagLine> probability_diagnostics(const Mazery& M, long trials,
                                              RngStream stream) {
  std::vector<DiagLine> out;
  const long D = iceil(M.params.delta);
  const long n = M.hi;
  params::ExponentSet defaults;
  auto verdict_ub = [](const DiagLine& l) {
    return l.hi < l.bound ? "pass" : (l.lo > l.bound ? "fail" : "indeterminate");
  };
  auto verdict_lb = [](const DiagLine& l) {
    return l.lo > l.bound ? "pass" : (l.hi < l.bound ? "fail" : "indeterminate");
  };

  {
    DiagLine l;
    l.name = "trap-delta";
    long hits = 0;
    for (long t = 0; t < trials; ++t) {
      const long i = static_cast<long>(
          stream.uniform_below(static_cast<std::uint64_t>(n - D + 1)));
      const long j = static_cast<long>(
          stream.uniform_below(static_cast<std::uint64_t>(n - D + 1)));
      if (M.trap_in({i, j, i + D, j + D})) ++hits;
    }
    l.estimate = static_cast<double>(hits) / trials;
    wilson(hits, trials, l.lo, l.hi);
    l.bound = M.params.w;
    l.verdict = verdict_ub(l);
    out.push_back(l);
  }

  {
    DiagLine l;
    l.name = "uncleanness";
    long hits = 0;
    for (long t = 0; t < trials; ++t) {
      const Dir d = static_cast<Dir>(stream.uniform_below(2));
      const long p = D + static_cast<long>(stream.uniform_below(
                             static_cast<std::uint64_t>(n - 2 * D + 1)));
      if (!M.point_clean(d, p)) ++hits;
    }
    l.estimate = static_cast<double>(hits) / trials;
    wilson(hits, trials, l.lo, l.hi);
    l.bound = M.params.q / 2;
    l.verdict = verdict_ub(l);
    out.push_back(l);
  }

  {
    DiagLine l;
    l.name = "barrier-density";
    const long total =
        static_cast<long>(M.bars[0].size() + M.bars[1].size());
    const long sites = 2 * (n + 1);
    l.estimate = static_cast<double>(total) / sites;
    wilson(std::min(total, sites), sites, l.lo, l.hi);
    l.bound = params::wall_prob_bound(defaults, M.params.rank_lb);
    l.verdict = verdict_ub(l);
    out.push_back(l);
  }

  {
    DiagLine l;
    l.name = "hole-below-wall";
    std::vector<const WallValue*> ws;
    for (int di = 0; di < 2; ++di)
      for (const auto& w : M.bars[di])
        if (w.is_wall) ws.push_back(&w);
    long hits = 0, tried = 0;
    for (long t = 0; t < trials && !ws.empty(); ++t) {
      const auto* w = ws[static_cast<std::size_t>(
          stream.uniform_below(static_cast<std::uint64_t>(ws.size())))];
      const long sz = std::max(w->body.size(), 1L);
      auto hole = find_hole(M, *w, {w->body.a - 2 * sz, w->body.a + 2 * sz});
      ++tried;
      if (hole && hole->good) ++hits;
    }
    if (tried == 0) {
      l.estimate = 0;
      l.lo = 0;
      l.hi = 1;
      l.verdict = "indeterminate";
    } else {
      l.estimate = static_cast<double>(hits) / tried;
      wilson(hits, tried, l.lo, l.hi);
    }
    l.bound = params::hole_prob_bound(defaults, M.params.rank_lb) *
              std::pow(3.0 * M.params.delta, defaults.chi);
    if (tried > 0) l.verdict = verdict_lb(l);
    out.push_back(l);
  }

  return out;
}

std::string dump(const Mazery& M) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "mazery level=" << M.level << " m=" << M.m
     << " loops=" << (M.loops ? 1 : 0) << " window=[" << M.lo << "," << M.hi
     << "]\n";
  os << "params rank=" << M.params.rank_lb << " rank_star=" << M.params.rank_star
     << " rank_hat=" << M.params.rank_hat << " delta=" << M.params.delta
     << " delta_star=" << M.params.delta_star << " f=" << M.params.f
     << " g=" << M.params.g << " w=" << M.params.w
     << " sigma=" << M.params.sigma << " q=" << M.params.q << "\n";
  auto kind_name = [](TrapKind k) {
    switch (k) {
      case TrapKind::Base: return "base";
      case TrapKind::Uncorrelated: return "uncorrelated";
      case TrapKind::Correlated1: return "correlated1";
      case TrapKind::Correlated2: return "correlated2";
      case TrapKind::MissingHole: return "missing-hole";
    }
    return "?";
  };
  std::vector<const Trap*> ts;
  for (const auto& t : M.traps) ts.push_back(&t);
  std::sort(ts.begin(), ts.end(), [](const Trap* a, const Trap* b) {
    if (a->rect.x0 != b->rect.x0) return a->rect.x0 < b->rect.x0;
    if (a->rect.y0 != b->rect.y0) return a->rect.y0 < b->rect.y0;
    if (a->rect.x1 != b->rect.x1) return a->rect.x1 < b->rect.x1;
    if (a->rect.y1 != b->rect.y1) return a->rect.y1 < b->rect.y1;
    return a->kind < b->kind;
  });
  for (const auto* t : ts)
    os << "trap kind=" << kind_name(t->kind) << " rect=[" << t->rect.x0 << ","
       << t->rect.y0 << "," << t->rect.x1 << "," << t->rect.y1
       << "] boundary=" << (t->boundary ? 1 : 0) << "\n";
  auto wall_kind = [](WallKind k) {
    switch (k) {
      case WallKind::Inherited: return "inherited";
      case WallKind::Emerging: return "emerging";
      case WallKind::Compound: return "compound";
    }
    return "?";
  };
  for (int di = 0; di < 2; ++di) {
    auto sorted = M.bars[di];
    std::sort(sorted.begin(), sorted.end(), body_less);
    for (const auto& w : sorted) {
      os << "bar dir=" << (di == 0 ? 'v' : 'h') << " kind=" << wall_kind(w.kind)
         << " body=(" << w.body.a << "," << w.body.b << "] rank=" << w.rank
         << " wall=" << (w.is_wall ? 1 : 0);
      if (w.kind == WallKind::Emerging) os << " type=" << w.emerge_type;
      if (w.kind == WallKind::Compound)
        os << " r1=" << w.r1 << " r2=" << w.r2 << " i=" << w.comp_i;
      os << " boundary=" << (w.boundary ? 1 : 0) << "\n";
    }
  }
  for (const auto& e : M.erase_log) os << "erased " << e << "\n";
  return os.str();
}

}  // namespace demonlab::mazery
