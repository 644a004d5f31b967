#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include "demonlab/mazery.hpp"
#include "demonlab/params.hpp"

using namespace demonlab;
using namespace demonlab::mazery;

namespace {

ColorSequence seq_of(int m, std::vector<int> v) {
  ColorSequence s;
  s.m = m;
  s.values = std::move(v);
  return s;
}

std::set<std::tuple<long, long, long, long>> rect_set(
    const std::vector<Trap>& ts, TrapKind kind) {
  std::set<std::tuple<long, long, long, long>> out;
  for (const auto& t : ts)
    if (t.kind == kind)
      out.insert({t.rect.x0, t.rect.y0, t.rect.x1, t.rect.y1});
  return out;
}

// Exhaustive conditional covering probability for first-level structures:
// windows of 6 walk values, event = every right-closed lam-subinterval of
// [pos, pos+L] holds a position whose color appears in the window.
bool covering_event(const ColorSequence& a, unsigned mask, long pos, long L,
                    long lam) {
  for (long c = pos - 1; c <= pos + L - lam; ++c) {
    bool found = false;
    for (long i = std::max(pos, c + 1); i <= std::min(pos + L, c + lam); ++i)
      if ((mask >> (a[static_cast<std::size_t>(i)] - 1)) & 1) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

double oracle_condsup(const ColorSequence& a, int m, long pos, long L,
                      long lam) {
  double best = 0;
  std::vector<int> w(6);
  for (int s = 1; s <= m; ++s) {
    double total = 0;
    const double wgt = std::pow(1.0 / (m - 1), 6);
    std::function<void(int, int, unsigned)> rec = [&](int i, int cur,
                                                      unsigned mask) {
      if (i == 6) {
        if (covering_event(a, mask, pos, L, lam)) total += wgt;
        return;
      }
      for (int c = 1; c <= m; ++c) {
        if (c == cur) continue;
        rec(i + 1, c, mask | (1u << (c - 1)));
      }
    };
    rec(0, s, 0);
    best = std::max(best, total);
  }
  return best;
}

}  // namespace

TEST_CASE("base structure lists the equal-color points") {
  auto x = seq_of(4, {1, 2, 1, 3, 1});
  auto y = seq_of(4, {3, 1, 2, 1, 2});
  auto M = base_mazery(x, y, 4, 0.5);
  CHECK(M.level == 1);
  CHECK(M.prev == nullptr);
  auto base = rect_set(M.traps, TrapKind::Base);
  std::set<std::tuple<long, long, long, long>> expect = {
      {3, 0, 3, 0}, {0, 1, 0, 1}, {2, 1, 2, 1}, {4, 1, 4, 1},
      {1, 2, 1, 2}, {0, 3, 0, 3}, {2, 3, 2, 3}, {4, 3, 4, 3},
      {1, 4, 1, 4}};
  CHECK(base == expect);
}

TEST_CASE("base structure validation and density") {
  auto x = gen_walk(5, 201, false, RngStream(11, 0));
  auto y = gen_walk(5, 201, false, RngStream(11, 1));
  auto M = base_mazery(x, y, 200, 0.5);
  const double density =
      static_cast<double>(M.traps.size()) / (201.0 * 201.0);
  CHECK(density == doctest::Approx(0.2).epsilon(0.15));

  auto z = gen_walk(2, 201, false, RngStream(11, 2));
  CHECK_THROWS_AS(base_mazery(z, z, 200, 0.5), InvalidParameter);  // w <= 1
  CHECK_THROWS_AS(base_mazery(x, y, 200, 1.5), InvalidParameter);
  CHECK_THROWS_AS(base_mazery(x, y, 400, 0.5), InvalidParameter);

  // disjoint color ranges never collide
  ColorSequence a = seq_of(10, {1, 2, 3, 4, 5});
  ColorSequence b = seq_of(10, {6, 7, 8, 9, 10});
  auto M2 = base_mazery(a, b, 4, 0.5);
  CHECK(M2.traps.empty());
}

TEST_CASE("everything is clean at the first level") {
  auto x = gen_walk(3, 65, false, RngStream(21, 0));
  auto y = gen_walk(3, 65, false, RngStream(21, 1));
  auto M = base_mazery(x, y, 64, 0.6);
  CHECK(M.end_clean(Dir::Vertical, {5, 30}, true, true));
  CHECK(M.point_clean(Dir::Horizontal, 17, true));
  CHECK(M.trap_clean({3, 3, 10, 10}, true));
  CHECK(M.h_clean({3, 3, 10, 10}, false));
  CHECK(M.corner_clean({3, 3, 10, 10}, true));
  CHECK(M.point_clean_2d(12, 12, true));
  CHECK(M.interval_hop(Dir::Vertical, {5, 30}));
  CHECK(M.walls(Dir::Vertical).empty());
  CHECK(M.pad() == 23);  // max(4*2.2g + 4*Delta, f) + Delta
  CHECK(M.in_core({23, 41}));
  CHECK_FALSE(M.in_core({22, 41}));
}

TEST_CASE("cleanness responds to the walls of the previous level") {
  auto x = gen_walk(5, 41, false, RngStream(31, 0));
  auto y = gen_walk(5, 41, false, RngStream(31, 1));
  auto base = base_mazery(x, y, 40, 0.5);  // f=4, so the margin is 4/3
  WallValue wall;
  wall.body = {10, 20};
  wall.rank = 120;
  wall.dir = Dir::Vertical;
  wall.is_wall = true;
  WallValue barrier;
  barrier.body = {6, 9};
  barrier.rank = 50;
  barrier.dir = Dir::Vertical;
  base.bars[0] = {barrier, wall};

  Mazery C;
  C.level = 2;
  C.params = base.params;
  C.m = base.m;
  C.x = x;
  C.y = y;
  C.lo = 0;
  C.hi = 40;
  C.prev = std::make_shared<Mazery>(base);

  // wall start at 10 vs the f/3 = 4/3 margin
  CHECK(C.end_clean(Dir::Vertical, {11, 22}, true, false));  // wall not inside
  CHECK_FALSE(C.end_clean(Dir::Vertical, {10, 22}, true, false));
  CHECK_FALSE(C.end_clean(Dir::Vertical, {9, 22}, true, false));
  CHECK(C.end_clean(Dir::Vertical, {5, 22}, true, false));    // distance 5
  CHECK_FALSE(C.end_clean(Dir::Vertical, {5, 22}, true, true));  // barrier at 6
  CHECK(C.end_clean(Dir::Vertical, {2, 22}, true, true));

  // weak implies nothing, strong implies weak
  for (long a = -1; a < 8; ++a) {
    const Interval I{a, 22};
    if (C.end_clean(Dir::Vertical, I, true, true))
      CHECK(C.end_clean(Dir::Vertical, I, true, false));
  }
  // growing the far end only adds contained walls: clean is anti-monotone
  for (long b = 10; b < 25; ++b)
    if (!C.end_clean(Dir::Vertical, {5, b}, true, false))
      CHECK_FALSE(C.end_clean(Dir::Vertical, {5, b + 1}, true, false));
  CHECK(C.end_clean(Dir::Horizontal, {9, 22}, true, false));  // other axis
}

TEST_CASE("trap cleanness keeps distance g from first-level traps") {
  // single collision at (7,7)
  std::vector<int> xv, yv;
  for (int i = 0; i <= 20; ++i) xv.push_back(i % 2 ? 2 : 1);
  for (int i = 0; i <= 20; ++i) yv.push_back(i % 2 ? 4 : 3);
  xv[7] = 5;
  yv[7] = 5;
  auto x = seq_of(5, xv);
  auto y = seq_of(5, yv);
  auto base = base_mazery(x, y, 20, 0.5);  // g=2
  REQUIRE(base.traps.size() == 1);

  Mazery C;
  C.level = 2;
  C.params = base.params;
  C.m = base.m;
  C.x = x;
  C.y = y;
  C.lo = 0;
  C.hi = 20;
  C.prev = std::make_shared<Mazery>(base);

  CHECK(C.trap_clean({5, 5, 10, 10}, true));        // corner (5,5), dist 2
  CHECK_FALSE(C.trap_clean({6, 6, 10, 10}, true));  // corner (6,6), dist 1
  CHECK_FALSE(C.trap_clean({3, 3, 7, 7}, false));   // corner (7,7), dist 0
  CHECK(C.trap_clean({3, 3, 6, 6}, false));         // trap outside the rect
}

TEST_CASE("pair detector agrees with brute force") {
  auto x = gen_walk(3, 41, false, RngStream(41, 0));
  auto y = gen_walk(3, 41, false, RngStream(41, 1));
  auto M = base_mazery(x, y, 40, 0.6);
  auto got = rect_set(detect_uncorrelated(M), TrapKind::Uncorrelated);

  std::set<std::tuple<long, long, long, long>> expect;
  for (long i = 0; i <= 40; ++i)
    for (long j = 0; j <= 40; ++j) {
      if (x[i] != y[j]) continue;
      for (long i2 = 0; i2 <= 40; ++i2)
        for (long j2 = 0; j2 <= 40; ++j2) {
          if (x[i2] != y[j2]) continue;
          if (i2 == i || j2 == j) continue;  // projections must be disjoint
          if (std::abs(i2 - i) > 4 || std::abs(j2 - j) > 4) continue;
          expect.insert({std::min(i, i2), std::min(j, j2), std::max(i, i2),
                         std::max(j, j2)});
        }
    }
  CHECK(got == expect);
  for (const auto& t : detect_uncorrelated(M)) {
    CHECK(t.rect.size() <= 5);  // Delta + f
    if (!t.boundary) {
      CHECK(t.rect.x0 >= M.core_lo);
      CHECK(t.rect.x1 <= M.core_hi);
    }
  }
}

TEST_CASE("covering-trap detector agrees with exhaustive conditionals") {
  auto x = gen_walk(3, 37, false, RngStream(51, 0));
  auto y = gen_walk(3, 37, false, RngStream(51, 1));
  for (double w : {0.9, 0.51}) {
    auto M = base_mazery(x, y, 36, w);
    CondProbEstimator est;
    auto got = detect_correlated(M, est);
    std::set<std::tuple<long, long, long, long>> got1 =
        rect_set(got, TrapKind::Correlated1);
    std::set<std::tuple<long, long, long, long>> got2 =
        rect_set(got, TrapKind::Correlated2);

    std::set<std::tuple<long, long, long, long>> exp1, exp2;
    const long lam[2] = {7, 5}, L[2] = {28, 20};
    for (int ori = 0; ori < 2; ++ori) {
      const ColorSequence& a = ori == 0 ? x : y;
      const ColorSequence& t = ori == 0 ? y : x;
      for (int j = 0; j < 2; ++j) {
        for (long pos = 0; pos + L[j] <= 36; ++pos) {
          const double sup = oracle_condsup(a, 3, pos, L[j], lam[j]);
          for (long b = 0; b + 5 <= 36; ++b) {
            unsigned mask = 0;
            for (long p = b; p <= b + 5; ++p)
              mask |= 1u << (t[static_cast<std::size_t>(p)] - 1);
            if (!covering_event(a, mask, pos, L[j], lam[j])) continue;
            if (sup > w * w) continue;
            auto& target = j == 0 ? exp1 : exp2;
            if (ori == 0)
              target.insert({pos, b, pos + L[j], b + 5});
            else
              target.insert({b, pos, b + 5, pos + L[j]});
          }
        }
      }
    }
    CHECK(got1 == exp1);
    CHECK(got2 == exp2);
  }
}

TEST_CASE("hole search crosses an open corridor and reports goodness") {
  // distinct colors: nothing is ever closed
  const int m = 12;
  std::vector<int> xv(31, 1), yv;
  for (int i = 0; i <= 30; ++i) yv.push_back(i % 6 + 7);
  auto M = base_mazery(seq_of(m, xv), seq_of(m, yv), 30, 0.2);
  REQUIRE(M.traps.empty());

  WallValue wall;
  wall.body = {8, 12};
  wall.dir = Dir::Horizontal;
  wall.rank = 60;
  auto hole = find_hole(M, wall, {5, 20});
  REQUIRE(hole.has_value());
  CHECK(hole->good);
  CHECK(hole->interval.a == 5);  // leftmost
  CHECK(hole->interval.b - hole->interval.a <= wall.body.size());

  // closing the whole top row of the wall blocks every crossing
  auto yb = yv;
  yb[12] = 1;
  ColorSequence yblock = seq_of(m, yb);
  auto hole2 = find_hole(M, wall, {5, 20}, &yblock);
  CHECK_FALSE(hole2.has_value());
}

TEST_CASE("missing-hole detector fires on a planted light wall") {
  const int m = 6;
  auto x = seq_of(m, {2, 4, 5, 3, 4, 2, 4, 5, 4, 2, 4, 5, 2});
  auto y = seq_of(m, {2, 3, 2, 3, 2, 1, 3, 2, 3, 2, 3, 2, 3});
  auto M = base_mazery(x, y, 12, 0.5);
  WallValue wv;
  wv.body = {5, 6};
  wv.dir = Dir::Horizontal;
  wv.rank = 50;
  wv.is_wall = true;
  M.bars[1] = {wv};
  M.barrier_rule = [](const ColorSequence& hyp, Dir d) {
    std::vector<WallValue> out;
    if (d != Dir::Horizontal) return out;
    for (long t = 1; t + 1 < static_cast<long>(hyp.size()); ++t)
      if (hyp[static_cast<std::size_t>(t)] == 1) {
        WallValue w;
        w.body = {t, t + 1};
        w.dir = Dir::Horizontal;
        w.rank = 50;
        w.is_wall = true;
        out.push_back(w);
      }
    return out;
  };
  CondProbEstimator est;
  auto traps = detect_missing_hole(M, est);
  auto got = rect_set(traps, TrapKind::MissingHole);
  std::set<std::tuple<long, long, long, long>> expect = {{2, 4, 4, 7}};
  CHECK(got == expect);
}

TEST_CASE("emerging barriers carry witnesses and greedy designation") {
  auto x = gen_walk(3, 65, false, RngStream(61, 0));
  auto y = gen_walk(3, 65, false, RngStream(61, 1));
  auto M = base_mazery(x, y, 64, 0.51);
  CondProbEstimator est;
  auto em = derive_emerging(M, est);
  REQUIRE_FALSE(em.empty());

  const long lam[2] = {7, 5}, L[2] = {28, 20};
  for (const auto& wv : em) {
    CHECK(wv.kind == WallKind::Emerging);
    CHECK(wv.rank == doctest::Approx(150.0));
    REQUIRE((wv.emerge_type == 1 || wv.emerge_type == 2));
    const int j = wv.emerge_type - 1;
    CHECK(wv.body.size() >= L[j]);
    CHECK(wv.body.size() <= L[j] + 4);
    // witness interval with conditional probability above w^2
    const ColorSequence& a = wv.dir == Dir::Vertical ? x : y;
    bool witness = false;
    for (long up = std::max(0L, wv.body.a + 1); up <= wv.body.a + 2; ++up) {
      const long vp = up + L[j];
      if (vp > wv.body.b || vp <= wv.body.b - 2 || vp > 64) continue;
      if (oracle_condsup(a, 3, up, L[j], lam[j]) > 0.51 * 0.51) witness = true;
    }
    CHECK(witness);
  }

  // replay the designation greedily per direction
  for (int di = 0; di < 2; ++di) {
    std::vector<const WallValue*> cands;
    for (const auto& wv : em)
      if (static_cast<int>(wv.dir) == di) cands.push_back(&wv);
    std::stable_sort(cands.begin(), cands.end(),
                     [](const WallValue* a, const WallValue* b) {
                       auto ord = [](int t) { return t == 1 ? 0 : t == 3 ? 1 : 2; };
                       if (ord(a->emerge_type) != ord(b->emerge_type))
                         return ord(a->emerge_type) < ord(b->emerge_type);
                       if (a->body.a != b->body.a) return a->body.a < b->body.a;
                       return a->body.b < b->body.b;
                     });
    std::vector<Interval> taken;
    for (const auto* wv : cands) {
      bool free = true;
      for (const auto& iv : taken)
        if (!iv.disjoint(wv->body)) free = false;
      CHECK(wv->is_wall == free);
      if (free) taken.push_back(wv->body);
    }
    for (std::size_t i = 0; i < taken.size(); ++i)
      for (std::size_t k = i + 1; k < taken.size(); ++k)
        CHECK(taken[i].disjoint(taken[k]));
  }
}

TEST_CASE("compound arithmetic over planted walls") {
  auto x = gen_walk(4, 31, false, RngStream(71, 0));
  auto y = gen_walk(4, 31, false, RngStream(71, 1));
  auto M = base_mazery(x, y, 30, 0.5);  // f=4

  auto mk = [](long a, long b, double rank) {
    WallValue w;
    w.body = {a, b};
    w.rank = rank;
    w.dir = Dir::Vertical;
    w.is_wall = true;
    w.kind = WallKind::Emerging;
    w.emerge_type = 1;
    return w;
  };
  std::vector<WallValue> em = {mk(2, 6, 10), mk(9, 13, 12), mk(13, 17, 20),
                               mk(24, 28, 15)};
  auto comp = derive_compound(M, em);

  std::set<std::tuple<long, long, long, long>> got;  // a, b, rank*2, i
  for (const auto& c : comp) {
    CHECK(c.kind == WallKind::Compound);
    CHECK(c.is_wall);
    got.insert({c.body.a, c.body.b, std::llround(c.rank * 2), c.comp_i});
  }
  // d=3 lands in distance class 3; d=0 in class 0
  std::set<std::tuple<long, long, long, long>> expect = {
      {2, 13, 38, 3},   // 10+12-3
      {9, 17, 64, 0},   // 12+20-0
      {2, 17, 78, 0}};  // 19+20-0, second pass over the first compound
  CHECK(got == expect);
}

TEST_CASE("scale-up produces a coherent second level") {
  params::ExponentSet e;
  auto next = params::toy_params(128, 160, 150, 0.2, 0.06, 105, 0.3, 480, e);
  auto x = gen_walk(4, 97, false, RngStream(81, 0));
  auto y = gen_walk(4, 97, false, RngStream(81, 1));
  auto M = base_mazery(x, y, 96, 0.6);
  CondProbEstimator est;
  auto M2 = scale_up(M, est, next);

  CHECK(M2.level == 2);
  REQUIRE(M2.prev != nullptr);
  CHECK(M2.prev->level == 1);
  CHECK(M2.hi == 96);

  for (const auto& t : M2.traps) {
    CHECK(t.kind != TrapKind::Base);
    CHECK(t.rect.x0 >= 0);
    CHECK(t.rect.y1 <= 96);
    CHECK(t.rect.size() <= 128);
  }
  long walls = 0;
  for (int di = 0; di < 2; ++di) {
    CHECK(std::is_sorted(M2.bars[di].begin(), M2.bars[di].end(),
                         [](const WallValue& a, const WallValue& b) {
                           return a.body.a < b.body.a ||
                                  (a.body.a == b.body.a && a.body.b <= b.body.b);
                         }));
    for (const auto& w : M2.bars[di]) {
      CHECK(w.body.a >= -1);
      CHECK(w.body.b <= 96);
      CHECK(w.body.size() <= 128);
      if (w.is_wall) {
        ++walls;
        CHECK(w.rank >= 105);
      }
    }
  }
  CHECK(walls > 0);

  auto rep = check_conditions(M2, RngStream(7, 0));
  for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name, ": ", c.detail);
  auto rep1 = check_conditions(M, RngStream(7, 1));
  for (const auto& c : rep1.checks) CHECK_MESSAGE(c.pass, c.name, ": ", c.detail);

  CHECK_THROWS_AS(
      scale_up(M, est, params::toy_params(4, 12, 8, 0.05, 0.02, 40, 0.1, 64, e)),
      InvalidParameter);
}

TEST_CASE("condition checks catch injected faults") {
  params::ExponentSet e;
  auto next = params::toy_params(128, 160, 150, 0.2, 0.06, 105, 0.3, 480, e);
  auto x = gen_walk(4, 65, false, RngStream(91, 0));
  auto y = gen_walk(4, 65, false, RngStream(91, 1));
  auto M = base_mazery(x, y, 64, 0.6);
  CondProbEstimator est;
  auto M2 = scale_up(M, est, next);
  REQUIRE(check_conditions(M2, RngStream(7, 0)).all_pass());

  auto find = [](const ConditionReport& r, const std::string& name) {
    for (const auto& c : r.checks)
      if (c.name == name) return c.pass;
    return true;
  };

  {
    auto bad = M2;
    WallValue w;
    w.body = {3, 10};
    w.rank = 10;  // below the rank floor
    w.is_wall = true;
    bad.bars[0].push_back(w);
    CHECK_FALSE(find(check_conditions(bad, RngStream(7, 2)), "rank-window"));
  }
  {
    auto bad = M2;
    bad.traps.push_back({{0, 0, 0, 200}, TrapKind::Uncorrelated, true});
    CHECK_FALSE(find(check_conditions(bad, RngStream(7, 3)), "object-sizes"));
  }
  {
    auto bad = M2;
    WallValue a, b;
    a.body = {3, 10};
    b.body = {8, 14};
    a.rank = b.rank = 150;
    a.is_wall = b.is_wall = true;
    a.kind = b.kind = WallKind::Emerging;
    a.dir = b.dir = Dir::Horizontal;
    bad.bars[1].push_back(a);
    bad.bars[1].push_back(b);
    CHECK_FALSE(find(check_conditions(bad, RngStream(7, 4)),
                     "emerging-wall-disjointness"));
  }
  {
    auto bad = M2;
    bad.params.sigma = 0.7;
    CHECK_FALSE(find(check_conditions(bad, RngStream(7, 5)), "sigma-range"));
  }
}

TEST_CASE("second-level trap rule is local to the rectangle") {
  params::ExponentSet e;
  auto next = params::toy_params(128, 160, 150, 0.2, 0.06, 105, 0.3, 480, e);
  auto x = gen_walk(4, 97, false, RngStream(101, 0));
  auto y = gen_walk(4, 97, false, RngStream(101, 1));
  auto M = base_mazery(x, y, 96, 0.6);
  CondProbEstimator est;
  auto M2 = scale_up(M, est, next);
  REQUIRE(M2.trap_rule);

  RngStream s(111, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const long ext = 24 + static_cast<long>(s.uniform_below(16));
    const long x0 = static_cast<long>(s.uniform_below(96 - ext));
    const long y0 = static_cast<long>(s.uniform_below(96 - ext));
    const RectI rect{x0, y0, x0 + ext, y0 + ext};
    bool realized = false;
    for (const auto& t : M2.traps)
      if (rect.contains(t.rect)) realized = true;
    CHECK(M2.trap_rule(x, y, rect) == realized);

    // perturbing a value outside the rectangle leaves the verdict alone
    ColorSequence y2 = y;
    const long far = rect.y1 + 2 < 96 ? rect.y1 + 2 : rect.y0 - 2;
    y2.values[static_cast<std::size_t>(far)] =
        y2.values[static_cast<std::size_t>(far)] % 4 + 1;
    CHECK(M2.trap_rule(x, y2, rect) == realized);
  }
}

TEST_CASE("estimator: exact enumeration and Monte Carlo agree") {
  CondProbEstimator exact;
  CondProbEstimator mc;
  mc.force_monte_carlo = true;
  mc.mc_samples = 4000;
  mc.master_seed = 5;
  int covered = 0;
  for (int t = 0; t < 20; ++t) {
    const int m = 3 + t % 3;
    const int target = 1 + t % m;
    const long off = t % 4;
    auto pred = [&](const std::vector<int>& vals) {
      return vals[static_cast<std::size_t>(off)] == target;
    };
    auto ex = exact.estimate(m, false, 0, 5, (target % m) + 1, pred,
                             static_cast<std::uint64_t>(t));
    CHECK(ex.exact);
    auto ap = mc.estimate(m, false, 0, 5, (target % m) + 1, pred,
                          static_cast<std::uint64_t>(t));
    CHECK_FALSE(ap.exact);
    if (ap.lo <= ex.value && ex.value <= ap.hi) ++covered;
  }
  CHECK(covered >= 18);

  // uniform start sums the color marginals
  auto p1 = exact.estimate(4, false, 0, 0, 0,
                           [](const std::vector<int>& v) { return v[0] == 2; },
                           0);
  CHECK(p1.value == doctest::Approx(0.25));

  CondProbEstimator tiny;
  tiny.exact_budget = 2;
  tiny.mc_samples = 500;
  auto e2 = tiny.estimate(4, false, 0, 6, 1,
                          [](const std::vector<int>&) { return true; }, 9);
  CHECK_FALSE(e2.exact);
  CHECK(tiny.fallback_count == 1);
  CHECK(e2.value == doctest::Approx(1.0));
}

TEST_CASE("diagnostics report the advisory lines") {
  params::ExponentSet e;
  auto next = params::toy_params(128, 160, 150, 0.2, 0.06, 105, 0.3, 480, e);
  auto x = gen_walk(4, 65, false, RngStream(121, 0));
  auto y = gen_walk(4, 65, false, RngStream(121, 1));
  auto M = base_mazery(x, y, 64, 0.6);
  CondProbEstimator est;
  auto M2 = scale_up(M, est, next);

  auto lines = probability_diagnostics(M2, 200, RngStream(131, 0));
  REQUIRE(lines.size() == 4);
  std::set<std::string> names;
  for (const auto& l : lines) {
    names.insert(l.name);
    CHECK(l.lo <= l.hi);
    CHECK((l.verdict == "pass" || l.verdict == "fail" ||
           l.verdict == "indeterminate"));
  }
  CHECK(names == std::set<std::string>{"trap-delta", "uncleanness",
                                       "barrier-density", "hole-below-wall"});
}

TEST_CASE("dump is stable and covers every object") {
  auto x = gen_walk(3, 17, false, RngStream(141, 0));
  auto y = gen_walk(3, 17, false, RngStream(141, 1));
  auto M = base_mazery(x, y, 16, 0.6);
  auto d1 = dump(M);
  auto d2 = dump(M);
  CHECK(d1 == d2);
  CHECK(d1.find("mazery level=1") == 0);
  std::size_t lines = std::count(d1.begin(), d1.end(), '\n');
  CHECK(lines == 2 + M.traps.size());
}
