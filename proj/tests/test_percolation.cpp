#include "doctest.h"

#include <queue>
#include <vector>

#include "demonlab/percolation.hpp"

using namespace demonlab;

namespace {

ColorSequence seq_of(int m, std::vector<int> v) {
  ColorSequence s;
  s.m = m;
  s.values = std::move(v);
  return s;
}

BitSequence bits_of(std::vector<std::uint8_t> v) {
  BitSequence s;
  s.values = std::move(v);
  return s;
}

// Independent check: plain BFS over the open-point lattice graph.
std::vector<std::vector<char>> bfs_reach(const ColorSequence& x, const ColorSequence& y,
                                         long n) {
  std::vector<std::vector<char>> r(static_cast<std::size_t>(n + 1),
                                   std::vector<char>(static_cast<std::size_t>(n + 1), 0));
  std::queue<std::pair<long, long>> q;
  r[0][0] = 1;
  q.emplace(0, 0);
  while (!q.empty()) {
    auto [i, j] = q.front();
    q.pop();
    for (auto [di, dj] : {std::pair<long, long>{1, 0}, {0, 1}}) {
      const long ni = i + di, nj = j + dj;
      if (ni > n || nj > n) continue;
      if (r[static_cast<std::size_t>(ni)][static_cast<std::size_t>(nj)]) continue;
      if (x[static_cast<std::size_t>(ni)] == y[static_cast<std::size_t>(nj)]) continue;
      r[static_cast<std::size_t>(ni)][static_cast<std::size_t>(nj)] = 1;
      q.emplace(ni, nj);
    }
  }
  return r;
}

// Independent check for the binary variant: delete equally many 0s from
// both prefixes and compare the remainders position by position.
bool deletion_oracle(const BitSequence& z0, const BitSequence& z1, long n) {
  if (n > 16) throw std::logic_error("deletion_oracle: horizon too large");
  std::vector<unsigned> masks0, masks1;  // bit set = position kept
  auto collect = [n](const BitSequence& z, std::vector<unsigned>& out) {
    for (unsigned keep = 0; keep < (1u << n); ++keep) {
      bool ok = true;
      for (long i = 0; i < n && ok; ++i)
        if (!(keep >> i & 1) && z[static_cast<std::size_t>(i)] != 0) ok = false;
      if (ok) out.push_back(keep);
    }
  };
  collect(z0, masks0);
  collect(z1, masks1);
  for (unsigned k0 : masks0)
    for (unsigned k1 : masks1) {
      if (__builtin_popcount(k0) != __builtin_popcount(k1)) continue;
      std::vector<int> a, b;
      for (long i = 0; i < n; ++i) {
        if (k0 >> i & 1) a.push_back(z0[static_cast<std::size_t>(i)]);
        if (k1 >> i & 1) b.push_back(z1[static_cast<std::size_t>(i)]);
      }
      bool clash = false;
      for (std::size_t i = 0; i < a.size() && !clash; ++i)
        if (a[i] == 1 && b[i] == 1) clash = true;
      if (!clash) return true;
    }
  return false;
}

BitSequence bits_from_mask(unsigned mask, long n) {
  BitSequence s;
  for (long i = 0; i < n; ++i)
    s.values.push_back(static_cast<std::uint8_t>(mask >> i & 1));
  return s;
}

}  // namespace

TEST_CASE("closed points follow color equality") {
  auto x = seq_of(2, {1, 2}), y = seq_of(2, {2, 1});
  CHECK(closed_point(x, y, 0, 1));
  CHECK(closed_point(x, y, 1, 0));
  CHECK_FALSE(closed_point(x, y, 0, 0));
  CHECK_FALSE(closed_point(x, y, 1, 1));

  auto u = seq_of(4, {1, 2}), v = seq_of(4, {3, 4});
  for (long i = 0; i < 2; ++i)
    for (long j = 0; j < 2; ++j) CHECK_FALSE(closed_point(u, v, i, j));

  auto a = seq_of(4, {1, 2, 1}), b = seq_of(4, {1, 3, 1});
  CHECK(closed_point(a, b, 0, 0));
  CHECK(closed_point(a, b, 2, 2));
  CHECK_FALSE(closed_point(a, b, 1, 1));

  CHECK_THROWS_AS(closed_point(a, b, 3, 0), InvalidParameter);
}

TEST_CASE("two crossed traps block the diagonal") {
  auto x = seq_of(2, {1, 2}), y = seq_of(2, {2, 1});
  auto rs = reach_set(x, y, 1);
  CHECK(rs.reach(0, 0));
  CHECK_FALSE(rs.reach(1, 1));
}

TEST_CASE("disjoint color ranges leave every cell reachable") {
  std::vector<int> xv, yv;
  for (int i = 0; i < 17; ++i) {
    xv.push_back(1 + i % 2);
    yv.push_back(3 + i % 2);
  }
  auto rs = reach_set(seq_of(4, xv), seq_of(4, yv), 16);
  for (long j = 0; j <= 16; ++j)
    for (long i = 0; i <= 16; ++i) CHECK(rs.reach(i, j));
}

TEST_CASE("origin stays a valid start even when closed") {
  auto x = seq_of(3, {1, 2, 3}), y = seq_of(3, {1, 3, 2});
  auto rs = reach_set(x, y, 2);
  CHECK(rs.reach(0, 0));
  CHECK_FALSE(rs.open(0, 0));
  CHECK(rs.reach(1, 0));  // leaving a closed origin is allowed
}

TEST_CASE("reach table matches a BFS oracle on random instances") {
  for (int trial = 0; trial < 500; ++trial) {
    RngStream s(2024, static_cast<std::uint64_t>(trial));
    const int m = 2 + static_cast<int>(s.uniform_below(5));
    const long n = 4 + static_cast<long>(s.uniform_below(61));
    auto x = gen_walk(m, static_cast<std::size_t>(n + 1), false,
                      RngStream(2024, 1000 + static_cast<std::uint64_t>(trial)));
    auto y = gen_walk(m, static_cast<std::size_t>(n + 1), false,
                      RngStream(2024, 2000 + static_cast<std::uint64_t>(trial)));
    auto rs = reach_set(x, y, n);
    auto oracle = bfs_reach(x, y, n);
    for (long j = 0; j <= n; ++j)
      for (long i = 0; i <= n; ++i)
        REQUIRE(rs.reach(i, j) ==
                static_cast<bool>(oracle[static_cast<std::size_t>(i)]
                                        [static_cast<std::size_t>(j)]));
  }
}

TEST_CASE("witness cells point to open reachable predecessors") {
  auto x = gen_walk(3, 65, false, RngStream(5, 0));
  auto y = gen_walk(3, 65, false, RngStream(5, 1));
  auto rs = reach_set(x, y, 64);
  for (long j = 0; j <= 64; ++j)
    for (long i = 0; i <= 64; ++i) {
      if (!rs.reach(i, j)) {
        CHECK(rs.witness(i, j) == Witness::None);
        continue;
      }
      switch (rs.witness(i, j)) {
        case Witness::Origin:
          CHECK(i == 0);
          CHECK(j == 0);
          break;
        case Witness::Left:
          REQUIRE(rs.reach(i - 1, j));
          CHECK(rs.open(i, j));
          break;
        case Witness::Below:
          REQUIRE(rs.reach(i, j - 1));
          CHECK(rs.open(i, j));
          break;
        default:
          FAIL("reachable cell without witness");
      }
    }
}

TEST_CASE("rectangle reachability: blocked crossing and trivial start") {
  auto x = seq_of(2, {1, 2}), y = seq_of(2, {2, 1});
  RectSpec rect{{0, 0}, {1, 1}, RectKind::Closed};
  CHECK_FALSE(reachable_in_rect(x, y, rect, true));
  RectSpec point{{1, 1}, {1, 1}, RectKind::Closed};
  CHECK(reachable_in_rect(x, y, point, true));
  CHECK_THROWS_AS(
      reachable_in_rect(x, y, RectSpec{{1, 0}, {0, 0}, RectKind::Closed}, true),
      InvalidParameter);
}

TEST_CASE("confined rectangle reachability implies unconfined") {
  for (int trial = 0; trial < 200; ++trial) {
    RngStream s(31, static_cast<std::uint64_t>(trial));
    const int m = 2 + static_cast<int>(s.uniform_below(3));
    auto x = gen_walk(m, 16, false, RngStream(31, 500 + static_cast<std::uint64_t>(trial)));
    auto y = gen_walk(m, 16, false, RngStream(31, 900 + static_cast<std::uint64_t>(trial)));
    const long x0 = static_cast<long>(s.uniform_below(8));
    const long y0 = static_cast<long>(s.uniform_below(8));
    const long x1 = x0 + static_cast<long>(s.uniform_below(8));
    const long y1 = y0 + static_cast<long>(s.uniform_below(8));
    const auto kind = static_cast<RectKind>(s.uniform_below(3));
    RectSpec rect{{x0, y0}, {x1, y1}, kind};
    if (reachable_in_rect(x, y, rect, true))
      CHECK(reachable_in_rect(x, y, rect, false));
  }
}

TEST_CASE("escape flags on K2 follow the initial colors") {
  for (int xa : {1, 2})
    for (int ya : {1, 2}) {
      auto x = seq_of(2, {xa, 3 - xa, xa});
      auto y = seq_of(2, {ya, 3 - ya, ya});
      auto rec = escape_record(x, y, 2);
      if (xa == ya) {
        CHECK(rec.escape(1));
        CHECK_FALSE(rec.escape(2));
      } else {
        CHECK_FALSE(rec.escape(1));
      }
    }
}

TEST_CASE("escape flags are monotone on random instances") {
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 4;
    auto x = gen_walk(m, 33, false, RngStream(88, static_cast<std::uint64_t>(trial)));
    auto y = gen_walk(m, 33, false, RngStream(88, 5000 + static_cast<std::uint64_t>(trial)));
    auto rec = escape_record(x, y, 32);
    for (long n = 1; n < 32; ++n)
      if (rec.escape(n + 1)) CHECK(rec.escape(n));
  }
}

TEST_CASE("binary compatibility basics") {
  CHECK_FALSE(binary_compatible(bits_of({1}), bits_of({1}), 1));
  CHECK(binary_compatible(bits_of({1, 0}), bits_of({0, 1}), 2));
  CHECK(binary_compatible(bits_of({1}), bits_of({1}), 0));
  CHECK_THROWS_AS(binary_compatible(bits_of({1}), bits_of({1}), 2), InvalidParameter);
}

TEST_CASE("binary compatibility agrees with the deletion oracle") {
  for (long n = 1; n <= 4; ++n)
    for (unsigned a = 0; a < (1u << n); ++a)
      for (unsigned b = 0; b < (1u << n); ++b) {
        auto z0 = bits_from_mask(a, n), z1 = bits_from_mask(b, n);
        REQUIRE(binary_compatible(z0, z1, n) == deletion_oracle(z0, z1, n));
      }
  for (long n = 5; n <= 6; ++n)
    for (int trial = 0; trial < 200; ++trial) {
      RngStream s(314, static_cast<std::uint64_t>(n * 1000 + trial));
      auto z0 = bits_from_mask(static_cast<unsigned>(s.uniform_below(1u << n)), n);
      auto z1 = bits_from_mask(static_cast<unsigned>(s.uniform_below(1u << n)), n);
      REQUIRE(binary_compatible(z0, z1, n) == deletion_oracle(z0, z1, n));
    }
}

TEST_CASE("binary witness moves are valid and reach the horizon") {
  for (int trial = 0; trial < 300; ++trial) {
    RngStream s(777, static_cast<std::uint64_t>(trial));
    const long n = 1 + static_cast<long>(s.uniform_below(12));
    auto z0 = gen_bernoulli(0.4, static_cast<std::size_t>(n),
                            RngStream(777, 400 + static_cast<std::uint64_t>(trial)));
    auto z1 = gen_bernoulli(0.4, static_cast<std::size_t>(n),
                            RngStream(777, 800 + static_cast<std::uint64_t>(trial)));
    std::vector<AlignMove> moves;
    const bool ok = binary_witness(z0, z1, n, moves);
    REQUIRE(ok == binary_compatible(z0, z1, n));
    if (!ok) continue;
    long i = 0, j = 0;
    for (auto mv : moves) {
      switch (mv) {
        case AlignMove::Emit:
          REQUIRE_FALSE((z0[static_cast<std::size_t>(i)] == 1 &&
                         z1[static_cast<std::size_t>(j)] == 1));
          ++i, ++j;
          break;
        case AlignMove::Skip0:
          REQUIRE(z0[static_cast<std::size_t>(i)] == 0);
          ++i;
          break;
        case AlignMove::Skip1:
          REQUIRE(z1[static_cast<std::size_t>(j)] == 0);
          ++j;
          break;
      }
    }
    CHECK(i == n);
    CHECK(j == n);
  }
}
