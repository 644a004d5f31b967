#include "demonlab/percolation.hpp"

#include <algorithm>

namespace demonlab {
namespace {

// Solve r(i) = s(i) | (r(i-1) & a(i)) across a packed row; a(i) gates the
// edge from i-1 into i. Returns the top bit for carry into the next word.
inline std::uint64_t fill_word(std::uint64_t s, std::uint64_t a, std::uint64_t carry_in,
                               std::uint64_t& r_out) {
  std::uint64_t r = s | (carry_in & a & 1ull);
  std::uint64_t p = a;
  for (int d = 1; d < 64; d <<= 1) {
    r |= (r << d) & p;
    p &= p << d;
  }
  r_out = r;
  return r >> 63;
}

inline void fill_row(const std::uint64_t* seeds, const std::uint64_t* gate,
                     std::uint64_t* out, long words) {
  std::uint64_t carry = 0;
  for (long w = 0; w < words; ++w) carry = fill_word(seeds[w], gate[w], carry, out[w]);
}

}  // namespace

bool closed_point(const ColorSequence& x, const ColorSequence& y, long i, long j) {
  if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= x.size() ||
      static_cast<std::size_t>(j) >= y.size())
    throw InvalidParameter("closed_point: index out of range");
  return x[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)];
}

ReachSet::ReachSet(const ColorSequence& x, const ColorSequence& y, long n)
    : n_(n), words_((n + 1 + 63) / 64), x_(x), y_(y) {
  if (n < 0 || x.size() < static_cast<std::size_t>(n + 1) ||
      y.size() < static_cast<std::size_t>(n + 1))
    throw InvalidParameter("reach_set: sequences too short for window");
  rows_.assign(static_cast<std::size_t>(words_) * (n + 1), 0);

  std::vector<std::uint64_t> open_row(words_), seeds(words_);
  auto compute_open = [&](long j) {
    std::fill(open_row.begin(), open_row.end(), 0);
    const int yc = y[static_cast<std::size_t>(j)];
    for (long i = 0; i <= n_; ++i)
      if (x[static_cast<std::size_t>(i)] != yc)
        open_row[i >> 6] |= 1ull << (i & 63);
  };

  // Row 0: origin reachable by convention even if closed.
  compute_open(0);
  std::fill(seeds.begin(), seeds.end(), 0);
  seeds[0] = 1;
  fill_row(seeds.data(), open_row.data(), &rows_[0], words_);
  rows_[0] |= 1;  // keep the origin bit even when closed

  for (long j = 1; j <= n_; ++j) {
    compute_open(j);
    const std::uint64_t* below = &rows_[static_cast<std::size_t>(words_) * (j - 1)];
    for (long w = 0; w < words_; ++w) seeds[w] = below[w] & open_row[w];
    fill_row(seeds.data(), open_row.data(), &rows_[static_cast<std::size_t>(words_) * j],
             words_);
  }
}

bool ReachSet::reach(long i, long j) const {
  return (rows_[static_cast<std::size_t>(words_) * j + (i >> 6)] >> (i & 63)) & 1;
}

bool ReachSet::open(long i, long j) const {
  return x_[static_cast<std::size_t>(i)] != y_[static_cast<std::size_t>(j)];
}

Witness ReachSet::witness(long i, long j) const {
  if (!reach(i, j)) return Witness::None;
  if (i == 0 && j == 0) return Witness::Origin;
  if (i > 0 && reach(i - 1, j)) return Witness::Left;
  return Witness::Below;
}

long ReachSet::frontier() const {
  long best = 0;
  for (long j = 0; j <= n_; ++j)
    for (long i = 0; i <= n_; ++i)
      if (reach(i, j)) best = std::max(best, std::max(i, j));
  return best;
}

ReachSet reach_set(const ColorSequence& x, const ColorSequence& y, long n) {
  return ReachSet(x, y, n);
}

bool reachable_in_rect(const ColorSequence& x, const ColorSequence& y,
                       const RectSpec& rect, bool confined) {
  const long x0 = rect.start.x, y0 = rect.start.y, x1 = rect.end.x, y1 = rect.end.y;
  if (x0 > x1 || y0 > y1 || x0 < 0 || y0 < 0)
    throw InvalidParameter("reachable_in_rect: malformed rectangle");
  if (x.size() < static_cast<std::size_t>(x1 + 1) ||
      y.size() < static_cast<std::size_t>(y1 + 1))
    throw InvalidParameter("reachable_in_rect: sequences too short");
  if (x0 == x1 && y0 == y1) return true;

  const long w = x1 - x0 + 1, h = y1 - y0 + 1;
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(w) * h, 0);
  auto at = [&](long i, long j) -> std::uint8_t& {
    return reach[static_cast<std::size_t>(j - y0) * w + (i - x0)];
  };
  auto allowed = [&](long i, long j) {
    if (!confined) return true;
    if (rect.kind == RectKind::LeftOpen && i == x0) return false;
    if (rect.kind == RectKind::BottomOpen && j == y0) return false;
    return true;
  };
  at(x0, y0) = 1;  // path start, by convention
  for (long j = y0; j <= y1; ++j)
    for (long i = x0; i <= x1; ++i) {
      if (i == x0 && j == y0) continue;
      if (!allowed(i, j)) continue;
      if (x[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)]) continue;
      const bool from_left = i > x0 && at(i - 1, j);
      const bool from_below = j > y0 && at(i, j - 1);
      if (from_left || from_below) at(i, j) = 1;
    }
  return at(x1, y1) != 0;
}

BlockingRecord escape_record(const ColorSequence& x, const ColorSequence& y, long n_max) {
  ReachSet rs(x, y, n_max);
  BlockingRecord rec;
  rec.n_max = n_max;
  rec.escape_flags.assign(static_cast<std::size_t>(n_max) + 1, 0);
  for (long j = 0; j <= n_max; ++j)
    for (long i = 0; i <= n_max; ++i)
      if (rs.reach(i, j)) rec.escape_flags[static_cast<std::size_t>(std::max(i, j))] = 1;
  rec.escape_flags[0] = 1;
  // A point on ring n+1 has a path through ring n, so flags are already
  // non-increasing; nothing to fix up.
  return rec;
}

namespace {

// Packed forward table for the alignment DP; returns all rows so the
// witness walk can reuse them.
std::vector<std::uint64_t> binary_table(const BitSequence& z0, const BitSequence& z1,
                                        long n) {
  if (z0.size() < static_cast<std::size_t>(n) || z1.size() < static_cast<std::size_t>(n))
    throw InvalidParameter("binary_compatible: sequences shorter than horizon");
  const long words = (n + 1 + 63) / 64;
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(words) * (n + 1), 0);

  // gate(i) for i>=1: within-row move allowed iff z0[i-1]==0.
  std::vector<std::uint64_t> gate(words, 0), seeds(words, 0), diag(words, 0);
  for (long i = 1; i <= n; ++i)
    if (z0[static_cast<std::size_t>(i - 1)] == 0) gate[i >> 6] |= 1ull << (i & 63);

  seeds[0] = 1;
  fill_row(seeds.data(), gate.data(), &rows[0], words);

  for (long j = 1; j <= n; ++j) {
    const int bit1 = z1[static_cast<std::size_t>(j - 1)];
    // diag(i) for i>=1: emit allowed iff not both bits are 1.
    for (long w = 0; w < words; ++w) diag[w] = ~0ull;
    if (bit1 == 1) {
      std::fill(diag.begin(), diag.end(), 0);
      for (long i = 1; i <= n; ++i)
        if (z0[static_cast<std::size_t>(i - 1)] == 0) diag[i >> 6] |= 1ull << (i & 63);
    }
    const std::uint64_t* prev = &rows[static_cast<std::size_t>(words) * (j - 1)];
    std::uint64_t carry = 0;
    for (long w = 0; w < words; ++w) {
      std::uint64_t s = (bit1 == 0 ? prev[w] : 0) | (((prev[w] << 1) | carry) & diag[w]);
      carry = prev[w] >> 63;
      seeds[w] = s;
    }
    fill_row(seeds.data(), gate.data(), &rows[static_cast<std::size_t>(words) * j], words);
  }
  return rows;
}

}  // namespace

bool binary_compatible(const BitSequence& z0, const BitSequence& z1, long n) {
  if (n == 0) return true;
  auto rows = binary_table(z0, z1, n);
  const long words = (n + 1 + 63) / 64;
  return (rows[static_cast<std::size_t>(words) * n + (n >> 6)] >> (n & 63)) & 1;
}

bool binary_witness(const BitSequence& z0, const BitSequence& z1, long n,
                    std::vector<AlignMove>& moves_out) {
  moves_out.clear();
  if (n == 0) return true;
  // Backward reachability to (n,n): run the same DP on reversed sequences.
  BitSequence r0, r1;
  r0.values.assign(z0.values.rbegin() + (z0.size() - n), z0.values.rend());
  r1.values.assign(z1.values.rbegin() + (z1.size() - n), z1.values.rend());
  auto back = binary_table(r0, r1, n);
  const long words = (n + 1 + 63) / 64;
  auto wins = [&](long i, long j) {
    const long ri = n - i, rj = n - j;
    return (back[static_cast<std::size_t>(words) * rj + (ri >> 6)] >> (ri & 63)) & 1;
  };
  if (!wins(0, 0)) return false;
  long i = 0, j = 0;
  while (i < n || j < n) {
    if (i < n && j < n &&
        !(z0[static_cast<std::size_t>(i)] == 1 && z1[static_cast<std::size_t>(j)] == 1) &&
        wins(i + 1, j + 1)) {
      moves_out.push_back(AlignMove::Emit);
      ++i, ++j;
    } else if (i < n && z0[static_cast<std::size_t>(i)] == 0 && wins(i + 1, j)) {
      moves_out.push_back(AlignMove::Skip0);
      ++i;
    } else if (j < n && z1[static_cast<std::size_t>(j)] == 0 && wins(i, j + 1)) {
      moves_out.push_back(AlignMove::Skip1);
      ++j;
    } else {
      return false;  // unreachable if the table is consistent
    }
  }
  return true;
}

}  // namespace demonlab
