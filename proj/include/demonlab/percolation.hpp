#pragma once

#include <cstdint>
#include <vector>

#include "demonlab/sequences.hpp"

namespace demonlab {

struct LatticePoint {
  long x = 0;
  long y = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

enum class RectKind { Closed, LeftOpen, BottomOpen };

struct RectSpec {
  LatticePoint start;
  LatticePoint end;
  RectKind kind = RectKind::Closed;
};

enum class Witness : std::uint8_t { None, Origin, Left, Below };

// Oriented reachability table over [0,n]^2, bit-packed per row.
// reach(0,0) holds by convention even when the origin is closed; elsewhere
// reach(i,j) = open(i,j) && (reach(i-1,j) || reach(i,j-1)).
class ReachSet {
 public:
  ReachSet(const ColorSequence& x, const ColorSequence& y, long n);

  long n() const { return n_; }
  bool reach(long i, long j) const;
  bool open(long i, long j) const;
  Witness witness(long i, long j) const;

  // Largest n' such that some reachable point has max coordinate n' (0 if
  // only the origin is reachable).
  long frontier() const;

 private:
  long n_;
  long words_;
  ColorSequence x_;
  ColorSequence y_;
  std::vector<std::uint64_t> rows_;   // reach bits, row-major over j
};

struct BlockingRecord {
  long n_max = 0;
  std::vector<std::uint8_t> escape_flags;  // index 1..n_max

  bool escape(long n) const { return escape_flags[static_cast<std::size_t>(n)] != 0; }
};

bool closed_point(const ColorSequence& x, const ColorSequence& y, long i, long j);

ReachSet reach_set(const ColorSequence& x, const ColorSequence& y, long n);

// True iff an oriented open path runs from rect.start to rect.end. With
// confined=true every point after the first stays inside the rectangle per
// its kind; otherwise the closed bounding box is usable.
bool reachable_in_rect(const ColorSequence& x, const ColorSequence& y,
                       const RectSpec& rect, bool confined);

BlockingRecord escape_record(const ColorSequence& x, const ColorSequence& y, long n_max);

// Binary variant: true iff state (n,n) is reachable in the alignment DP
// (skip a 0 from either side, or emit a pair that is not 1-1).
bool binary_compatible(const BitSequence& z0, const BitSequence& z1, long n);

// Alignment moves for a binary witness.
enum class AlignMove : std::uint8_t { Emit, Skip0, Skip1 };

// Witness extraction; empty optional-like: returns false if incompatible.
bool binary_witness(const BitSequence& z0, const BitSequence& z1, long n,
                    std::vector<AlignMove>& moves_out);

}  // namespace demonlab
