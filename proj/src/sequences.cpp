#include "demonlab/sequences.hpp"

#include <cmath>

namespace demonlab {

int walk_step(int m, bool loops, int current, RngStream& stream) {
  if (loops) return static_cast<int>(stream.uniform_below(m)) + 1;
  // Draw r in [0, m-1) and skip over the current color.
  const int r = static_cast<int>(stream.uniform_below(m - 1));
  return (r + 1 < current) ? r + 1 : r + 2;
}

ColorSequence gen_walk(int m, std::size_t n, bool loops, RngStream stream) {
  if (n == 0) throw InvalidParameter("gen_walk: n must be >= 1");
  if (loops ? m < 1 : m < 2)
    throw InvalidParameter("gen_walk: need m >= 2 (m >= 1 with loops)");
  ColorSequence seq;
  seq.m = m;
  seq.loops = loops;
  seq.values.resize(n);
  seq.values[0] = static_cast<int>(stream.uniform_below(m)) + 1;
  for (std::size_t i = 1; i < n; ++i)
    seq.values[i] = walk_step(m, loops, seq.values[i - 1], stream);
  return seq;
}

BitSequence gen_bernoulli(double p, std::size_t n, RngStream stream) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameter("gen_bernoulli: p must be in [0,1]");
  if (n == 0) throw InvalidParameter("gen_bernoulli: n must be >= 1");
  BitSequence seq;
  seq.p = p;
  seq.values.resize(n);
  if (p >= 1.0) {
    for (auto& b : seq.values) b = 1;
    return seq;
  }
  // floor(p * 2^64); long double keeps the threshold below 2^64 for p < 1.
  const long double scaled = std::ldexp(static_cast<long double>(p), 64);
  const std::uint64_t threshold = static_cast<std::uint64_t>(scaled);
  for (auto& b : seq.values) b = stream.next_u64() < threshold ? 1 : 0;
  return seq;
}

}  // namespace demonlab
