#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "demonlab/rng.hpp"

namespace demonlab {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One realization of a token walk on K_m. Colors are 1-based.
struct ColorSequence {
  int m = 2;
  bool loops = false;
  std::vector<int> values;

  std::size_t size() const { return values.size(); }
  int operator[](std::size_t i) const { return values[i]; }
};

// One realization of the binary-variant source.
struct BitSequence {
  double p = 0.0;
  std::vector<std::uint8_t> values;

  std::size_t size() const { return values.size(); }
  int operator[](std::size_t i) const { return values[i]; }
};

// Walk on K_m: start uniform on {1..m}; each step uniform over the m-1
// other colors, or over all m colors when loops are allowed.
ColorSequence gen_walk(int m, std::size_t n, bool loops, RngStream stream);

// Independent bits, bit = 1 iff the 64-bit draw u < floor(p * 2^64).
BitSequence gen_bernoulli(double p, std::size_t n, RngStream stream);

// One walk step from `current`, drawing from `stream`.
int walk_step(int m, bool loops, int current, RngStream& stream);

}  // namespace demonlab
