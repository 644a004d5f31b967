#include "doctest.h"

#include <array>

#include "demonlab/sequences.hpp"

using namespace demonlab;

TEST_CASE("walk on K2 alternates deterministically after the start") {
  auto seq = gen_walk(2, 4, false, RngStream(1, 0));
  REQUIRE(seq.size() == 4);
  const int a = seq[0], b = a == 1 ? 2 : 1;
  CHECK(seq[1] == b);
  CHECK(seq[2] == a);
  CHECK(seq[3] == b);
}

TEST_CASE("walk with one color and loops is constant") {
  auto seq = gen_walk(1, 3, true, RngStream(5, 0));
  CHECK(seq.values == std::vector<int>{1, 1, 1});
}

TEST_CASE("walk never repeats a color consecutively without loops") {
  for (int m : {2, 3, 5}) {
    auto seq = gen_walk(m, 2000, false, RngStream(11, static_cast<std::uint64_t>(m)));
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      REQUIRE(seq[i] != seq[i + 1]);
      REQUIRE(seq[i] >= 1);
      REQUIRE(seq[i] <= m);
    }
  }
}

TEST_CASE("walk transition frequencies on K3 are near 1/2") {
  auto seq = gen_walk(3, 100000, false, RngStream(42, 0));
  std::array<std::array<long, 4>, 4> counts{};
  std::array<long, 4> totals{};
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    ++counts[static_cast<std::size_t>(seq[i])][static_cast<std::size_t>(seq[i + 1])];
    ++totals[static_cast<std::size_t>(seq[i])];
  }
  for (int from = 1; from <= 3; ++from)
    for (int to = 1; to <= 3; ++to) {
      if (from == to) continue;
      const double freq = static_cast<double>(counts[from][to]) / totals[from];
      CHECK(freq == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_CASE("walk generation is reproducible") {
  auto a = gen_walk(4, 500, false, RngStream(77, 9));
  auto b = gen_walk(4, 500, false, RngStream(77, 9));
  CHECK(a.values == b.values);
}

TEST_CASE("walk rejects bad parameters") {
  CHECK_THROWS_AS(gen_walk(1, 5, false, RngStream(0, 0)), InvalidParameter);
  CHECK_THROWS_AS(gen_walk(3, 0, false, RngStream(0, 0)), InvalidParameter);
}

TEST_CASE("bernoulli degenerate parameters") {
  auto zeros = gen_bernoulli(0.0, 5, RngStream(3, 0));
  auto ones = gen_bernoulli(1.0, 5, RngStream(3, 0));
  CHECK(zeros.values == std::vector<std::uint8_t>{0, 0, 0, 0, 0});
  CHECK(ones.values == std::vector<std::uint8_t>{1, 1, 1, 1, 1});
}

TEST_CASE("bernoulli sample mean tracks p") {
  auto seq = gen_bernoulli(0.3, 100000, RngStream(7, 0));
  long sum = 0;
  for (auto b : seq.values) sum += b;
  CHECK(static_cast<double>(sum) / 100000 == doctest::Approx(0.3).epsilon(0.03));
}

TEST_CASE("bernoulli rejects p outside [0,1]") {
  CHECK_THROWS_AS(gen_bernoulli(-0.1, 5, RngStream(0, 0)), InvalidParameter);
  CHECK_THROWS_AS(gen_bernoulli(1.1, 5, RngStream(0, 0)), InvalidParameter);
}
