#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "support.hpp"
#include "vidart/rng.hpp"

using vidart::CounterRng;

TEST_CASE("mix64 and FNV-1a match published reference vectors") {
  // First splitmix64 output for seed 0 and the FNV-1a 64 value of "a".
  CHECK(vidart::mix64(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
  CHECK(vidart::hash_string("") == 0xcbf29ce484222325ULL);
  CHECK(vidart::hash_string("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(vidart::hash_string("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("counter draws are random-access") {
  CounterRng a(42);
  std::vector<std::uint64_t> seq;
  for (int i = 0; i < 16; ++i) seq.push_back(a.next());
  CounterRng b(42);
  for (std::uint64_t i = 0; i < 16; ++i) CHECK(b.at(i) == seq[i]);
  CounterRng c(42, 7);
  CHECK(c.next() == seq[7]);
}

TEST_CASE("derived seeds separate keys and parents") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t parent = 0; parent < 8; ++parent) {
    for (const char* key : {"a", "b", "window/x", "window/y"}) seen.insert(vidart::derive_seed(parent, key));
  }
  CHECK(seen.size() == 32);
  CHECK(vidart::derive_seed(5, "k") == vidart::derive_seed(5, "k"));
}

TEST_CASE("property: below(n) stays in range and uniform() in [0,1)") {
  testing::for_all(200, 1, [](CounterRng& rng, int) {
    const auto n = 1 + rng.below(1000);
    for (int i = 0; i < 50; ++i) {
      CHECK(rng.below(n) < n);
      const double u = rng.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  });
}

TEST_CASE("property: shuffle yields a permutation") {
  testing::for_all(100, 2, [](CounterRng& rng, int) {
    std::vector<int> v(1 + rng.below(40));
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    rng.shuffle(std::span<int>(w));
    std::sort(w.begin(), w.end());
    CHECK(w == v);
  });
}

TEST_CASE("normal draws have unit variance") {
  CounterRng rng(9);
  double s = 0.0, ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n / 2; ++i) {
    const auto [a, b] = rng.normal_pair();
    s += a + b;
    ss += a * a + b * b;
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(ss / n - mean * mean - 1.0) < 0.01);
}
