#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "debtlab/rng.hpp"

using namespace debtlab;

TEST_CASE("same seed reproduces the stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams are order independent") {
    Rng root(7);
    root.next_u64();  // consuming the parent must not move the children
    Rng child_after = root.substream("left");
    CHECK(Rng(7).substream("left").next_u64() == child_after.next_u64());
    CHECK(Rng(7).substream("left").next_u64() != Rng(7).substream("right").next_u64());
    CHECK(Rng(7).substream(1).next_u64() != Rng(7).substream(2).next_u64());
}

TEST_CASE("uniform stays in range and covers it") {
    Rng rng(3);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("normal moments are close at n=50000") {
    Rng rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("below is in range and hits every residue") {
    Rng rng(5);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS(rng.below(0));
}

TEST_CASE("weighted respects zero weights") {
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = rng.weighted({0.0, 1.0, 0.0, 2.0});
        CHECK((k == 1 || k == 3));
    }
    CHECK_THROWS(rng.weighted({0.0, 0.0}));
}

TEST_CASE("sample_without_replacement yields distinct sorted indices") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        auto s = rng.sample_without_replacement(10, 4);
        REQUIRE(s.size() == 4);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) CHECK(s[i] < s[i + 1]);
        for (std::size_t v : s) CHECK(v < 10);
    }
    auto all = rng.sample_without_replacement(5, 5);
    CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("fnv1a64 matches reference values") {
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
}
