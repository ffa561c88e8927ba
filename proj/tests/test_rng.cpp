#include <doctest.h>

#include <set>

#include "stancebias/rng.hpp"

using namespace stancebias;

TEST_CASE("fnv1a64 matches known vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("stream_key is deterministic and index-sensitive") {
    CHECK(stream_key(7, 0) == stream_key(7, 0));
    CHECK(stream_key(7, 0) != stream_key(7, 1));
    CHECK(stream_key(7, 0) != stream_key(8, 0));
}

TEST_CASE("below stays within bound and covers small ranges") {
    Rng rng(1234);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("sample_indices draws k distinct in-range indices") {
    Rng rng(99);
    auto sample = rng.sample_indices(50, 20);
    CHECK(sample.size() == 20);
    std::set<std::size_t> unique(sample.begin(), sample.end());
    CHECK(unique.size() == 20);
    for (std::size_t i : sample) CHECK(i < 50);

    // identical seed, identical draw
    Rng rng2(99);
    CHECK(rng2.sample_indices(50, 20) == sample);
}

TEST_CASE("sample_indices covers the whole range when k = n") {
    Rng rng(5);
    auto sample = rng.sample_indices(10, 10);
    std::set<std::size_t> unique(sample.begin(), sample.end());
    CHECK(unique.size() == 10);
}

TEST_CASE("unit_double lies in [0,1)") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        double u = rng.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
