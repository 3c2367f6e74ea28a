#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "saddleperm/rng.hpp"

using namespace saddleperm;

TEST_CASE("seed fixes the stream") {
    Rng a(42), b(42), c(43);
    bool any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(any_diff);
}

TEST_CASE("derived streams are distinct and reproducible") {
    Rng a = derive_stream(7, streams::permutation, 0);
    Rng b = derive_stream(7, streams::permutation, 1);
    Rng a2 = derive_stream(7, streams::permutation, 0);
    CHECK(a.next_u64() != b.next_u64());
    Rng a3 = derive_stream(7, streams::permutation, 0);
    CHECK(a2.next_u64() == a3.next_u64());
    CHECK(derive_seed(7, streams::permutation, 0) !=
          derive_seed(7, streams::sphere_direction, 0));
}

TEST_CASE("Fisher-Yates shuffles of 4 items hit all 24 orders uniformly") {
    const long reps = 100000;
    std::map<std::vector<int>, long> counts;
    for (long l = 0; l < reps; ++l) {
        Rng rng = derive_stream(99, streams::permutation, static_cast<std::uint64_t>(l));
        std::vector<int> v{0, 1, 2, 3};
        rng.shuffle(v);
        ++counts[v];
    }
    CHECK(counts.size() == 24);
    const double p = 1.0 / 24.0;
    const double se = std::sqrt(p * (1.0 - p) / reps);
    for (const auto& [order, count] : counts) {
        const double freq = static_cast<double>(count) / reps;
        CHECK(std::fabs(freq - p) <= 5.0 * se);
    }
}

TEST_CASE("unit vectors have norm one") {
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const std::vector<double> s = rng.unit_vector(3);
        double norm_sq = 0.0;
        for (double c : s) norm_sq += c * c;
        CHECK(std::fabs(norm_sq - 1.0) <= 1e-12);
    }
}

TEST_CASE("normal draws have the right first two moments") {
    Rng rng(8);
    const int reps = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / reps;
    const double var = sum_sq / reps - mean * mean;
    CHECK(std::fabs(mean) <= 5.0 / std::sqrt(static_cast<double>(reps)));
    CHECK(std::fabs(var - 1.0) <= 5.0 * std::sqrt(2.0 / reps));
}

TEST_CASE("below(n) is in range and roughly uniform") {
    Rng rng(9);
    std::vector<long> counts(5, 0);
    const long reps = 50000;
    for (long i = 0; i < reps; ++i) ++counts[static_cast<std::size_t>(rng.below(5))];
    for (long c : counts) {
        const double freq = static_cast<double>(c) / reps;
        CHECK(std::fabs(freq - 0.2) <= 5.0 * std::sqrt(0.2 * 0.8 / reps));
    }
}
