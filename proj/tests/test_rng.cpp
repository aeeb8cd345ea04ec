#include "ramdp/rng.hpp"

#include <doctest.h>

#include <vector>

using namespace ramdp;

TEST_CASE("rng: identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: repetition streams differ") {
    Rng a = Rng::for_repetition(7, 0);
    Rng b = Rng::for_repetition(7, 1);
    int equal = 0;
    for (int i = 0; i < 100; ++i)
        if (a.next_u64() == b.next_u64())
            ++equal;
    CHECK(equal == 0);
}

TEST_CASE("rng: unit doubles stay in [0,1) and average near 1/2") {
    Rng rng(123);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("rng: categorical sampling matches weights") {
    Rng rng(99);
    const std::vector<double> weights = {0.2, 0.5, 0.3};
    std::vector<int> hits(3, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i)
        hits[rng.sample(weights)]++;
    for (int i = 0; i < 3; ++i)
        CHECK(static_cast<double>(hits[i]) / n == doctest::Approx(weights[i]).epsilon(0.05));
}

TEST_CASE("rng: zero-weight entries are never drawn") {
    Rng rng(5);
    const std::vector<double> weights = {0.0, 1.0, 0.0};
    for (int i = 0; i < 1000; ++i)
        REQUIRE(rng.sample(weights) == 1);
}
