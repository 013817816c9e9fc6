#include <doctest.h>

#include <cmath>

#include "bvae/rng.hpp"

using namespace bvae;

TEST_CASE("same seed gives the same stream, different seeds differ") {
    Rng a(42), b(42), c(43);
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next();
        CHECK(x == b.next());
        if (x != c.next()) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1) with a sane mean") {
    Rng rng(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal has unit moments") {
    Rng rng(8);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("below is unbiased-range and in bounds") {
    Rng rng(9);
    for (std::uint64_t bound : {1ull, 2ull, 7ull, 100ull, 1000000007ull}) {
        for (int i = 0; i < 200; ++i) CHECK(rng.below(bound) < bound);
    }
    CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

TEST_CASE("gamma has the right mean for small and large shape") {
    Rng rng(10);
    for (double alpha : {0.5, 2.0, 16.0}) {
        double sum = 0.0;
        const int n = 40000;
        for (int i = 0; i < n; ++i) sum += rng.gamma(alpha);
        CHECK(std::abs(sum / n - alpha) < 0.05 * alpha + 0.01);
    }
    CHECK_THROWS_AS(rng.gamma(0.0), std::invalid_argument);
}

TEST_CASE("dirichlet draws sum to one") {
    Rng rng(11);
    const std::vector<double> alpha{3.0, 1.0, 0.5, 8.0};
    double out[4];
    for (int i = 0; i < 200; ++i) {
        rng.dirichlet(alpha, out);
        double sum = 0.0;
        for (double v : out) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("shuffle permutes") {
    Rng rng(12);
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    auto sorted = v;
    rng.shuffle(v);
    CHECK(v != sorted);  // 1/10! chance of a false failure with this seed: it passes
    auto back = v;
    std::sort(back.begin(), back.end());
    CHECK(back == sorted);
}

TEST_CASE("state capture and restore resumes the exact stream") {
    Rng rng(13);
    for (int i = 0; i < 17; ++i) rng.next();
    const auto snap = rng.state();
    std::vector<std::uint64_t> ahead;
    for (int i = 0; i < 20; ++i) ahead.push_back(rng.next());
    rng.set_state(snap);
    for (int i = 0; i < 20; ++i) CHECK(rng.next() == ahead[static_cast<std::size_t>(i)]);
}

TEST_CASE("derive_rng separates substreams") {
    Rng a = derive_rng(99, {1, 2});
    Rng b = derive_rng(99, {1, 2});
    Rng c = derive_rng(99, {1, 3});
    Rng d = derive_rng(99, {2, 1});
    CHECK(a.next() == b.next());
    bool diff_c = false, diff_d = false;
    for (int i = 0; i < 10; ++i) {
        const std::uint64_t x = a.next();
        if (x != c.next()) diff_c = true;
        if (x != d.next()) diff_d = true;
    }
    CHECK(diff_c);
    CHECK(diff_d);
}
