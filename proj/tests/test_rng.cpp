#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "faassim/rng.hpp"

using namespace faassim;

TEST_CASE("identical seeds give identical streams") {
    Rng a(987654321), b(987654321);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams with different purposes are distinct") {
    Rng a = Rng::substream(7, "arrivals");
    Rng b = Rng::substream(7, "exec-times");
    Rng a2 = Rng::substream(7, "arrivals");
    int diff = 0;
    for (int i = 0; i < 64; ++i) {
        const auto x = a.next_u64();
        REQUIRE(x == a2.next_u64());
        if (x != b.next_u64()) ++diff;
    }
    CHECK(diff > 60);
}

TEST_CASE("uniform01 stays inside the open interval") {
    Rng rng(5);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("lognormal median matches exp(mu)") {
    Rng rng(42);
    const int n = 1'000'000;
    std::vector<double> samples(n);
    for (auto& s : samples) s = sample_lognormal(rng, -0.38, 2.36);
    std::nth_element(samples.begin(), samples.begin() + n / 2, samples.end());
    const double median = samples[n / 2];
    const double expected = std::exp(-0.38); // 0.6839
    CHECK(std::abs(median - expected) <= 0.02 * expected);

    // The fitted distribution's median sits near the production trace's
    // reported 600 ms median.
    CHECK(std::abs(expected - 0.6) <= 0.15 * expected);
}

TEST_CASE("lognormal degenerates to exp(mu) as sigma shrinks") {
    Rng rng(43);
    for (int i = 0; i < 1000; ++i) {
        const double s = sample_lognormal(rng, 0.0, 1e-12);
        REQUIRE(s == doctest::Approx(1.0).epsilon(1e-9));
    }
    REQUIRE_THROWS_AS(sample_lognormal(rng, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_lognormal(rng, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("exponential mean, variance and CDF") {
    Rng rng(44);
    const int n = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = sample_exponential(rng, 8.9);
        REQUIRE(s > 0.0);
        sum += s;
        sum_sq += s * s;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean - 8.9) <= 0.02 * 8.9);
    CHECK(std::abs(var - mean * mean) <= 0.05 * mean * mean);

    // CDF at 1.0 for mean 1: 1 - e^-1
    int below = 0;
    for (int i = 0; i < n; ++i)
        if (sample_exponential(rng, 1.0) <= 1.0) ++below;
    const double frac = static_cast<double>(below) / n;
    CHECK(std::abs(frac - (1.0 - std::exp(-1.0))) <= 0.01);

    REQUIRE_THROWS_AS(sample_exponential(rng, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_exponential(rng, -2.0), std::invalid_argument);
}

TEST_CASE("sample_cumulative respects the weights") {
    Rng rng(45);
    const std::vector<double> cumulative{0.5, 0.75, 1.0};
    int counts[3] = {0, 0, 0};
    const int n = 200000;
    for (int i = 0; i < n; ++i) ++counts[sample_cumulative(rng, cumulative)];
    CHECK(std::abs(counts[0] / double(n) - 0.50) < 0.01);
    CHECK(std::abs(counts[1] / double(n) - 0.25) < 0.01);
    CHECK(std::abs(counts[2] / double(n) - 0.25) < 0.01);
}

TEST_CASE("bounded_hash spreads evenly") {
    const std::uint64_t n = 4;
    std::vector<int> counts(n, 0);
    const int trials = 50000;
    for (int i = 0; i < trials; ++i) ++counts[bounded_hash(mix64(static_cast<std::uint64_t>(i)), n)];
    for (auto c : counts)
        CHECK(std::abs(c / double(trials) - 0.25) < 0.01);
}
