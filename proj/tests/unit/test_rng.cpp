#include <cmath>
#include <vector>

#include "doctest.h"
#include "freshcache/rng.hpp"
#include "support/oracles.hpp"

using namespace freshcache;

TEST_CASE("streams are reproducible per (seed, item, purpose)") {
    RngStream a(42, 3, RngStream::kArrivals);
    RngStream b(42, 3, RngStream::kArrivals);
    for (int i = 0; i < 200; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    RngStream c(42, 3, RngStream::kVersions);
    RngStream d(43, 3, RngStream::kArrivals);
    bool all_same_c = true;
    bool all_same_d = true;
    RngStream a2(42, 3, RngStream::kArrivals);
    for (int i = 0; i < 16; ++i) {
        const auto x = a2.next_u64();
        all_same_c &= (c.next_u64() == x);
        all_same_d &= (d.next_u64() == x);
    }
    CHECK_FALSE(all_same_c);
    CHECK_FALSE(all_same_d);
}

TEST_CASE("consuming one stream never perturbs another") {
    RngStream j1(7, 1, RngStream::kArrivals);
    std::vector<std::uint64_t> clean;
    for (int i = 0; i < 64; ++i) {
        clean.push_back(j1.next_u64());
    }

    RngStream j2(7, 1, RngStream::kArrivals);
    RngStream k(7, 2, RngStream::kArrivals);
    for (int i = 0; i < 64; ++i) {
        if (i % 3 == 0) {
            (void)k.next_u64();  // interleaved consumption elsewhere
        }
        CHECK(j2.next_u64() == clean[i]);
    }
}

TEST_CASE("uniform01 stays strictly inside the unit interval") {
    RngStream s(1, 0, RngStream::kGeneric);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("interarrival sampling: exponential mean at omega=1") {
    RngStream s(11, 0, RngStream::kArrivals);
    const double rate = 0.005;
    const std::size_t n = 100000;
    std::vector<double> xs;
    xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs.push_back(next_interarrival(s, ArrivalLaw::PoissonProcess, 1.0, rate));
    }
    const auto band = oracles::gamma_mean_band(1.0, 1.0 / rate, n);
    CHECK(std::fabs(oracles::mean_of(xs) - band.expected) < band.three_sigma);
    for (double x : xs) {
        CHECK(x > 0.0);
    }
}

TEST_CASE("interarrival sampling: gamma variance at omega=0.5") {
    RngStream s(12, 0, RngStream::kArrivals);
    const double rate = 0.005;
    const double omega = 0.5;
    const std::size_t n = 200000;
    std::vector<double> xs;
    xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs.push_back(next_interarrival(s, ArrivalLaw::GammaRenewal, omega, rate));
    }
    const double scale = 1.0 / (omega * rate);
    const auto mean_band = oracles::gamma_mean_band(omega, scale, n);
    const auto var_band = oracles::gamma_variance_band(omega, scale, n);
    CHECK(std::fabs(oracles::mean_of(xs) - mean_band.expected) < mean_band.three_sigma);
    CHECK(std::fabs(oracles::sample_variance(xs) - var_band.expected) < var_band.three_sigma);
}

TEST_CASE("gamma sampling survives tiny shapes strictly positive") {
    RngStream s(13, 0, RngStream::kGeneric);
    for (int i = 0; i < 20000; ++i) {
        const double x = s.gamma(0.001, 1e4);
        CHECK(x > 0.0);
        CHECK(std::isfinite(x));
    }
}

TEST_CASE("omega=1 gamma law shares the exponential code path") {
    RngStream a(5, 9, RngStream::kArrivals);
    RngStream b(5, 9, RngStream::kArrivals);
    for (int i = 0; i < 100; ++i) {
        CHECK(next_interarrival(a, ArrivalLaw::PoissonProcess, 1.0, 0.2) ==
              next_interarrival(b, ArrivalLaw::GammaRenewal, 1.0, 0.2));
    }
}

TEST_CASE("interarrival rejects non-positive rates") {
    RngStream s(1, 0, RngStream::kArrivals);
    CHECK_THROWS_AS(next_interarrival(s, ArrivalLaw::PoissonProcess, 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(next_interarrival(s, ArrivalLaw::GammaRenewal, 0.5, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(next_interarrival(s, ArrivalLaw::GammaRenewal, 0.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("poisson sampler hits the mean in both regimes") {
    RngStream s(14, 0, RngStream::kVersions);
    for (double mean : {0.5, 4.0, 40.0, 4000.0}) {
        const std::size_t n = 40000;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += static_cast<double>(s.poisson(mean));
        }
        const double m = sum / static_cast<double>(n);
        const double three_sigma = 3.0 * std::sqrt(mean / static_cast<double>(n));
        CHECK(std::fabs(m - mean) < three_sigma);
    }
    CHECK(s.poisson(0.0) == 0);
}

TEST_CASE("version clock: empty and static intervals add nothing") {
    RngStream s(15, 0, RngStream::kVersions);
    VersionClock clock(2);
    CHECK(clock.advance(0, 5.0, 0.0, s) == 0);   // lambda = 0
    CHECK(clock.advance(0, 5.0, 20.0, s) == 0);  // dt = 0
    CHECK_THROWS_AS(clock.advance(0, 4.0, 20.0, s), std::invalid_argument);
}

TEST_CASE("version clock: mean increment matches lambda * dt") {
    const std::size_t trials = 100000;
    double sum = 0.0;
    RngStream s(16, 0, RngStream::kVersions);
    for (std::size_t i = 0; i < trials; ++i) {
        VersionClock clock(1);
        sum += static_cast<double>(clock.advance(0, 0.5, 20.0, s));
    }
    const double mean = sum / static_cast<double>(trials);
    const double three_sigma = 3.0 * std::sqrt(10.0 / static_cast<double>(trials));
    CHECK(std::fabs(mean - 10.0) < three_sigma);
}

TEST_CASE("version clock: split advances match one big advance in law") {
    const std::size_t trials = 40000;
    double sum_split = 0.0;
    double sum_whole = 0.0;
    RngStream s1(17, 0, RngStream::kVersions);
    RngStream s2(17, 1, RngStream::kVersions);
    for (std::size_t i = 0; i < trials; ++i) {
        VersionClock a(1);
        a.advance(0, 0.2, 20.0, s1);
        a.advance(0, 0.35, 20.0, s1);
        sum_split += static_cast<double>(a.advance(0, 0.5, 20.0, s1));
        VersionClock b(1);
        sum_whole += static_cast<double>(b.advance(0, 0.5, 20.0, s2));
    }
    const double diff = (sum_split - sum_whole) / static_cast<double>(trials);
    const double three_sigma = 3.0 * std::sqrt(2.0 * 10.0 / static_cast<double>(trials));
    CHECK(std::fabs(diff) < three_sigma);
}

TEST_CASE("version clock never decreases") {
    RngStream s(18, 0, RngStream::kVersions);
    RngStream t(18, 0, RngStream::kGeneric);
    VersionClock clock(1);
    std::int64_t prev = 0;
    double now = 0.0;
    for (int i = 0; i < 2000; ++i) {
        now += t.exponential(0.3);
        const auto v = clock.advance(0, now, 5.0, s);
        CHECK(v >= prev);
        prev = v;
    }
}
