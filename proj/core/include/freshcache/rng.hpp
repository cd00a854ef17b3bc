#pragma once

#include <cstdint>
#include <vector>

namespace freshcache {

// Seeded, platform-independent random stream. One stream per (item, purpose)
// pair, derived from the master seed by a splitmix64 key schedule, so that the
// sample sequence of any stream is independent of how the others are consumed.
//
// Generator is xoshiro256++; all samplers below are written against it rather
// than <random> distributions so that traces are reproducible across
// standard-library implementations.
class RngStream {
public:
    // purpose values used across the library
    enum Purpose : std::uint64_t {
        kArrivals = 0,
        kVersions = 1,
        kExploration = 2,
        kGeneric = 3,
    };

    RngStream(std::uint64_t master_seed, std::uint64_t item, std::uint64_t purpose);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform01();

    // Exponential with the given mean (> 0); strictly positive.
    double exponential(double mean);

    // Standard normal (Marsaglia polar method, spare cached in the stream).
    double normal();

    // Gamma(shape, scale), exact for all shape > 0 (Marsaglia–Tsang, with the
    // power-of-uniform boost for shape < 1 evaluated in log space so tiny
    // draws survive; results clamped to >= 1e-300 to stay strictly positive).
    double gamma(double shape, double scale);

    // Poisson(mean): Knuth product-of-uniforms below mean 10, Hormann's
    // transformed rejection (PTRS) above. Exact for all means.
    std::int64_t poisson(double mean);

private:
    std::uint64_t state_[4];
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

// Arrival process law for a single item's request stream.
enum class ArrivalLaw { PoissonProcess, GammaRenewal };

// Draw the next interarrival gap for an item with mean request rate
// item_rate = beta * p_n. Exponential for Poisson (and GammaRenewal with
// omega == 1, which shares the code path), Gamma(omega, 1/(omega*item_rate))
// otherwise. Throws std::invalid_argument when item_rate <= 0.
double next_interarrival(RngStream& stream, ArrivalLaw law, double omega, double item_rate);

// Lazily sampled Poisson version counters, one per item. Advancing an item's
// clock to time t adds a Poisson(lambda * dt) increment; by Poisson
// additivity, advancing over consecutive subintervals is distributionally
// identical to one advance over their union.
class VersionClock {
public:
    explicit VersionClock(std::size_t n_items);

    // Returns the backend version after advancing item's clock to to_time.
    // Throws std::invalid_argument if to_time precedes the item's clock.
    std::int64_t advance(std::size_t item, double to_time, double lambda, RngStream& stream);

    std::int64_t version(std::size_t item) const { return versions_[item]; }
    double last_advanced_at(std::size_t item) const { return times_[item]; }

private:
    std::vector<std::int64_t> versions_;
    std::vector<double> times_;
};

}  // namespace freshcache
