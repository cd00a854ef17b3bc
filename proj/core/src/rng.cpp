#include "freshcache/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace freshcache {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t item, std::uint64_t purpose) {
    // Absorb the key trio through splitmix so that nearby keys give unrelated states.
    std::uint64_t key = master_seed;
    std::uint64_t a = splitmix64(key);
    key ^= 0x632be59bd9b4e019ULL * (item + 1);
    std::uint64_t b = splitmix64(key);
    key ^= 0x9e6c63d0a9660f27ULL * (purpose + 1);
    std::uint64_t c = splitmix64(key);
    std::uint64_t d = splitmix64(key);
    state_[0] = a;
    state_[1] = b;
    state_[2] = c;
    state_[3] = d | 1;  // never the all-zero state
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    // 53-bit mantissa, offset by half an ulp: lands strictly inside (0, 1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double mean) {
    return -std::log(uniform01()) * mean;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * m;
    has_spare_ = true;
    return u * m;
}

double RngStream::gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) {
        throw std::invalid_argument("gamma: shape and scale must be > 0");
    }
    if (shape < 1.0) {
        // Boost trick: G(a) = G(a+1) * U^(1/a). For a ~ 1e-3 the power
        // underflows doubles, so combine in log space and clamp.
        const double g = gamma(shape + 1.0, 1.0);
        const double lx = std::log(g) + std::log(scale) + std::log(uniform01()) / shape;
        const double x = std::exp(lx);
        return x > 1e-300 ? x : 1e-300;
    }
    // Marsaglia–Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double c = (1.0 / 3.0) / std::sqrt(d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return scale * d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return scale * d * v;
        }
    }
}

std::int64_t RngStream::poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) {
        throw std::invalid_argument("poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < 10.0) {
        // Knuth: count uniforms until their product drops below e^-mean.
        const double limit = std::exp(-mean);
        double prod = 1.0;
        std::int64_t k = -1;
        do {
            prod *= uniform01();
            ++k;
        } while (prod > limit);
        return k;
    }
    // Hormann's PTRS transformed rejection.
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = uniform01() - 0.5;
        const double v = uniform01();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (kf > 9.0e18) {
            continue;
        }
        const auto k = static_cast<std::int64_t>(kf);
        if (us >= 0.07 && v <= v_r) {
            return k;
        }
        if (k < 0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
        if (lhs <= rhs) {
            return k;
        }
    }
}

double next_interarrival(RngStream& stream, ArrivalLaw law, double omega, double item_rate) {
    if (item_rate <= 0.0 || !std::isfinite(item_rate)) {
        throw std::invalid_argument("next_interarrival: item_rate must be > 0");
    }
    if (law == ArrivalLaw::PoissonProcess || omega == 1.0) {
        return stream.exponential(1.0 / item_rate);
    }
    if (omega <= 0.0) {
        throw std::invalid_argument("next_interarrival: omega must be > 0");
    }
    return stream.gamma(omega, 1.0 / (omega * item_rate));
}

VersionClock::VersionClock(std::size_t n_items)
    : versions_(n_items, 0), times_(n_items, 0.0) {}

std::int64_t VersionClock::advance(std::size_t item, double to_time, double lambda,
                                   RngStream& stream) {
    const double dt = to_time - times_[item];
    if (dt < 0.0) {
        throw std::invalid_argument("VersionClock::advance: to_time precedes the clock");
    }
    if (dt > 0.0 && lambda > 0.0) {
        versions_[item] += stream.poisson(lambda * dt);
    }
    times_[item] = to_time;
    return versions_[item];
}

}  // namespace freshcache
