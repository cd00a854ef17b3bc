#pragma once

// Test-side oracles, kept independent of the library code paths they check:
// direct-formula timer/cost evaluation, exact threshold-policy evaluation for
// the per-item MDP, and distribution-moment helpers for sampler statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

// Straightforward transcription of the timer closed form (naive sqrt form,
// deliberately not the library's cancellation-free arrangement).
inline double timer_direct(double b, double eta, double lambda, double cf, double ca,
                           double alpha) {
    const double bracket = std::sqrt(1.0 + 2.0 * b * (eta * cf - alpha) / (ca * lambda)) - 1.0;
    return std::max(bracket, 0.0) / eta;
}

inline double cost_item_direct(double b, double eta, double lambda, double cf, double ca,
                               double tau) {
    return eta * (0.5 * ca * lambda * eta * tau * tau + b * cf) / (1.0 + eta * tau);
}

inline double occupancy_item_direct(double b, double eta, double tau) {
    const double x = eta * tau;
    return b * x / (1.0 + x);
}

// Exact discounted value at s = 1 of the threshold policy "fetch iff s > th"
// on the capped per-item chain (th == s_max means never fetch).
inline double threshold_value_at_1(double F, double kappa, double q, std::size_t s_max,
                                   std::size_t th) {
    if (th >= s_max) {
        std::vector<double> v(s_max + 2, 0.0);
        v[s_max] = kappa * static_cast<double>(s_max) / (1.0 - q);
        for (std::size_t s = s_max - 1; s >= 1; --s) {
            v[s] = kappa * static_cast<double>(s) + q * v[s + 1];
            if (s == 1) {
                break;
            }
        }
        return v[1];
    }
    double a = 0.0;
    double qpow = 1.0;
    for (std::size_t j = 0; j < th; ++j) {
        a += qpow * kappa * static_cast<double>(1 + j);
        qpow *= q;
    }
    // v(1) = A + q^th (F + q v(1))
    return (a + qpow * F) / (1.0 - qpow * q);
}

// Brute-force enumeration of all threshold policies; returns the minimizer.
inline std::size_t best_threshold_brute_force(double F, double kappa, double q,
                                              std::size_t s_max) {
    std::size_t best = 0;
    double best_v = threshold_value_at_1(F, kappa, q, s_max, 0);
    for (std::size_t th = 1; th <= s_max; ++th) {
        const double v = threshold_value_at_1(F, kappa, q, s_max, th);
        if (v < best_v) {
            best_v = v;
            best = th;
        }
    }
    return best;
}

struct MomentBand {
    double expected = 0.0;
    double three_sigma = 0.0;
};

// 3-sigma acceptance band for the sample mean of n Gamma(shape, scale) draws.
inline MomentBand gamma_mean_band(double shape, double scale, std::size_t n) {
    const double mean = shape * scale;
    const double sd = std::sqrt(shape) * scale;
    return {mean, 3.0 * sd / std::sqrt(static_cast<double>(n))};
}

// 3-sigma band for the unbiased sample variance; uses the Gamma fourth
// central moment mu4 = 3 sigma^4 (1 + 2/shape).
inline MomentBand gamma_variance_band(double shape, double scale, std::size_t n) {
    const double var = shape * scale * scale;
    const double mu4 = 3.0 * var * var * (1.0 + 2.0 / shape);
    const double nd = static_cast<double>(n);
    const double var_of_s2 = (mu4 - var * var * (nd - 3.0) / (nd - 1.0)) / nd;
    return {var, 3.0 * std::sqrt(var_of_s2)};
}

// One-sample Kolmogorov-Smirnov statistic against the Exponential(rate) CDF
// with fully specified parameters.
inline double ks_statistic_exponential(std::vector<double> xs, double rate) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = 1.0 - std::exp(-rate * xs[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(cdf - lo, hi - cdf));
    }
    return d;
}

inline double mean_of(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) {
        m += x;
    }
    return m / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace oracles
