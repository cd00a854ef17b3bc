#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "freshcache/rng.hpp"

namespace freshcache {

// Static item population: sizes b_n, request popularity p_n, refresh rates
// lambda_n. Immutable once validated; shared by policies and the engine.
struct ItemCatalog {
    std::size_t n_items = 0;
    std::vector<double> sizes;          // b_n > 0, abstract size units
    std::vector<double> popularity;     // p_n > 0, sums to 1
    std::vector<double> refresh_rates;  // lambda_n >= 0, updates/second

    double total_size() const;
};

struct DemandSpec {
    double beta = 0.0;  // aggregate request rate, requests/second
    ArrivalLaw arrival_law = ArrivalLaw::PoissonProcess;
    double omega = 1.0;  // Gamma shape; relevant only for GammaRenewal

    double item_rate(const ItemCatalog& catalog, std::size_t n) const {
        return beta * catalog.popularity[n];
    }
};

struct CostParams {
    double fetch_unit_cost = 1.0;   // c_f, per size unit fetched
    double aging_unit_cost = 0.1;   // c_a, per version of served age
};

// Average size-weighted occupancy bound B~. unlimited() means no constraint.
// A budget may also be given as a fraction of the unconstrained occupancy
// B(tau(alpha~=0)); resolve_budget() in timer_policy.hpp turns it absolute.
struct CapacityConstraint {
    static constexpr double kUnlimited = std::numeric_limits<double>::infinity();

    double budget = kUnlimited;
    std::optional<double> fraction_of_unconstrained;

    bool unlimited() const { return !fraction_of_unconstrained && !(budget < kUnlimited); }
    static CapacityConstraint make_unlimited() { return {}; }
    static CapacityConstraint make_finite(double b) { return {.budget = b}; }
    static CapacityConstraint make_fraction(double f) {
        return {.budget = kUnlimited, .fraction_of_unconstrained = f};
    }
};

// Configuration for the tabular Q-learning baseline.
struct QLearningConfig {
    double time_step = 0.1;        // seconds per decision step
    double learning_rate = 0.1;    // alpha_Q in (0, 1]
    double discount = 0.99;        // gamma in (0, 1)
    double epsilon_initial = 0.2;
    double epsilon_floor = 0.01;   // reached after half the train horizon
    std::size_t max_age_steps = 600;
    double train_horizon = 1e6;    // seconds
    bool share_table = true;       // pool transitions of identical items
    bool continue_training_after_shift = false;
};

// SwiftCache knobs. The lambda-hat estimator has two forms; see swift_cache.hpp.
enum class LambdaEstimator { AovRate, PaperDiff };

struct SwiftCacheConfig {
    double theta = 0.005;                 // EWMA weight, in (0, 1)
    double tau_max = 1e4;                 // cap for the never-evict sentinel, seconds
    LambdaEstimator estimator = LambdaEstimator::AovRate;
};

struct ReportConfig {
    double warmup_fraction = 0.1;     // fraction of the horizon excluded from *_after_warmup
    double sample_interval = 0.0;     // time-series cadence in seconds; 0 = horizon/200
};

// Everything a single run needs.
struct ScenarioConfig {
    ItemCatalog catalog;
    DemandSpec demand;
    CostParams costs;
    CapacityConstraint capacity;
    double horizon_seconds = 0.0;
    std::uint64_t seed = 0;
    SwiftCacheConfig swiftcache;
    QLearningConfig qlearning;
    ReportConfig report;
};

// Zipf(z) popularity over n_items: p_n proportional to 1/n^z, normalized.
// z = 0 gives the uniform profile. Throws std::invalid_argument for n_items == 0
// or negative/non-finite z.
std::vector<double> build_zipf_popularity(std::size_t n_items, double exponent);

// Checks every type invariant; returns one human-readable entry per violation,
// each prefixed with the offending field path. Empty result means the config
// is valid. Never throws: violations are data.
std::vector<std::string> validate(const ScenarioConfig& config);

}  // namespace freshcache
