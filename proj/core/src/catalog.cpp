#include "freshcache/catalog.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace freshcache {

double ItemCatalog::total_size() const {
    return std::accumulate(sizes.begin(), sizes.end(), 0.0);
}

std::vector<double> build_zipf_popularity(std::size_t n_items, double exponent) {
    if (n_items == 0) {
        throw std::invalid_argument("build_zipf_popularity: n_items must be >= 1");
    }
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
        throw std::invalid_argument("build_zipf_popularity: exponent must be finite and >= 0");
    }
    std::vector<double> p(n_items);
    double sum = 0.0;
    for (std::size_t n = 0; n < n_items; ++n) {
        p[n] = std::pow(static_cast<double>(n + 1), -exponent);
        sum += p[n];
    }
    for (double& v : p) {
        v /= sum;
    }
    return p;
}

namespace {

void check_vector(std::vector<std::string>& out, const std::vector<double>& v,
                  std::size_t n, const char* path, bool strictly_positive) {
    if (v.size() != n) {
        out.push_back(std::string(path) + ": length " + std::to_string(v.size()) +
                      " does not match catalog.n_items " + std::to_string(n));
        return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = v[i];
        const bool bad = !std::isfinite(x) || (strictly_positive ? !(x > 0.0) : !(x >= 0.0));
        if (bad) {
            out.push_back(std::string(path) + "[" + std::to_string(i) + "]: must be " +
                          (strictly_positive ? "> 0" : "nonnegative"));
        }
    }
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& config) {
    std::vector<std::string> v;
    const auto& cat = config.catalog;

    if (cat.n_items == 0) {
        v.push_back("catalog.n_items: must be >= 1");
    }
    check_vector(v, cat.sizes, cat.n_items, "catalog.sizes", true);
    check_vector(v, cat.popularity, cat.n_items, "catalog.popularity", true);
    check_vector(v, cat.refresh_rates, cat.n_items, "catalog.refresh_rates", false);
    if (cat.popularity.size() == cat.n_items && cat.n_items > 0) {
        const double sum = std::accumulate(cat.popularity.begin(), cat.popularity.end(), 0.0);
        if (std::fabs(sum - 1.0) > 1e-9) {
            v.push_back("catalog.popularity: sum is " + std::to_string(sum) +
                        ", must equal 1 within 1e-9");
        }
    }

    if (!(config.demand.beta >= 0.0) || !std::isfinite(config.demand.beta)) {
        v.push_back("demand.beta: must be finite and >= 0");
    }
    if (config.demand.arrival_law == ArrivalLaw::GammaRenewal && !(config.demand.omega > 0.0)) {
        v.push_back("demand.omega: must be > 0 for gamma arrivals");
    }

    if (!(config.costs.fetch_unit_cost > 0.0)) {
        v.push_back("costs.fetch_unit_cost: must be > 0");
    }
    if (!(config.costs.aging_unit_cost > 0.0)) {
        v.push_back("costs.aging_unit_cost: must be > 0");
    }

    if (config.capacity.fraction_of_unconstrained) {
        if (!(*config.capacity.fraction_of_unconstrained > 0.0)) {
            v.push_back("capacity.budget_fraction: must be > 0");
        }
    } else if (!config.capacity.unlimited() && !(config.capacity.budget > 0.0)) {
        v.push_back("capacity.budget: must be > 0 when finite");
    }

    if (!(config.horizon_seconds > 0.0)) {
        v.push_back("horizon_seconds: must be > 0");
    }

    const double theta = config.swiftcache.theta;
    if (!(theta > 0.0 && theta < 1.0)) {
        v.push_back("swiftcache.theta: must lie in (0, 1)");
    }
    if (!(config.swiftcache.tau_max > 0.0)) {
        v.push_back("swiftcache.tau_max: must be > 0");
    }

    const auto& q = config.qlearning;
    if (!(q.time_step > 0.0)) {
        v.push_back("qlearning.time_step: must be > 0");
    }
    if (!(q.learning_rate > 0.0 && q.learning_rate <= 1.0)) {
        v.push_back("qlearning.learning_rate: must lie in (0, 1]");
    }
    if (!(q.discount > 0.0 && q.discount < 1.0)) {
        v.push_back("qlearning.discount: must lie in (0, 1)");
    }
    if (q.max_age_steps < 2) {
        v.push_back("qlearning.max_age_steps: must be >= 2");
    }
    if (!(q.epsilon_initial >= 0.0 && q.epsilon_initial <= 1.0) ||
        !(q.epsilon_floor >= 0.0 && q.epsilon_floor <= 1.0)) {
        v.push_back("qlearning.epsilon: values must lie in [0, 1]");
    }
    if (!(q.train_horizon > 0.0)) {
        v.push_back("qlearning.train_horizon: must be > 0");
    }

    if (!(config.report.warmup_fraction >= 0.0 && config.report.warmup_fraction < 1.0)) {
        v.push_back("report.warmup_fraction: must lie in [0, 1)");
    }

    return v;
}

}  // namespace freshcache
