#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "freshcache/catalog.hpp"

namespace freshcache {

// Online model-based eviction-timer policy. Learns per-item interarrival
// times (eit), refresh rates (lambda-hat) and the occupancy multiplier alpha
// by EWMA with weight theta, with no prior knowledge of p, lambda or beta,
// and recomputes an item's holding timer at each of its fetches:
//
//   tau_n = eit_n [ sqrt(1 + 2 b_n (c_f - eit_n alpha) / (c_a lambdahat_n eit_n)) - 1 ]+
//
// which coincides with the closed-form optimal timer once eit_n = 1/(beta p_n)
// and lambdahat_n = lambda_n.
//
// Two lambda-hat estimators exist (see LambdaEstimator):
//  - AovRate: theta-weighted delta/t, delta being the age-of-version read at
//    the fetch and t the elapsed holding interval. This is the unbiased form
//    and the default.
//  - PaperDiff: theta-weighted (delta - Delta_n)/t with Delta_n the previous
//    fetch's reading. Samples can be negative; the estimate is clamped at 0.
// The SwiftCache holding-time formula on learned estimates. Guards: with no
// usable estimate (lambda_hat <= 0 or eit <= 0) the item is held for tau_max
// ("never evict" within the cap); a non-positive surplus c_f - eit * alpha
// clamps the timer to 0.
double swiftcache_timer(double eit, double lambda_hat, double size, double fetch_unit_cost,
                        double aging_unit_cost, double alpha, double tau_max);

class SwiftCacheState {
public:
    struct Decision {
        bool fetch = false;
        std::int64_t age_read = 0;  // delta, valid when fetch is true
    };

    SwiftCacheState(std::size_t n_items, const ItemCatalog& catalog, const CostParams& costs,
                    SwiftCacheConfig config, double occupancy_budget /* +inf if unlimited */);

    // One request for `item` at simulation time `now`. Follows the decision
    // pseudocode order exactly: the serve/fetch test uses the timer set at the
    // previous fetch; EWMAs update afterwards. `occupancy` is read only when a
    // fetch happens; `age_reader` must return the current age-of-version of
    // the cached copy (0 when the item has never been cached).
    // Throws std::invalid_argument if `now` precedes this item's last request.
    Decision on_request(std::size_t item, double now,
                        const std::function<double()>& occupancy,
                        const std::function<std::int64_t()>& age_reader);

    double current_timer(std::size_t item) const { return tau_[item]; }
    double interarrival_estimate(std::size_t item) const { return eit_[item]; }
    double refresh_estimate(std::size_t item) const { return lambda_hat_[item]; }
    double occupancy_ewma() const { return b_bar_; }
    double multiplier() const { return alpha_; }
    double max_interarrival_estimate() const { return max_eit_; }
    double last_fetch_time(std::size_t item) const { return t_bar_[item]; }

    // Full state snapshot as a JSON document (for --dump-state and debugging).
    std::string to_json() const;

private:
    void update_alpha();

    SwiftCacheConfig config_;
    double budget_;
    std::vector<double> item_sizes_;
    double fetch_unit_cost_;
    double aging_unit_cost_;

    std::vector<double> eit_;
    std::vector<double> lambda_hat_;
    std::vector<double> delta_;   // age read at the item's last fetch
    std::vector<double> t_bar_;   // last fetch time
    std::vector<double> s_bar_;   // last request time
    std::vector<double> tau_;
    double b_bar_ = 0.0;   // EWMA occupancy
    double b_hat_ = 0.0;   // most recent occupancy reading (taken at fetches)
    double alpha_ = 0.0;
    double max_eit_ = 0.0;
    std::size_t max_eit_item_ = 0;
};

}  // namespace freshcache
