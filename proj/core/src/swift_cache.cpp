#include "freshcache/swift_cache.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace freshcache {

double swiftcache_timer(double eit, double lambda_hat, double size, double fetch_unit_cost,
                        double aging_unit_cost, double alpha, double tau_max) {
    if (lambda_hat <= 0.0 || eit <= 0.0) {
        return tau_max;
    }
    const double arg = 1.0 + 2.0 * size * (fetch_unit_cost - eit * alpha) /
                                 (aging_unit_cost * lambda_hat * eit);
    const double bracket = arg > 0.0 ? std::sqrt(arg) - 1.0 : -1.0;
    return std::min(eit * std::max(bracket, 0.0), tau_max);
}

SwiftCacheState::SwiftCacheState(std::size_t n_items, const ItemCatalog& catalog,
                                 const CostParams& costs, SwiftCacheConfig config,
                                 double occupancy_budget)
    : config_(config),
      budget_(occupancy_budget),
      item_sizes_(catalog.sizes),
      fetch_unit_cost_(costs.fetch_unit_cost),
      aging_unit_cost_(costs.aging_unit_cost),
      eit_(n_items, 0.0),
      lambda_hat_(n_items, 0.0),
      delta_(n_items, 0.0),
      t_bar_(n_items, 0.0),
      s_bar_(n_items, 0.0),
      tau_(n_items, 0.0) {}

SwiftCacheState::Decision SwiftCacheState::on_request(
    std::size_t item, double now, const std::function<double()>& occupancy,
    const std::function<std::int64_t()>& age_reader) {
    if (now < s_bar_[item]) {
        throw std::invalid_argument("SwiftCacheState::on_request: time went backwards");
    }
    const double theta = config_.theta;
    const double t = now - t_bar_[item];
    const double s = now - s_bar_[item];
    s_bar_[item] = now;

    Decision decision;
    if (t >= tau_[item]) {
        decision.fetch = true;
        const std::int64_t delta = age_reader();
        decision.age_read = delta;
        b_hat_ = occupancy();
        t_bar_[item] = now;

        double sample = 0.0;
        if (t > 0.0) {
            sample = config_.estimator == LambdaEstimator::AovRate
                         ? static_cast<double>(delta) / t
                         : (static_cast<double>(delta) - delta_[item]) / t;
        }
        lambda_hat_[item] = (1.0 - theta) * lambda_hat_[item] + theta * sample;
        if (lambda_hat_[item] < 0.0) {
            lambda_hat_[item] = 0.0;  // PaperDiff samples may be negative
        }
        delta_[item] = static_cast<double>(delta);
        tau_[item] = swiftcache_timer(eit_[item], lambda_hat_[item], item_sizes_[item],
                                      fetch_unit_cost_, aging_unit_cost_, alpha_,
                                      config_.tau_max);
    }

    eit_[item] = (1.0 - theta) * eit_[item] + theta * s;
    if (eit_[item] >= max_eit_) {
        max_eit_ = eit_[item];
        max_eit_item_ = item;
    } else if (item == max_eit_item_) {
        // The running max can only shrink when its own item shrinks.
        max_eit_ = 0.0;
        for (std::size_t n = 0; n < eit_.size(); ++n) {
            if (eit_[n] > max_eit_) {
                max_eit_ = eit_[n];
                max_eit_item_ = n;
            }
        }
    }
    b_bar_ = (1.0 - theta) * b_bar_ + theta * b_hat_;
    update_alpha();
    return decision;
}

void SwiftCacheState::update_alpha() {
    if (std::isinf(budget_) || max_eit_ <= 0.0) {
        alpha_ = 0.0;
        return;
    }
    alpha_ = std::max(0.0, (b_bar_ - budget_) / max_eit_);
}

std::string SwiftCacheState::to_json() const {
    nlohmann::json j;
    j["theta"] = config_.theta;
    j["tau_max"] = config_.tau_max;
    j["estimator"] = config_.estimator == LambdaEstimator::AovRate ? "aov-rate" : "paper-diff";
    j["budget"] = std::isinf(budget_) ? nlohmann::json("unlimited") : nlohmann::json(budget_);
    j["eit"] = eit_;
    j["lambda_hat"] = lambda_hat_;
    j["delta"] = delta_;
    j["last_fetch_time"] = t_bar_;
    j["last_request_time"] = s_bar_;
    j["tau"] = tau_;
    j["occupancy_ewma"] = b_bar_;
    j["occupancy_reading"] = b_hat_;
    j["alpha"] = alpha_;
    return j.dump(2);
}

}  // namespace freshcache
