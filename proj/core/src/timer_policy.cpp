#include "freshcache/timer_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "freshcache/errors.hpp"

namespace freshcache {

namespace {

// sqrt(1 + x) - 1 without cancellation for small x (x >= 0).
double sqrt1p_minus_one(double x) {
    return x / (std::sqrt(1.0 + x) + 1.0);
}

void check_item_params(double size, double fetch_unit_cost, double aging_unit_cost) {
    if (!(size > 0.0) || !(fetch_unit_cost > 0.0) || !(aging_unit_cost > 0.0)) {
        throw std::invalid_argument("compute_timer: size, c_f and c_a must be > 0");
    }
}

}  // namespace

double compute_timer(double size, double popularity, double refresh_rate, double beta,
                     double fetch_unit_cost, double aging_unit_cost, double alpha) {
    check_item_params(size, fetch_unit_cost, aging_unit_cost);
    const double eta = beta * popularity;
    if (!(eta > 0.0)) {
        throw std::invalid_argument("compute_timer: beta * p must be > 0");
    }
    if (!(refresh_rate >= 0.0) || !(alpha >= 0.0)) {
        throw std::invalid_argument("compute_timer: lambda and alpha must be >= 0");
    }
    const double surplus = eta * fetch_unit_cost - alpha;
    if (refresh_rate == 0.0) {
        // Static item: never evict while caching still pays, else do not hold.
        return surplus > 0.0 ? kNeverEvict : 0.0;
    }
    const double x = 2.0 * size * surplus / (aging_unit_cost * refresh_rate);
    if (x <= 0.0) {
        return 0.0;
    }
    return sqrt1p_minus_one(x) / eta;
}

double analytic_cost(const std::vector<double>& timers, const ItemCatalog& catalog, double beta,
                     double fetch_unit_cost, double aging_unit_cost) {
    double total = 0.0;
    for (std::size_t n = 0; n < catalog.n_items; ++n) {
        const double tau = timers[n];
        if (!(tau >= 0.0)) {
            throw std::invalid_argument("analytic_cost: timers must be >= 0");
        }
        const double eta = beta * catalog.popularity[n];
        const double lambda = catalog.refresh_rates[n];
        if (std::isinf(tau)) {
            // Held forever: amortized fetch cost vanishes; aging rate is
            // unbounded unless the item is static.
            if (lambda > 0.0 && eta > 0.0) {
                return std::numeric_limits<double>::infinity();
            }
            continue;
        }
        const double aging = lambda > 0.0 ? 0.5 * aging_unit_cost * lambda * eta * tau * tau : 0.0;
        total += eta * (aging + catalog.sizes[n] * fetch_unit_cost) / (1.0 + eta * tau);
    }
    return total;
}

double analytic_occupancy(const std::vector<double>& timers, const ItemCatalog& catalog,
                          double beta) {
    double total = 0.0;
    for (std::size_t n = 0; n < catalog.n_items; ++n) {
        const double tau = timers[n];
        if (!(tau >= 0.0)) {
            throw std::invalid_argument("analytic_occupancy: timers must be >= 0");
        }
        const double x = beta * catalog.popularity[n] * tau;
        if (std::isinf(x)) {
            total += catalog.sizes[n];
        } else {
            total += catalog.sizes[n] * x / (1.0 + x);
        }
    }
    return total;
}

double optimal_cost_unlimited(const ItemCatalog& catalog, double beta, double fetch_unit_cost,
                              double aging_unit_cost) {
    double total = 0.0;
    for (std::size_t n = 0; n < catalog.n_items; ++n) {
        const double lambda = catalog.refresh_rates[n];
        if (lambda == 0.0) {
            continue;  // static item: one initial fetch amortizes to zero
        }
        const double x = 2.0 * catalog.sizes[n] * (beta * catalog.popularity[n] / lambda) *
                         (fetch_unit_cost / aging_unit_cost);
        total += aging_unit_cost * lambda * sqrt1p_minus_one(x);
    }
    return total;
}

namespace {

std::vector<double> timers_at(const ItemCatalog& catalog, double beta, double cf, double ca,
                              double alpha) {
    std::vector<double> timers(catalog.n_items, 0.0);
    for (std::size_t n = 0; n < catalog.n_items; ++n) {
        if (beta * catalog.popularity[n] > 0.0) {
            timers[n] = compute_timer(catalog.sizes[n], catalog.popularity[n],
                                      catalog.refresh_rates[n], beta, cf, ca, alpha);
        }
    }
    return timers;
}

TimerPolicy make_policy(const ItemCatalog& catalog, double beta, double cf, double ca,
                        double alpha) {
    TimerPolicy p;
    p.timers = timers_at(catalog, beta, cf, ca, alpha);
    p.multiplier = alpha;
    p.analytic_cost = analytic_cost(p.timers, catalog, beta, cf, ca);
    p.analytic_occupancy = analytic_occupancy(p.timers, catalog, beta);
    return p;
}

}  // namespace

TimerPolicy solve_alpha(const ItemCatalog& catalog, double beta, double fetch_unit_cost,
                        double aging_unit_cost, const CapacityConstraint& capacity) {
    if (capacity.fraction_of_unconstrained) {
        CapacityConstraint absolute = CapacityConstraint::make_finite(
            *capacity.fraction_of_unconstrained *
            analytic_occupancy(timers_at(catalog, beta, fetch_unit_cost, aging_unit_cost, 0.0),
                               catalog, beta));
        return solve_alpha(catalog, beta, fetch_unit_cost, aging_unit_cost, absolute);
    }

    TimerPolicy unconstrained = make_policy(catalog, beta, fetch_unit_cost, aging_unit_cost, 0.0);
    if (capacity.unlimited()) {
        return unconstrained;
    }
    const double budget = capacity.budget;
    if (!(budget > 0.0)) {
        if (beta > 0.0) {
            throw InfeasibleBudgetError("solve_alpha: budget must be > 0 with positive demand");
        }
        return unconstrained;  // no demand: nothing is ever cached
    }
    if (unconstrained.analytic_occupancy <= budget) {
        return unconstrained;
    }

    // B(tau(alpha)) is continuous and non-increasing in alpha, 0 at the
    // bracket's right end, so the bisection always lands on the crossing.
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t n = 0; n < catalog.n_items; ++n) {
        hi = std::max(hi, beta * catalog.popularity[n] * fetch_unit_cost);
    }
    TimerPolicy at_hi = make_policy(catalog, beta, fetch_unit_cost, aging_unit_cost, hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        TimerPolicy cand = make_policy(catalog, beta, fetch_unit_cost, aging_unit_cost, mid);
        if (cand.analytic_occupancy <= budget) {
            hi = mid;
            at_hi = std::move(cand);
        } else {
            lo = mid;
        }
        if (std::fabs(at_hi.analytic_occupancy - budget) < 1e-9 && hi - lo < 1e-12 * (1.0 + hi)) {
            break;
        }
    }
    return at_hi;
}

double resolve_budget(const ScenarioConfig& config) {
    const auto& cap = config.capacity;
    if (cap.fraction_of_unconstrained) {
        const auto timers = timers_at(config.catalog, config.demand.beta,
                                      config.costs.fetch_unit_cost, config.costs.aging_unit_cost,
                                      0.0);
        return *cap.fraction_of_unconstrained *
               analytic_occupancy(timers, config.catalog, config.demand.beta);
    }
    return cap.budget;
}

}  // namespace freshcache
