#pragma once

#include <limits>
#include <vector>

#include "freshcache/catalog.hpp"

namespace freshcache {

// A constant-timer (eviction-based) policy: item n is held for tau_n seconds
// after each fetch and treated as evicted afterwards. Produced by solve_alpha
// together with the multiplier that generated it and its analytic cost and
// occupancy. A timer of +infinity means "never evict" (static items).
struct TimerPolicy {
    std::vector<double> timers;      // tau_n >= 0, seconds; may be +inf
    double multiplier = 0.0;         // alpha~ >= 0
    double analytic_cost = 0.0;      // cost per second under these timers
    double analytic_occupancy = 0.0; // size-weighted average occupancy
};

constexpr double kNeverEvict = std::numeric_limits<double>::infinity();

// Optimal holding time for one item:
//   tau = (1/(beta p)) * [ sqrt(1 + 2 b (beta p c_f - alpha) / (c_a lambda)) - 1 ]+
// evaluated in the cancellation-free form x / (sqrt(1+x) + 1). For lambda == 0
// the limit is "never evict" while beta p c_f > alpha, else 0.
// Requires beta * p > 0 and c_a > 0.
double compute_timer(double size, double popularity, double refresh_rate, double beta,
                     double fetch_unit_cost, double aging_unit_cost, double alpha);

// Average cost rate of a timer vector:
//   C(tau) = beta sum_n p_n (0.5 c_a lambda_n p_n beta tau_n^2 + b_n c_f) / (1 + beta p_n tau_n)
// Static items (lambda = 0) contribute 0 once held forever; items with
// lambda > 0 and an infinite timer cost an unbounded aging rate (+inf).
double analytic_cost(const std::vector<double>& timers, const ItemCatalog& catalog, double beta,
                     double fetch_unit_cost, double aging_unit_cost);

// Size-weighted average occupancy:
//   B(tau) = sum_n b_n * beta p_n tau_n / (1 + beta p_n tau_n)
double analytic_occupancy(const std::vector<double>& timers, const ItemCatalog& catalog,
                          double beta);

// Optimal cost under unlimited capacity (alpha~ = 0 timers):
//   C* = sum_n c_a lambda_n (sqrt(1 + 2 b_n (beta p_n / lambda_n)(c_f / c_a)) - 1)
double optimal_cost_unlimited(const ItemCatalog& catalog, double beta, double fetch_unit_cost,
                              double aging_unit_cost);

// Solves for the multiplier alpha~* satisfying complementary slackness
// alpha~* (B(tau(alpha~*)) - B~) = 0: returns alpha~ = 0 when the budget is
// slack (or unlimited), otherwise bisects alpha~ in (0, max_n beta p_n c_f]
// until |B - B~| < 1e-9 (absolute). Throws InfeasibleBudgetError for a
// non-positive finite budget with positive demand.
TimerPolicy solve_alpha(const ItemCatalog& catalog, double beta, double fetch_unit_cost,
                        double aging_unit_cost, const CapacityConstraint& capacity);

// Absolute budget for a scenario, resolving a fraction-of-unconstrained
// specification against B(tau(alpha~ = 0)) when present.
double resolve_budget(const ScenarioConfig& config);

}  // namespace freshcache
