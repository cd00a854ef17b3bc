#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace freshcache {

// Finite truncation of the per-item decision chain sampled at request
// arrivals: state s in {1..s_max} counts arrival steps since the last fetch,
// staying costs kappa * s and moves to min(s + 1, s_max) (self-loop at the
// cap), fetching costs F and resets to 1. Discount q in (0, 1).
struct PerItemMdp {
    std::size_t s_max = 2;
    double fetch_cost = 1.0;   // F = b * c_f
    double aging_slope = 0.0;  // kappa = c_a * lambda / (beta * p), per arrival step
    double discount = 0.9;     // q
};

struct ValueIterationResult {
    std::vector<double> values;  // v(s), index 0 unused, 1..s_max
    std::vector<int> policy;     // u*(s) in {0, 1}, ties resolved to 0
    std::size_t iterations = 0;
    double residual = 0.0;       // final sup-norm change
};

// Iterates v_m(s) = min{ kappa s + q v(min(s+1, s_max)), F + q v(1) } from
// v_0 = 0 until the sup-norm change drops below tol. Throws
// std::invalid_argument on bad parameters and IterationLimitError when
// max_iter is exhausted first.
ValueIterationResult value_iteration(const PerItemMdp& mdp, double tol = 1e-12,
                                     std::size_t max_iter = 10'000'000);

// Exactly n applications of the Bellman operator from v_0 = 0, returning the
// n-th iterate and its minimizing policy (no convergence requirement).
ValueIterationResult bellman_sweeps(const PerItemMdp& mdp, std::size_t n);

// Smallest s* such that u*(s) = 1 for every s > s* and u*(s) = 0 for every
// s <= s*. A policy that never fetches yields s* = s_max; a policy that is
// not of threshold shape yields nullopt.
std::optional<std::size_t> extract_threshold(const std::vector<int>& policy);

}  // namespace freshcache
