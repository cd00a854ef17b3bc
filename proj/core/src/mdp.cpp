#include "freshcache/mdp.hpp"

#include <cmath>
#include <stdexcept>

#include "freshcache/errors.hpp"

namespace freshcache {

namespace {

void check_params(const PerItemMdp& mdp) {
    if (mdp.s_max < 2 || !(mdp.fetch_cost > 0.0) || !(mdp.aging_slope >= 0.0) ||
        !(mdp.discount > 0.0 && mdp.discount < 1.0)) {
        throw std::invalid_argument("per-item MDP: invalid parameters");
    }
}

// One Bellman sweep; returns the sup-norm change and the minimizing policy
// (ties kept on u = 0).
double sweep(const PerItemMdp& mdp, const std::vector<double>& v, std::vector<double>& nv,
             std::vector<int>& policy) {
    const std::size_t S = mdp.s_max;
    const double fetch = mdp.fetch_cost + mdp.discount * v[1];
    double delta = 0.0;
    for (std::size_t s = 1; s <= S; ++s) {
        const std::size_t next = s < S ? s + 1 : S;
        const double stay = mdp.aging_slope * static_cast<double>(s) + mdp.discount * v[next];
        nv[s] = stay < fetch ? stay : fetch;
        policy[s] = stay > fetch ? 1 : 0;
        const double d = std::fabs(nv[s] - v[s]);
        if (d > delta) {
            delta = d;
        }
    }
    return delta;
}

}  // namespace

ValueIterationResult value_iteration(const PerItemMdp& mdp, double tol, std::size_t max_iter) {
    check_params(mdp);
    if (!(tol > 0.0)) {
        throw std::invalid_argument("value_iteration: tol must be > 0");
    }
    ValueIterationResult out;
    out.values.assign(mdp.s_max + 1, 0.0);
    out.policy.assign(mdp.s_max + 1, 0);
    std::vector<double> next(mdp.s_max + 1, 0.0);
    for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
        out.residual = sweep(mdp, out.values, next, out.policy);
        out.values.swap(next);
        if (out.residual < tol) {
            return out;
        }
    }
    throw IterationLimitError("value_iteration: no convergence within max_iter");
}

ValueIterationResult bellman_sweeps(const PerItemMdp& mdp, std::size_t n) {
    check_params(mdp);
    ValueIterationResult out;
    out.values.assign(mdp.s_max + 1, 0.0);
    out.policy.assign(mdp.s_max + 1, 0);
    std::vector<double> next(mdp.s_max + 1, 0.0);
    for (out.iterations = 0; out.iterations < n; ++out.iterations) {
        out.residual = sweep(mdp, out.values, next, out.policy);
        out.values.swap(next);
    }
    return out;
}

std::optional<std::size_t> extract_threshold(const std::vector<int>& policy) {
    const std::size_t S = policy.size() - 1;
    std::size_t first_one = S + 1;
    for (std::size_t s = 1; s <= S; ++s) {
        if (policy[s] == 1) {
            first_one = s;
            break;
        }
    }
    if (first_one == S + 1) {
        return S;  // never fetches within the cap
    }
    for (std::size_t s = first_one; s <= S; ++s) {
        if (policy[s] != 1) {
            return std::nullopt;
        }
    }
    return first_one - 1;
}

}  // namespace freshcache
