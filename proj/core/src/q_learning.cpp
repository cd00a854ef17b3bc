#include "freshcache/q_learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace freshcache {

QState encode_state(double elapsed_since_fetch, bool request_present, const QConfig& cfg) {
    if (elapsed_since_fetch < 0.0) {
        throw std::invalid_argument("encode_state: negative elapsed time");
    }
    double steps = std::ceil(elapsed_since_fetch / cfg.time_step);
    if (steps < 1.0) {
        steps = 1.0;
    }
    const double cap = static_cast<double>(cfg.max_age_steps);
    if (steps > cap) {
        steps = cap;
    }
    return {static_cast<std::uint32_t>(steps), request_present};
}

QTable::QTable(std::size_t n_tables, std::size_t max_age_steps)
    : n_tables_(n_tables),
      s_max_(max_age_steps),
      values_(n_tables * (max_age_steps + 1) * 4, 0.0),
      visit_counts_(values_.size(), 0) {}

std::size_t QTable::index(std::size_t table, const QState& st, int action) const {
    return ((table * (s_max_ + 1) + st.s) * 2 + (st.r ? 1 : 0)) * 2 + action;
}

double& QTable::q(std::size_t table, const QState& st, int action) {
    return values_[index(table, st, action)];
}

double QTable::q(std::size_t table, const QState& st, int action) const {
    return values_[index(table, st, action)];
}

std::uint64_t QTable::visits(std::size_t table, const QState& st, int action) const {
    return visit_counts_[index(table, st, action)];
}

int QTable::greedy_action(std::size_t table, const QState& st) const {
    return q(table, st, 1) < q(table, st, 0) ? 1 : 0;
}

void QTable::apply_update(std::size_t table, const QState& state, int action, double cost,
                          const QState& next_state, double alpha, double gamma) {
    const double bootstrap = std::min(q(table, next_state, 0), q(table, next_state, 1));
    const std::size_t i = index(table, state, action);
    values_[i] += alpha * (cost + gamma * bootstrap - values_[i]);
    ++visit_counts_[i];
}

void q_update(QTable& table, std::size_t table_id, const QState& state, int action, double cost,
              const QState& next_state, const QConfig& cfg) {
    table.apply_update(table_id, state, action, cost, next_state, cfg.learning_rate,
                       cfg.discount);
}

int select_action(const QTable& table, std::size_t table_id, const QState& state, ActionMode mode,
                  double epsilon, RngStream* rng) {
    if (mode == ActionMode::Train) {
        if (rng == nullptr) {
            throw std::invalid_argument("select_action: training requires an RNG stream");
        }
        if (rng->uniform01() < epsilon) {
            return rng->uniform01() < 0.5 ? 0 : 1;
        }
    }
    return table.greedy_action(table_id, state);
}

double epsilon_at(double t, const QConfig& cfg) {
    if (cfg.epsilon_initial <= cfg.epsilon_floor) {
        return cfg.epsilon_floor;
    }
    const double frac = std::clamp(2.0 * t / cfg.train_horizon, 0.0, 1.0);
    return cfg.epsilon_initial *
           std::pow(cfg.epsilon_floor / cfg.epsilon_initial, frac);
}

MdpTrainResult train_on_mdp(const PerItemMdp& mdp, const QConfig& cfg, std::uint64_t seed,
                            std::size_t n_steps, std::size_t episode_length) {
    QTable table(1, mdp.s_max);
    RngStream rng(seed, 0, RngStream::kGeneric);

    std::uint32_t s = 1;
    std::size_t in_episode = 0;
    for (std::size_t step = 0; step < n_steps; ++step) {
        if (in_episode == 0) {
            s = 1 + static_cast<std::uint32_t>(rng.next_u64() % mdp.s_max);  // exploring start
            in_episode = episode_length;
        }
        --in_episode;
        const QState st{s, true};
        int u = table.greedy_action(0, st);
        if (rng.uniform01() < cfg.epsilon_initial) {
            u = rng.uniform01() < 0.5 ? 0 : 1;
        }
        double cost;
        std::uint32_t next;
        if (u == 1) {
            cost = mdp.fetch_cost;
            next = 1;
        } else {
            cost = mdp.aging_slope * static_cast<double>(s);
            next = s < mdp.s_max ? s + 1 : static_cast<std::uint32_t>(mdp.s_max);
        }
        const QState nst{next, true};
        // Polynomial step-size decay in the visit count keeps the rarely
        // visited tail states converging too.
        const double count = static_cast<double>(table.visits(0, st, u)) + 1.0;
        table.apply_update(0, st, u, cost, nst, 1.0 / std::pow(count, 0.85), mdp.discount);
        s = next;
    }

    MdpTrainResult out{std::move(table), std::vector<int>(mdp.s_max + 1, 0)};
    for (std::uint32_t si = 1; si <= mdp.s_max; ++si) {
        out.greedy_policy[si] = out.table.greedy_action(0, {si, true});
    }
    return out;
}

std::string QTable::to_json() const {
    nlohmann::json j;
    j["n_tables"] = n_tables_;
    j["max_age_steps"] = s_max_;
    j["values"] = values_;
    j["visits"] = visit_counts_;
    return j.dump();
}

QTable QTable::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    QTable t(j.at("n_tables").get<std::size_t>(), j.at("max_age_steps").get<std::size_t>());
    t.values_ = j.at("values").get<std::vector<double>>();
    t.visit_counts_ = j.at("visits").get<std::vector<std::uint64_t>>();
    const std::size_t expect = t.n_tables_ * (t.s_max_ + 1) * 4;
    if (t.values_.size() != expect || t.visit_counts_.size() != expect) {
        throw std::invalid_argument("QTable::from_json: inconsistent table dimensions");
    }
    return t;
}

}  // namespace freshcache
