#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freshcache/catalog.hpp"
#include "freshcache/mdp.hpp"
#include "freshcache/rng.hpp"

namespace freshcache {

using QConfig = QLearningConfig;

// Discretized per-item state: s counts elapsed time-steps since the last
// fetch (capped), r flags a request in the current step.
struct QState {
    std::uint32_t s = 1;  // 1..max_age_steps
    bool r = false;
};

// Encode elapsed seconds since the last fetch into the capped step count.
// Throws std::invalid_argument for negative elapsed. elapsed == 0 maps to 1
// (the chain restarts at 1 right after a fetch).
QState encode_state(double elapsed_since_fetch, bool request_present, const QConfig& cfg);

// Action-value tables, one per item or one shared across identical items.
// Values are indexed by (table, s, r, u) and initialized to zero; visit
// counts back the optional polynomial learning-rate decay.
class QTable {
public:
    QTable(std::size_t n_tables, std::size_t max_age_steps);

    double& q(std::size_t table, const QState& st, int action);
    double q(std::size_t table, const QState& st, int action) const;
    std::uint64_t visits(std::size_t table, const QState& st, int action) const;

    // argmin_u Q(state, u); ties resolve to u = 0 (no update).
    int greedy_action(std::size_t table, const QState& st) const;

    // Q(S,u) += alpha [ cost + gamma min_u' Q(S',u') - Q(S,u) ], bumping the
    // visit counter.
    void apply_update(std::size_t table, const QState& state, int action, double cost,
                      const QState& next_state, double alpha, double gamma);

    std::size_t n_tables() const { return n_tables_; }
    std::size_t max_age_steps() const { return s_max_; }

    std::string to_json() const;
    static QTable from_json(const std::string& text);

private:
    std::size_t index(std::size_t table, const QState& st, int action) const;

    std::size_t n_tables_;
    std::size_t s_max_;
    std::vector<double> values_;
    std::vector<std::uint64_t> visit_counts_;
};

// One tabular update with cost-valued reward and a minimizing bootstrap:
//   Q(S,u) += alpha_Q [ R + gamma min_u' Q(S',u') - Q(S,u) ]
void q_update(QTable& table, std::size_t table_id, const QState& state, int action, double cost,
              const QState& next_state, const QConfig& cfg);

enum class ActionMode { Train, Eval };

// Eval: greedy argmin (ties -> 0). Train: greedy with probability 1 - epsilon,
// otherwise uniform over {0, 1}.
int select_action(const QTable& table, std::size_t table_id, const QState& state, ActionMode mode,
                  double epsilon, RngStream* rng);

// Exploration schedule: exponential decay from epsilon_initial to
// epsilon_floor over the first half of the train horizon, flat afterwards.
double epsilon_at(double t, const QConfig& cfg);

// Trains a fresh single table directly on the per-item request-time MDP with
// exploring starts (episodes restart from uniformly random states), used to
// check the learner against value iteration. The visit-count learning-rate
// decay makes every state converge. Returns the greedy policy alongside.
struct MdpTrainResult {
    QTable table;
    std::vector<int> greedy_policy;  // index 1..s_max
};
MdpTrainResult train_on_mdp(const PerItemMdp& mdp, const QConfig& cfg, std::uint64_t seed,
                            std::size_t n_steps, std::size_t episode_length = 64);

}  // namespace freshcache
