#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "freshcache/catalog.hpp"
#include "freshcache/q_learning.hpp"
#include "freshcache/swift_cache.hpp"

namespace freshcache {

struct TimeSample {
    double t = 0.0;
    double running_avg_cost = 0.0;  // cumulative cost so far / t
    double occupancy = 0.0;         // instantaneous size-weighted occupancy
};

struct SimulationReport {
    double total_cost = 0.0;  // always exactly fetch_cost + aging_cost
    double fetch_cost = 0.0;
    double aging_cost = 0.0;
    double duration = 0.0;
    double avg_cost_rate = 0.0;
    double warmup_seconds = 0.0;
    double cost_after_warmup = 0.0;
    double avg_cost_rate_after_warmup = 0.0;
    double occupancy_time_average = 0.0;  // size-weighted time integral / duration
    double occupancy_after_warmup = 0.0;
    std::uint64_t request_count = 0;
    std::uint64_t fetch_count = 0;
    std::vector<std::uint64_t> request_count_per_item;
    std::vector<std::uint64_t> fetch_count_per_item;
    std::vector<TimeSample> samples;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

// One line per charged event, for debugging dumps and the cost-conservation
// checks. kind: 'r' request-driven, 'f' free-running fetch (q-learning only).
struct EventRecord {
    double time = 0.0;
    std::uint32_t item = 0;
    char kind = 'r';
    std::int64_t age = 0;  // served or read age-of-version
    int action = 0;        // 1 fetch, 0 serve
    double charge = 0.0;
};

// Policy selectors for run().
struct FixedTimerPolicy {
    std::vector<double> timers;  // seconds; kNeverEvict allowed
};
struct SwiftCachePolicy {};  // parameters taken from ScenarioConfig
struct QLearningPolicy {
    std::shared_ptr<QTable> table;  // trained in place when mode == Train
    ActionMode mode = ActionMode::Train;
};
using PolicySelector = std::variant<FixedTimerPolicy, SwiftCachePolicy, QLearningPolicy>;

struct RunOptions {
    std::vector<EventRecord>* event_log = nullptr;  // optional capture
    std::string* swiftcache_state_json = nullptr;   // final state dump when set
};

// Discrete-event run over [0, horizon). Requests merge per-item renewal
// streams in time order (ties by item index); versions advance lazily; the
// cache starts empty. Fixed-timer and SwiftCache runs are event-driven; the
// q-learning run is additionally clocked in time_step increments.
SimulationReport run(const ScenarioConfig& config, const PolicySelector& policy,
                     const RunOptions& opts = {});

struct ReplicationSummary {
    double mean_cost_rate = 0.0;
    double stderr_cost_rate = 0.0;
    double mean_cost_rate_after_warmup = 0.0;
    double stderr_cost_rate_after_warmup = 0.0;
    double mean_occupancy_after_warmup = 0.0;
    double stderr_occupancy_after_warmup = 0.0;
};

struct ReplicationSet {
    std::vector<SimulationReport> reports;  // in seed order
    ReplicationSummary summary;
};

// Mean / sample-stderr aggregation over a report collection.
ReplicationSummary summarize(const std::vector<SimulationReport>& reports);

// Independent runs with seeds config.seed + k * seed_stride, k = 0..n_runs-1,
// executed in parallel and merged deterministically in seed order.
ReplicationSet run_replications(const ScenarioConfig& config, const PolicySelector& policy,
                                std::size_t n_runs, std::uint64_t seed_stride = 1);

// Mid-run environment change: at shift_time the catalog's popularity and
// refresh rates are replaced (sizes stay), learned state is carried over and
// per-item arrival streams restart under the new rates.
struct ShiftSpec {
    double shift_time = 0.0;
    std::vector<double> new_popularity;
    std::vector<double> new_refresh_rates;
};

struct ShiftReport {
    SimulationReport overall;
    double phase1_cost_rate = 0.0;             // over [0, shift)
    double phase2_cost_rate = 0.0;             // over [shift, horizon)
    double burnin_end_time = 0.0;              // when every item reached the post-shift
                                               // request quota (horizon if never)
    double phase2_post_burnin_cost_rate = 0.0; // over [burnin_end, horizon)
};

ShiftReport run_with_shift(const ScenarioConfig& config, const PolicySelector& policy,
                           const ShiftSpec& shift, std::size_t burnin_requests_per_item);

}  // namespace freshcache
