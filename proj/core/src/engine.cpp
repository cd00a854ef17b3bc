#include "freshcache/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <queue>
#include <stdexcept>

#include "freshcache/config_io.hpp"
#include "freshcache/errors.hpp"
#include "freshcache/timer_policy.hpp"

namespace freshcache {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cost buckets, the exact piecewise-constant occupancy integral, and the
// time-series sampler shared by both simulation loops. Boundary times passed
// to segment_to() must be non-decreasing.
class Accounting {
public:
    Accounting(double horizon, double warmup_fraction, double sample_interval)
        : horizon_(horizon), warmup_(warmup_fraction * horizon) {
        sample_interval_ = sample_interval > 0.0 ? sample_interval : horizon / 200.0;
        next_sample_ = sample_interval_;
    }

    void charge_fetch(double t, double amount) {
        fetch_raw_ += amount;
        if (t >= warmup_) {
            fetch_warm_ += amount;
        }
    }

    void charge_aging(double t, double amount) {
        aging_raw_ += amount;
        if (t >= warmup_) {
            aging_warm_ += amount;
        }
    }

    void occupancy_add(double delta) { occ_sum_ += delta; }
    double occupancy_now() const { return occ_sum_; }

    // Extends the occupancy integral with the current level up to t, emitting
    // due time-series samples on the way.
    void segment_to(double t, std::vector<TimeSample>& samples) {
        while (next_sample_ <= t && next_sample_ <= horizon_) {
            integrate(next_sample_);
            samples.push_back({next_sample_, (fetch_raw_ + aging_raw_) / next_sample_, occ_sum_});
            next_sample_ += sample_interval_;
        }
        integrate(t);
    }

    double fetch_raw() const { return fetch_raw_; }
    double aging_raw() const { return aging_raw_; }
    double cost_raw() const { return fetch_raw_ + aging_raw_; }
    double cost_warm() const { return fetch_warm_ + aging_warm_; }
    double occ_integral() const { return occ_integral_; }
    double occ_integral_warm() const { return occ_integral_warm_; }
    double warmup_seconds() const { return warmup_; }

    void fill_report(SimulationReport& r) const {
        r.fetch_cost = fetch_raw_;
        r.aging_cost = aging_raw_;
        r.total_cost = fetch_raw_ + aging_raw_;
        r.duration = horizon_;
        r.avg_cost_rate = r.total_cost / horizon_;
        r.warmup_seconds = warmup_;
        r.cost_after_warmup = cost_warm();
        const double post = horizon_ - warmup_;
        r.avg_cost_rate_after_warmup = post > 0.0 ? cost_warm() / post : 0.0;
        r.occupancy_time_average = occ_integral_ / horizon_;
        r.occupancy_after_warmup = post > 0.0 ? occ_integral_warm_ / post : 0.0;
    }

private:
    void integrate(double t) {
        if (t <= last_t_) {
            return;
        }
        occ_integral_ += occ_sum_ * (t - last_t_);
        const double w0 = std::max(last_t_, warmup_);
        if (t > w0) {
            occ_integral_warm_ += occ_sum_ * (t - w0);
        }
        last_t_ = t;
    }

    double horizon_;
    double warmup_;
    double sample_interval_;
    double next_sample_;
    double fetch_raw_ = 0.0, aging_raw_ = 0.0;
    double fetch_warm_ = 0.0, aging_warm_ = 0.0;
    double occ_sum_ = 0.0;
    double occ_integral_ = 0.0;
    double occ_integral_warm_ = 0.0;
    double last_t_ = 0.0;
};

struct Totals {
    double time = 0.0;
    double cost = 0.0;
    double cost_warm = 0.0;
};

// Per-run counters shared by both loops.
struct Counters {
    explicit Counters(std::size_t n)
        : requests(n, 0), fetches(n, 0), marked(n, 0) {}

    std::vector<std::uint64_t> requests;
    std::vector<std::uint64_t> fetches;

    // burn-in bookkeeping for shift experiments
    std::vector<std::uint64_t> marked;
    std::uint64_t mark_target = 0;
    std::size_t below_target = 0;

    void mark(std::uint64_t target) {
        std::fill(marked.begin(), marked.end(), 0);
        mark_target = target;
        below_target = target > 0 ? marked.size() : 0;
    }

    void count_request(std::size_t n) {
        ++requests[n];
        if (below_target > 0 && marked[n] < mark_target && ++marked[n] == mark_target) {
            --below_target;
        }
    }
};

// ---------------------------------------------------------------------------
// Event-driven loop: fixed-timer and SwiftCache policies.
// ---------------------------------------------------------------------------

class EventDrivenSim {
public:
    EventDrivenSim(const ScenarioConfig& config, const PolicySelector& policy,
                   const RunOptions& opts)
        : config_(config),
          n_(config.catalog.n_items),
          catalog_(config.catalog),
          law_(config.demand.arrival_law),
          omega_(config.demand.omega),
          clock_(n_),
          counters_(n_),
          acc_(config.horizon_seconds, config.report.warmup_fraction,
               config.report.sample_interval),
          opts_(opts) {
        arrival_.reserve(n_);
        version_.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            arrival_.emplace_back(config.seed, i, RngStream::kArrivals);
            version_.emplace_back(config.seed, i, RngStream::kVersions);
        }
        cached_version_.assign(n_, 0);
        expiry_.assign(n_, -kInf);
        ever_cached_.assign(n_, false);
        token_.assign(n_, 0);

        if (const auto* fixed = std::get_if<FixedTimerPolicy>(&policy)) {
            if (fixed->timers.size() != n_) {
                throw ConfigurationError("fixed-timer policy: timer count != n_items");
            }
            timers_ = fixed->timers;
        } else {
            swift_.emplace(n_, catalog_, config.costs, config.swiftcache,
                           resolve_budget(config));
        }

        schedule_initial_arrivals(0.0);
    }

    void run_until(double t_end) {
        while (!queue_.empty() && queue_.top().first < t_end) {
            process_next();
        }
        advance_to(t_end);
        now_ = t_end;
    }

    // Processes events until every item has `mark_target` post-mark requests
    // (set via counters().mark) or t_cap is reached. Returns the stop time.
    double run_until_marked(double t_cap) {
        while (counters_.below_target > 0 && !queue_.empty() && queue_.top().first < t_cap) {
            process_next();
        }
        if (counters_.below_target > 0) {
            advance_to(t_cap);
            now_ = t_cap;
        }
        return now_;
    }

    // Swap in new popularity / refresh rates at the current time. Version
    // clocks are settled under the old rates first; arrival streams restart.
    void replace_dynamics(const std::vector<double>& popularity,
                          const std::vector<double>& refresh_rates) {
        for (std::size_t i = 0; i < n_; ++i) {
            clock_.advance(i, now_, catalog_.refresh_rates[i], version_[i]);
        }
        catalog_.popularity = popularity;
        catalog_.refresh_rates = refresh_rates;
        queue_ = {};
        schedule_initial_arrivals(now_);
    }

    Totals totals() const { return {now_, acc_.cost_raw(), acc_.cost_warm()}; }
    Counters& counters() { return counters_; }
    double now() const { return now_; }

    SimulationReport report() const {
        SimulationReport r;
        acc_.fill_report(r);
        r.request_count_per_item = counters_.requests;
        r.fetch_count_per_item = counters_.fetches;
        for (std::size_t i = 0; i < n_; ++i) {
            r.request_count += counters_.requests[i];
            r.fetch_count += counters_.fetches[i];
        }
        r.samples = samples_;
        r.seed = config_.seed;
        r.config_hash = config_fingerprint(config_);
        return r;
    }

    std::string swift_state_json() const {
        return swift_ ? swift_->to_json() : std::string();
    }

private:
    void schedule_initial_arrivals(double from) {
        for (std::size_t i = 0; i < n_; ++i) {
            const double rate = config_.demand.beta * catalog_.popularity[i];
            if (rate > 0.0) {
                queue_.push({from + next_interarrival(arrival_[i], law_, omega_, rate), i});
            }
        }
    }

    // Settle occupancy expiries and time-series samples up to t, in order.
    void advance_to(double t) {
        for (;;) {
            while (!expiry_queue_.empty()) {
                const auto& [te, item, tok] = expiry_queue_.top();
                if (tok == token_[item]) {
                    break;
                }
                expiry_queue_.pop();  // superseded entry
            }
            if (expiry_queue_.empty()) {
                break;
            }
            const auto [te, item, tok] = expiry_queue_.top();
            if (te > t) {
                break;
            }
            acc_.segment_to(te, samples_);
            acc_.occupancy_add(-catalog_.sizes[item]);
            ++token_[item];  // entry consumed
            expiry_queue_.pop();
        }
        acc_.segment_to(t, samples_);
    }

    void process_next() {
        const auto [t, item] = queue_.top();
        queue_.pop();
        advance_to(t);
        now_ = t;

        const std::int64_t version =
            clock_.advance(item, t, catalog_.refresh_rates[item], version_[item]);
        const std::int64_t age =
            ever_cached_[item] ? version - cached_version_[item] : 0;

        bool fetch;
        if (swift_) {
            const auto decision = swift_->on_request(
                item, t, [this] { return acc_.occupancy_now(); }, [age] { return age; });
            fetch = decision.fetch;
        } else {
            fetch = !(t < expiry_[item]);
        }

        double charge;
        if (fetch) {
            charge = catalog_.sizes[item] * config_.costs.fetch_unit_cost;
            acc_.charge_fetch(t, charge);
            cached_version_[item] = version;
            ever_cached_[item] = true;
            ++counters_.fetches[item];
            const double tau = swift_ ? swift_->current_timer(item) : timers_[item];
            ++token_[item];  // invalidate any stale expiry entry
            if (tau > 0.0) {
                acc_.occupancy_add(catalog_.sizes[item]);
                expiry_[item] = std::isinf(tau) ? kInf : t + tau;
                if (!std::isinf(tau)) {
                    expiry_queue_.push({expiry_[item], item, token_[item]});
                }
            } else {
                expiry_[item] = t;  // zero holding time: never occupies
            }
        } else {
            charge = config_.costs.aging_unit_cost * static_cast<double>(age);
            acc_.charge_aging(t, charge);
        }
        counters_.count_request(item);
        if (opts_.event_log != nullptr) {
            opts_.event_log->push_back(
                {t, static_cast<std::uint32_t>(item), 'r', age, fetch ? 1 : 0, charge});
        }

        const double rate = config_.demand.beta * catalog_.popularity[item];
        queue_.push({t + next_interarrival(arrival_[item], law_, omega_, rate), item});
    }

    const ScenarioConfig& config_;
    std::size_t n_;
    ItemCatalog catalog_;  // mutable copy: shift experiments swap dynamics
    ArrivalLaw law_;
    double omega_;

    std::vector<RngStream> arrival_;
    std::vector<RngStream> version_;
    VersionClock clock_;

    std::vector<double> timers_;             // fixed-timer policy
    std::optional<SwiftCacheState> swift_;   // swiftcache policy

    std::vector<std::int64_t> cached_version_;
    std::vector<double> expiry_;
    std::vector<char> ever_cached_;
    std::vector<std::uint64_t> token_;

    using Arrival = std::pair<double, std::size_t>;
    std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> queue_;
    using Expiry = std::tuple<double, std::size_t, std::uint64_t>;
    std::priority_queue<Expiry, std::vector<Expiry>, std::greater<>> expiry_queue_;

    Counters counters_;
    Accounting acc_;
    std::vector<TimeSample> samples_;
    RunOptions opts_;
    double now_ = 0.0;
};

// ---------------------------------------------------------------------------
// Stepped loop: tabular q-learning acts every time_step.
// ---------------------------------------------------------------------------

class QSteppedSim {
public:
    QSteppedSim(const ScenarioConfig& config, const QLearningPolicy& policy,
                const RunOptions& opts)
        : config_(config),
          n_(config.catalog.n_items),
          catalog_(config.catalog),
          law_(config.demand.arrival_law),
          omega_(config.demand.omega),
          qcfg_(config.qlearning),
          mode_(policy.mode),
          table_(policy.table),
          clock_(n_),
          counters_(n_),
          acc_(config.horizon_seconds, config.report.warmup_fraction,
               config.report.sample_interval),
          opts_(opts) {
        if (!table_) {
            throw ConfigurationError("q-learning run requires a QTable");
        }
        const std::size_t want_tables = qcfg_.share_table ? 1 : n_;
        if (table_->n_tables() != want_tables ||
            table_->max_age_steps() != qcfg_.max_age_steps) {
            throw ConfigurationError("q-learning table shape does not match the config");
        }
        arrival_.reserve(n_);
        version_.reserve(n_);
        explore_.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            arrival_.emplace_back(config.seed, i, RngStream::kArrivals);
            version_.emplace_back(config.seed, i, RngStream::kVersions);
            explore_.emplace_back(config.seed, i, RngStream::kExploration);
        }
        cached_version_.assign(n_, 0);
        fetch_time_.assign(n_, 0.0);
        cached_.assign(n_, false);
        next_arrival_.assign(n_, kInf);
        for (std::size_t i = 0; i < n_; ++i) {
            const double rate = config.demand.beta * catalog_.popularity[i];
            if (rate > 0.0) {
                next_arrival_[i] = next_interarrival(arrival_[i], law_, omega_, rate);
            }
        }
    }

    void run_until(double t_end) {
        const double h = qcfg_.time_step;
        while (now_ < t_end) {
            const double t1 = std::min(now_ + h, t_end);
            step(now_, t1);
            now_ = t1;
        }
    }

    double run_until_marked(double t_cap) {
        const double h = qcfg_.time_step;
        while (counters_.below_target > 0 && now_ < t_cap) {
            const double t1 = std::min(now_ + h, t_cap);
            step(now_, t1);
            now_ = t1;
        }
        return now_;
    }

    void replace_dynamics(const std::vector<double>& popularity,
                          const std::vector<double>& refresh_rates, bool freeze) {
        for (std::size_t i = 0; i < n_; ++i) {
            clock_.advance(i, now_, catalog_.refresh_rates[i], version_[i]);
        }
        catalog_.popularity = popularity;
        catalog_.refresh_rates = refresh_rates;
        for (std::size_t i = 0; i < n_; ++i) {
            const double rate = config_.demand.beta * catalog_.popularity[i];
            next_arrival_[i] = rate > 0.0
                ? now_ + next_interarrival(arrival_[i], law_, omega_, rate)
                : kInf;
        }
        if (freeze) {
            mode_ = ActionMode::Eval;
        }
    }

    Totals totals() const { return {now_, acc_.cost_raw(), acc_.cost_warm()}; }
    Counters& counters() { return counters_; }

    SimulationReport report() const {
        SimulationReport r;
        acc_.fill_report(r);
        r.request_count_per_item = counters_.requests;
        r.fetch_count_per_item = counters_.fetches;
        for (std::size_t i = 0; i < n_; ++i) {
            r.request_count += counters_.requests[i];
            r.fetch_count += counters_.fetches[i];
        }
        r.samples = samples_;
        r.seed = config_.seed;
        r.config_hash = config_fingerprint(config_);
        return r;
    }

private:
    std::size_t table_id(std::size_t item) const { return qcfg_.share_table ? 0 : item; }

    void step(double t0, double t1) {
        acc_.segment_to(t0, samples_);
        const double eps = mode_ == ActionMode::Train ? epsilon_at(t0, qcfg_) : 0.0;
        for (std::size_t item = 0; item < n_; ++item) {
            const bool r = next_arrival_[item] < t1;
            const double elapsed = cached_[item]
                ? t0 - fetch_time_[item]
                : static_cast<double>(qcfg_.max_age_steps) * qcfg_.time_step;
            const QState st = encode_state(std::max(elapsed, 0.0), r, qcfg_);
            int u = select_action(*table_, table_id(item), st, mode_, eps, &explore_[item]);
            if (r && !cached_[item]) {
                u = 1;  // nothing to serve from: the first request must fetch
            }

            double step_cost = 0.0;
            if (u == 1) {
                const double ft = r ? next_arrival_[item] : t0;
                const std::int64_t v =
                    clock_.advance(item, ft, catalog_.refresh_rates[item], version_[item]);
                cached_version_[item] = v;
                fetch_time_[item] = ft;
                if (!cached_[item]) {
                    cached_[item] = true;
                    acc_.occupancy_add(catalog_.sizes[item]);  // held from here on
                }
                const double charge = catalog_.sizes[item] * config_.costs.fetch_unit_cost;
                acc_.charge_fetch(ft, charge);
                step_cost += charge;
                ++counters_.fetches[item];
                if (opts_.event_log != nullptr) {
                    opts_.event_log->push_back({ft, static_cast<std::uint32_t>(item),
                                                r ? 'r' : 'f', 0, 1, charge});
                }
            }
            while (next_arrival_[item] < t1) {
                const double ta = next_arrival_[item];
                const std::int64_t v =
                    clock_.advance(item, ta, catalog_.refresh_rates[item], version_[item]);
                const std::int64_t age = v - cached_version_[item];
                const double charge =
                    config_.costs.aging_unit_cost * static_cast<double>(age);
                acc_.charge_aging(ta, charge);
                step_cost += charge;
                counters_.count_request(item);
                if (opts_.event_log != nullptr && u == 0) {
                    opts_.event_log->push_back(
                        {ta, static_cast<std::uint32_t>(item), 'r', age, 0, charge});
                }
                const double rate = config_.demand.beta * catalog_.popularity[item];
                next_arrival_[item] = ta + next_interarrival(arrival_[item], law_, omega_, rate);
            }

            if (mode_ == ActionMode::Train) {
                const double elapsed_next = cached_[item]
                    ? t1 - fetch_time_[item]
                    : static_cast<double>(qcfg_.max_age_steps) * qcfg_.time_step;
                const bool r_next = next_arrival_[item] < t1 + qcfg_.time_step;
                const QState next_st = encode_state(std::max(elapsed_next, 0.0), r_next, qcfg_);
                q_update(*table_, table_id(item), st, u, step_cost, next_st, qcfg_);
            }
        }
    }

    const ScenarioConfig& config_;
    std::size_t n_;
    ItemCatalog catalog_;
    ArrivalLaw law_;
    double omega_;
    QConfig qcfg_;
    ActionMode mode_;
    std::shared_ptr<QTable> table_;

    std::vector<RngStream> arrival_;
    std::vector<RngStream> version_;
    std::vector<RngStream> explore_;
    VersionClock clock_;

    std::vector<std::int64_t> cached_version_;
    std::vector<double> fetch_time_;
    std::vector<char> cached_;
    std::vector<double> next_arrival_;

    Counters counters_;
    Accounting acc_;
    std::vector<TimeSample> samples_;
    RunOptions opts_;
    double now_ = 0.0;
};

void check_runnable(const ScenarioConfig& config) {
    if (!(config.horizon_seconds > 0.0)) {
        throw std::invalid_argument("run: horizon must be > 0");
    }
    const auto violations = validate(config);
    if (!violations.empty()) {
        throw ConfigurationError("run: invalid scenario config: " + violations.front());
    }
}

}  // namespace

SimulationReport run(const ScenarioConfig& config, const PolicySelector& policy,
                     const RunOptions& opts) {
    check_runnable(config);
    if (const auto* q = std::get_if<QLearningPolicy>(&policy)) {
        QSteppedSim sim(config, *q, opts);
        sim.run_until(config.horizon_seconds);
        return sim.report();
    }
    EventDrivenSim sim(config, policy, opts);
    sim.run_until(config.horizon_seconds);
    SimulationReport r = sim.report();
    if (opts.swiftcache_state_json != nullptr && std::holds_alternative<SwiftCachePolicy>(policy)) {
        *opts.swiftcache_state_json = sim.swift_state_json();
    }
    return r;
}

namespace {

double sample_stderr(const std::vector<double>& xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

double mean_of(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    return xs.empty() ? 0.0 : m / static_cast<double>(xs.size());
}

}  // namespace

ReplicationSummary summarize(const std::vector<SimulationReport>& reports) {
    std::vector<double> rate, rate_w, occ_w;
    for (const auto& r : reports) {
        rate.push_back(r.avg_cost_rate);
        rate_w.push_back(r.avg_cost_rate_after_warmup);
        occ_w.push_back(r.occupancy_after_warmup);
    }
    ReplicationSummary s;
    s.mean_cost_rate = mean_of(rate);
    s.stderr_cost_rate = sample_stderr(rate);
    s.mean_cost_rate_after_warmup = mean_of(rate_w);
    s.stderr_cost_rate_after_warmup = sample_stderr(rate_w);
    s.mean_occupancy_after_warmup = mean_of(occ_w);
    s.stderr_occupancy_after_warmup = sample_stderr(occ_w);
    return s;
}

ReplicationSet run_replications(const ScenarioConfig& config, const PolicySelector& policy,
                                std::size_t n_runs, std::uint64_t seed_stride) {
    if (n_runs < 1) {
        throw std::invalid_argument("run_replications: n_runs must be >= 1");
    }
    ReplicationSet out;
    out.reports.resize(n_runs);
    std::vector<std::future<SimulationReport>> futures;
    futures.reserve(n_runs);
    for (std::size_t k = 0; k < n_runs; ++k) {
        ScenarioConfig run_config = config;
        run_config.seed = config.seed + k * seed_stride;
        PolicySelector run_policy = policy;
        if (auto* q = std::get_if<QLearningPolicy>(&run_policy)) {
            // Training replications must not race on a shared table.
            if (q->mode == ActionMode::Train && n_runs > 1) {
                q->table = std::make_shared<QTable>(*q->table);
            }
        }
        futures.push_back(std::async(std::launch::async, [run_config, run_policy] {
            return run(run_config, run_policy);
        }));
    }
    for (std::size_t k = 0; k < n_runs; ++k) {
        out.reports[k] = futures[k].get();
    }
    out.summary = summarize(out.reports);
    return out;
}

ShiftReport run_with_shift(const ScenarioConfig& config, const PolicySelector& policy,
                           const ShiftSpec& shift, std::size_t burnin_requests_per_item) {
    check_runnable(config);
    if (!(shift.shift_time > 0.0) || !(shift.shift_time < config.horizon_seconds)) {
        throw std::invalid_argument("run_with_shift: shift_time must lie inside (0, horizon)");
    }
    if (shift.new_popularity.size() != config.catalog.n_items ||
        shift.new_refresh_rates.size() != config.catalog.n_items) {
        throw std::invalid_argument("run_with_shift: shifted vectors must match n_items");
    }

    const double T = config.horizon_seconds;
    ShiftReport out;

    auto drive = [&](auto& sim, auto freeze_tag) {
        sim.run_until(shift.shift_time);
        const Totals at_shift = sim.totals();
        if constexpr (decltype(freeze_tag)::value) {
            sim.replace_dynamics(shift.new_popularity, shift.new_refresh_rates,
                                 !config.qlearning.continue_training_after_shift);
        } else {
            sim.replace_dynamics(shift.new_popularity, shift.new_refresh_rates);
        }
        sim.counters().mark(burnin_requests_per_item);
        out.burnin_end_time = sim.run_until_marked(T);
        const Totals at_burnin = sim.totals();
        sim.run_until(T);
        const Totals at_end = sim.totals();

        out.phase1_cost_rate = at_shift.cost / shift.shift_time;
        out.phase2_cost_rate = (at_end.cost - at_shift.cost) / (T - shift.shift_time);
        out.phase2_post_burnin_cost_rate =
            out.burnin_end_time < T
                ? (at_end.cost - at_burnin.cost) / (T - out.burnin_end_time)
                : 0.0;
        out.overall = sim.report();
    };

    if (const auto* q = std::get_if<QLearningPolicy>(&policy)) {
        QSteppedSim sim(config, *q, {});
        drive(sim, std::true_type{});
    } else {
        EventDrivenSim sim(config, policy, {});
        drive(sim, std::false_type{});
    }
    return out;
}

}  // namespace freshcache
