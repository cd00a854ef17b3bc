#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "freshcache/config_io.hpp"
#include "freshcache/engine.hpp"
#include "freshcache/errors.hpp"
#include "freshcache/mdp.hpp"
#include "freshcache/metrics.hpp"
#include "freshcache/q_learning.hpp"
#include "freshcache/timer_policy.hpp"

namespace fc = freshcache;

namespace {

struct OutputPaths {
    std::string csv;
    std::string json;
};

OutputPaths output_paths(const std::string& base) {
    if (base.size() > 4 && base.rfind(".csv") == base.size() - 4) {
        return {base, base.substr(0, base.size() - 4) + ".json"};
    }
    return {base + ".csv", base + ".json"};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << content;
}

// Emits the CSV/JSON pair, or the JSON to stdout when no output path given.
void emit(const std::string& output, std::vector<fc::CsvRow> rows, const nlohmann::json& summary) {
    if (output.empty()) {
        std::cout << summary.dump(2) << "\n";
        return;
    }
    const auto paths = output_paths(output);
    fc::write_csv(paths.csv, std::move(rows));
    write_file(paths.json, summary.dump(2) + "\n");
    std::cerr << "wrote " << paths.csv << " and " << paths.json << "\n";
}

std::vector<double> parse_vector_arg(const std::string& text, std::size_t n,
                                     const std::string& what) {
    if (text == "uniform") {
        return fc::build_zipf_popularity(n, 0.0);
    }
    if (text.rfind("zipf:", 0) == 0) {
        return fc::build_zipf_popularity(n, std::stod(text.substr(5)));
    }
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        out.push_back(std::stod(part));
    }
    if (out.size() == 1 && n > 1) {
        out.assign(n, out.front());
    }
    if (out.size() != n) {
        throw std::invalid_argument(what + ": expected " + std::to_string(n) + " values");
    }
    return out;
}

struct CommonArgs {
    std::string config_path;
    std::string output;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double duration = 0.0;
    double warmup_frac = -1.0;
    std::size_t runs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_runs = true) {
    cmd->add_option("--config", args.config_path, "scenario config file")->required();
    cmd->add_option("--output", args.output, "output stem or .csv path (CSV + JSON)");
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--duration", args.duration, "override horizon_seconds");
    cmd->add_option("--warmup-frac", args.warmup_frac, "override report.warmup_fraction");
    if (with_runs) {
        cmd->add_option("--runs", args.runs, "number of seeded replications")
            ->check(CLI::PositiveNumber);
    }
}

fc::ScenarioConfig load_config(const CommonArgs& args) {
    fc::ScenarioConfig cfg = fc::load_scenario_file(args.config_path);
    if (args.seed_set) {
        cfg.seed = args.seed;
    }
    if (args.duration > 0.0) {
        cfg.horizon_seconds = args.duration;
    }
    if (args.warmup_frac >= 0.0) {
        cfg.report.warmup_fraction = args.warmup_frac;
    }
    const auto violations = fc::validate(cfg);
    if (!violations.empty()) {
        std::string msg = "invalid scenario config:";
        for (const auto& v : violations) {
            msg += "\n  " + v;
        }
        throw fc::ConfigParseError("", 0, msg);
    }
    return cfg;
}

std::shared_ptr<fc::QTable> load_qtable(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open q-table: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return std::make_shared<fc::QTable>(fc::QTable::from_json(ss.str()));
}

nlohmann::json policy_json(const fc::TimerPolicy& p) {
    return {{"timers", p.timers},
            {"alpha", p.multiplier},
            {"analytic_cost", p.analytic_cost},
            {"analytic_occupancy", p.analytic_occupancy}};
}

// ---------------------------------------------------------------------------

int cmd_optimal(const CommonArgs& args) {
    const fc::ScenarioConfig cfg = load_config(args);
    const fc::TimerPolicy policy =
        fc::solve_alpha(cfg.catalog, cfg.demand.beta, cfg.costs.fetch_unit_cost,
                        cfg.costs.aging_unit_cost, cfg.capacity);
    const double c_star = fc::optimal_cost_unlimited(cfg.catalog, cfg.demand.beta,
                                                     cfg.costs.fetch_unit_cost,
                                                     cfg.costs.aging_unit_cost);
    nlohmann::json j = policy_json(policy);
    j["optimal_cost_unlimited"] = c_star;
    const double budget = fc::resolve_budget(cfg);
    if (std::isinf(budget)) {
        j["budget"] = "unlimited";
        j["slackness_residual"] = 0.0;
    } else {
        j["budget"] = budget;
        j["slackness_residual"] = policy.multiplier * (policy.analytic_occupancy - budget);
    }

    std::vector<fc::CsvRow> rows;
    fc::CsvRow row;
    row.policy = "optimal";
    row.avg_cost_rate = policy.analytic_cost;
    row.occupancy = policy.analytic_occupancy;
    row.pct_vs_optimal = fc::pct_increase_vs_optimal(policy.analytic_cost, c_star);
    rows.push_back(row);
    emit(args.output, std::move(rows), j);
    return 0;
}

fc::PolicySelector make_policy(const fc::ScenarioConfig& cfg, const std::string& name,
                               const std::string& qtable_in) {
    if (name == "timer") {
        return fc::FixedTimerPolicy{
            fc::solve_alpha(cfg.catalog, cfg.demand.beta, cfg.costs.fetch_unit_cost,
                            cfg.costs.aging_unit_cost, cfg.capacity)
                .timers};
    }
    if (name == "swiftcache") {
        return fc::SwiftCachePolicy{};
    }
    if (name == "qlearning") {
        if (qtable_in.empty()) {
            throw fc::ConfigurationError("policy qlearning needs --qtable-in (train one first)");
        }
        return fc::QLearningPolicy{load_qtable(qtable_in), fc::ActionMode::Eval};
    }
    throw fc::ConfigurationError("unknown policy: " + name);
}

int cmd_simulate(const CommonArgs& args, const std::string& policy_name,
                 const std::string& qtable_in, const std::string& dump_state) {
    const fc::ScenarioConfig cfg = load_config(args);
    const fc::PolicySelector policy = make_policy(cfg, policy_name, qtable_in);
    const double c_star = fc::optimal_cost_unlimited(cfg.catalog, cfg.demand.beta,
                                                     cfg.costs.fetch_unit_cost,
                                                     cfg.costs.aging_unit_cost);

    const fc::ReplicationSet set = fc::run_replications(cfg, policy, args.runs);

    if (!dump_state.empty()) {
        if (policy_name != "swiftcache") {
            throw fc::ConfigurationError("--dump-state applies to the swiftcache policy");
        }
        fc::ScenarioConfig one = cfg;
        std::string state_json;
        fc::RunOptions opts;
        opts.swiftcache_state_json = &state_json;
        fc::run(one, policy, opts);
        write_file(dump_state, state_json + "\n");
    }

    std::vector<fc::CsvRow> rows;
    for (const auto& r : set.reports) {
        fc::CsvRow row;
        row.policy = policy_name;
        row.seed = r.seed;
        row.avg_cost_rate = r.avg_cost_rate_after_warmup;
        row.occupancy = r.occupancy_after_warmup;
        if (r.avg_cost_rate_after_warmup > 0.0) {
            row.pct_vs_optimal = fc::pct_increase_vs_optimal(r.avg_cost_rate_after_warmup, c_star);
        }
        rows.push_back(row);
    }
    fc::CsvRow summary;
    summary.policy = policy_name;
    summary.avg_cost_rate = set.summary.mean_cost_rate_after_warmup;
    summary.occupancy = set.summary.mean_occupancy_after_warmup;
    if (set.summary.mean_cost_rate_after_warmup > 0.0) {
        summary.pct_vs_optimal =
            fc::pct_increase_vs_optimal(set.summary.mean_cost_rate_after_warmup, c_star);
    }
    summary.std_error = set.summary.stderr_cost_rate_after_warmup;
    rows.push_back(summary);

    nlohmann::json j = nlohmann::json::parse(fc::replications_to_json(set));
    j["policy"] = policy_name;
    j["optimal_cost_unlimited"] = c_star;
    if (set.summary.mean_cost_rate_after_warmup > 0.0) {
        j["pct_vs_optimal"] =
            fc::pct_increase_vs_optimal(set.summary.mean_cost_rate_after_warmup, c_star);
    }
    emit(args.output, std::move(rows), j);
    return 0;
}

int cmd_train_q(const CommonArgs& args, const std::string& qtable_out) {
    fc::ScenarioConfig cfg = load_config(args);
    if (args.duration <= 0.0) {
        cfg.horizon_seconds = cfg.qlearning.train_horizon;
    }
    cfg.qlearning.train_horizon = cfg.horizon_seconds;
    auto table = std::make_shared<fc::QTable>(
        cfg.qlearning.share_table ? 1 : cfg.catalog.n_items, cfg.qlearning.max_age_steps);
    const fc::SimulationReport report =
        fc::run(cfg, fc::QLearningPolicy{table, fc::ActionMode::Train});
    write_file(qtable_out, table->to_json());
    std::cerr << "wrote " << qtable_out << "\n";

    std::vector<fc::CsvRow> rows;
    fc::CsvRow row;
    row.policy = "qlearning-train";
    row.seed = report.seed;
    row.avg_cost_rate = report.avg_cost_rate_after_warmup;
    row.occupancy = report.occupancy_after_warmup;
    rows.push_back(row);
    emit(args.output, std::move(rows), nlohmann::json::parse(fc::report_to_json(report)));
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& param,
              const std::vector<double>& values, const std::vector<std::string>& policies,
              const std::string& qtable_in) {
    const fc::ScenarioConfig base = load_config(args);
    std::vector<fc::CsvRow> rows;
    nlohmann::json j;
    j["param"] = param;

    for (const double value : values) {
        fc::ScenarioConfig cfg = base;
        if (param == "omega") {
            cfg.demand.arrival_law = fc::ArrivalLaw::GammaRenewal;
            cfg.demand.omega = value;
        } else if (param == "budget") {
            cfg.capacity = fc::CapacityConstraint::make_fraction(value);
        } else if (param == "theta") {
            cfg.swiftcache.theta = value;
        } else {
            throw fc::ConfigurationError("sweep param must be omega, budget or theta");
        }
        const double c_star = fc::optimal_cost_unlimited(cfg.catalog, cfg.demand.beta,
                                                         cfg.costs.fetch_unit_cost,
                                                         cfg.costs.aging_unit_cost);
        double mb_mean = 0.0;
        bool have_mb = false;
        for (const auto& policy_name : policies) {
            fc::ReplicationSet set;
            if (policy_name == "qlearning" && qtable_in.empty()) {
                // Train fresh per seed on this parameter point, then evaluate.
                set.reports.resize(args.runs);
                for (std::size_t k = 0; k < args.runs; ++k) {
                    fc::ScenarioConfig train_cfg = cfg;
                    train_cfg.seed = cfg.seed + k;
                    train_cfg.horizon_seconds = cfg.qlearning.train_horizon;
                    auto table = std::make_shared<fc::QTable>(
                        cfg.qlearning.share_table ? 1 : cfg.catalog.n_items,
                        cfg.qlearning.max_age_steps);
                    fc::run(train_cfg, fc::QLearningPolicy{table, fc::ActionMode::Train});
                    fc::ScenarioConfig eval_cfg = cfg;
                    eval_cfg.seed = cfg.seed + k + 1000003;  // fresh arrivals for eval
                    set.reports[k] =
                        fc::run(eval_cfg, fc::QLearningPolicy{table, fc::ActionMode::Eval});
                }
                set.summary = fc::summarize(set.reports);
            } else {
                set = fc::run_replications(cfg, make_policy(cfg, policy_name, qtable_in),
                                           args.runs);
            }
            for (const auto& r : set.reports) {
                fc::CsvRow row;
                row.param = value;
                row.policy = policy_name;
                row.seed = r.seed;
                row.avg_cost_rate = r.avg_cost_rate_after_warmup;
                row.occupancy = r.occupancy_after_warmup;
                if (r.avg_cost_rate_after_warmup > 0.0) {
                    row.pct_vs_optimal =
                        fc::pct_increase_vs_optimal(r.avg_cost_rate_after_warmup, c_star);
                }
                rows.push_back(row);
            }
            fc::CsvRow summary;
            summary.param = value;
            summary.policy = policy_name;
            const double mean = set.summary.mean_cost_rate_after_warmup;
            summary.avg_cost_rate = mean;
            summary.occupancy = set.summary.mean_occupancy_after_warmup;
            if (mean > 0.0) {
                summary.pct_vs_optimal = fc::pct_increase_vs_optimal(mean, c_star);
            }
            summary.std_error = set.summary.stderr_cost_rate_after_warmup;
            if (policy_name == "swiftcache") {
                mb_mean = mean;
                have_mb = true;
            } else if (policy_name == "qlearning" && have_mb && mb_mean > 0.0) {
                summary.pct_mf_vs_mb = fc::pct_increase_mf_vs_mb(mean, mb_mean);
            }
            rows.push_back(summary);
            j["points"].push_back({{"param", value},
                                   {"policy", policy_name},
                                   {"mean_cost_rate_after_warmup", mean},
                                   {"optimal_cost_unlimited", c_star}});
        }
    }
    emit(args.output, std::move(rows), j);
    return 0;
}

int cmd_oracle(double fetch_cost, double kappa, double discount, std::size_t smax, double tol,
               const std::string& output) {
    const fc::PerItemMdp mdp{smax, fetch_cost, kappa, discount};
    const fc::ValueIterationResult vi = fc::value_iteration(mdp, tol);
    const auto threshold = fc::extract_threshold(vi.policy);
    nlohmann::json j;
    j["values"] = std::vector<double>(vi.values.begin() + 1, vi.values.end());
    j["policy"] = std::vector<int>(vi.policy.begin() + 1, vi.policy.end());
    j["iterations"] = vi.iterations;
    if (threshold) {
        j["threshold"] = *threshold;
    } else {
        j["threshold"] = "not-threshold";
    }
    std::vector<fc::CsvRow> rows;
    fc::CsvRow row;
    row.policy = "oracle";
    rows.push_back(row);
    emit(output, std::move(rows), j);
    return 0;
}

int cmd_shift(const CommonArgs& args, const std::string& policy_name,
              const std::string& qtable_in, double shift_time, const std::string& shift_pop,
              const std::string& shift_rates, std::size_t burnin_requests, bool continue_q) {
    fc::ScenarioConfig cfg = load_config(args);
    cfg.qlearning.continue_training_after_shift = continue_q;
    fc::ShiftSpec spec;
    spec.shift_time = shift_time;
    spec.new_popularity = shift_pop.empty()
        ? cfg.catalog.popularity
        : parse_vector_arg(shift_pop, cfg.catalog.n_items, "--shift-popularity");
    spec.new_refresh_rates = shift_rates.empty()
        ? cfg.catalog.refresh_rates
        : parse_vector_arg(shift_rates, cfg.catalog.n_items, "--shift-refresh-rates");
    if (burnin_requests == 0) {
        burnin_requests = static_cast<std::size_t>(std::ceil(5.0 / cfg.swiftcache.theta));
    }

    nlohmann::json j;
    std::vector<fc::CsvRow> rows;
    for (std::size_t k = 0; k < args.runs; ++k) {
        fc::ScenarioConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + k;
        const fc::PolicySelector policy = make_policy(run_cfg, policy_name, qtable_in);
        const fc::ShiftReport rep = fc::run_with_shift(run_cfg, policy, spec, burnin_requests);
        j["runs"].push_back({{"seed", run_cfg.seed},
                             {"phase1_cost_rate", rep.phase1_cost_rate},
                             {"phase2_cost_rate", rep.phase2_cost_rate},
                             {"burnin_end_time", rep.burnin_end_time},
                             {"phase2_post_burnin_cost_rate", rep.phase2_post_burnin_cost_rate}});
        fc::CsvRow r1;
        r1.param = 1;
        r1.policy = policy_name;
        r1.seed = run_cfg.seed;
        r1.avg_cost_rate = rep.phase1_cost_rate;
        rows.push_back(r1);
        fc::CsvRow r2;
        r2.param = 2;
        r2.policy = policy_name;
        r2.seed = run_cfg.seed;
        r2.avg_cost_rate = rep.phase2_post_burnin_cost_rate;
        rows.push_back(r2);
    }
    j["burnin_requests_per_item"] = burnin_requests;
    emit(args.output, std::move(rows), j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freshness-aware caching simulator and policy toolkit"};
    app.require_subcommand(1);

    CommonArgs optimal_args;
    auto* optimal = app.add_subcommand("optimal", "closed-form timers, multiplier and cost");
    add_common(optimal, optimal_args, false);

    CommonArgs sim_args;
    std::string sim_policy = "timer";
    std::string sim_qtable_in;
    std::string sim_dump_state;
    auto* simulate = app.add_subcommand("simulate", "run the event simulator under a policy");
    add_common(simulate, sim_args);
    simulate->add_option("--policy", sim_policy, "timer | swiftcache | qlearning")->required();
    simulate->add_option("--qtable-in", sim_qtable_in, "trained table for qlearning eval");
    simulate->add_option("--dump-state", sim_dump_state, "write final swiftcache state JSON");

    CommonArgs train_args;
    std::string train_qtable_out;
    auto* train = app.add_subcommand("train-q", "train a q-table on the scenario");
    add_common(train, train_args, false);
    train->add_option("--qtable-out", train_qtable_out, "output q-table path")->required();

    CommonArgs sweep_args;
    std::string sweep_param;
    std::vector<double> sweep_values;
    std::vector<std::string> sweep_policies{"swiftcache"};
    std::string sweep_qtable_in;
    auto* sweep = app.add_subcommand("sweep", "sweep omega, budget fraction or theta");
    add_common(sweep, sweep_args);
    sweep->add_option("--param", sweep_param, "omega | budget | theta")->required();
    sweep->add_option("--values", sweep_values, "comma-separated parameter values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--policy", sweep_policies, "policies to run (repeatable)")
        ->delimiter(',');
    sweep->add_option("--qtable-in", sweep_qtable_in, "reuse a trained table for qlearning");

    double oracle_F = 1.0, oracle_kappa = 1.0, oracle_q = 0.9, oracle_tol = 1e-12;
    std::size_t oracle_smax = 50;
    std::string oracle_output;
    auto* oracle = app.add_subcommand("oracle", "per-item MDP value iteration");
    oracle->add_option("--F", oracle_F, "fetch cost")->required();
    oracle->add_option("--kappa", oracle_kappa, "aging cost slope per arrival step")->required();
    oracle->add_option("--q", oracle_q, "discount in (0,1)")->required();
    oracle->add_option("--smax", oracle_smax, "state cap");
    oracle->add_option("--tol", oracle_tol, "sup-norm tolerance");
    oracle->add_option("--output", oracle_output, "output stem or .csv path");

    CommonArgs shift_args;
    std::string shift_policy = "swiftcache";
    std::string shift_qtable_in;
    double shift_time = 0.0;
    std::string shift_pop;
    std::string shift_rates;
    std::size_t shift_burnin = 0;
    bool shift_continue_q = false;
    auto* shift = app.add_subcommand("shift", "mid-run popularity/refresh change");
    add_common(shift, shift_args);
    shift->add_option("--policy", shift_policy, "timer | swiftcache | qlearning");
    shift->add_option("--qtable-in", shift_qtable_in, "trained table for qlearning");
    shift->add_option("--shift-time", shift_time, "seconds into the run")->required();
    shift->add_option("--shift-popularity", shift_pop, "uniform | zipf:<z> | list");
    shift->add_option("--shift-refresh-rates", shift_rates, "scalar | list");
    shift->add_option("--burnin-requests", shift_burnin,
                      "per-item burn-in request count (default 5/theta)");
    shift->add_flag("--continue-q", shift_continue_q, "keep training q after the shift");

    CLI11_PARSE(app, argc, argv);

    try {
        if (optimal->parsed()) {
            return cmd_optimal(optimal_args);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_args, sim_policy, sim_qtable_in, sim_dump_state);
        }
        if (train->parsed()) {
            return cmd_train_q(train_args, train_qtable_out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_args, sweep_param, sweep_values, sweep_policies,
                             sweep_qtable_in);
        }
        if (oracle->parsed()) {
            return cmd_oracle(oracle_F, oracle_kappa, oracle_q, oracle_smax, oracle_tol,
                              oracle_output);
        }
        if (shift->parsed()) {
            return cmd_shift(shift_args, shift_policy, shift_qtable_in, shift_time, shift_pop,
                             shift_rates, shift_burnin, shift_continue_q);
        }
    } catch (const fc::ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const fc::ConfigurationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
