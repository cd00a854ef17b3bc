#include "freshcache/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace freshcache {

double pct_increase_vs_optimal(double measured, double optimal) {
    if (!(measured > 0.0)) {
        throw std::invalid_argument("pct_increase_vs_optimal: measured cost must be > 0");
    }
    return 100.0 * (measured - optimal) / measured;
}

double pct_increase_mf_vs_mb(double c_mf, double c_mb) {
    if (!(c_mb > 0.0)) {
        throw std::invalid_argument("pct_increase_mf_vs_mb: model-based cost must be > 0");
    }
    return 100.0 * (c_mf - c_mb) / c_mb;
}

namespace {

std::string cell(const std::optional<double>& v) {
    if (!v) {
        return "";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", *v);
    return buf;
}

}  // namespace

std::string to_csv(std::vector<CsvRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
        const double pa = a.param.value_or(-std::numeric_limits<double>::infinity());
        const double pb = b.param.value_or(-std::numeric_limits<double>::infinity());
        if (pa != pb) {
            return pa < pb;
        }
        if (a.policy != b.policy) {
            return a.policy < b.policy;
        }
        const bool sa = !a.seed.has_value();  // summaries sort after seed rows
        const bool sb = !b.seed.has_value();
        if (sa != sb) {
            return sb;
        }
        return a.seed.value_or(0) < b.seed.value_or(0);
    });
    std::string out = "param,policy,seed,avg_cost_rate,occupancy,pct_vs_optimal,pct_mf_vs_mb,stderr\n";
    for (const auto& r : rows) {
        out += cell(r.param);
        out += ',';
        out += r.policy;
        out += ',';
        out += r.seed ? std::to_string(*r.seed) : "";
        out += ',';
        out += cell(r.avg_cost_rate);
        out += ',';
        out += cell(r.occupancy);
        out += ',';
        out += cell(r.pct_vs_optimal);
        out += ',';
        out += cell(r.pct_mf_vs_mb);
        out += ',';
        out += cell(r.std_error);
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, std::vector<CsvRow> rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << to_csv(std::move(rows));
}

namespace {

nlohmann::json report_json(const SimulationReport& r) {
    nlohmann::json j;
    j["total_cost"] = r.total_cost;
    j["fetch_cost"] = r.fetch_cost;
    j["aging_cost"] = r.aging_cost;
    j["duration"] = r.duration;
    j["avg_cost_rate"] = r.avg_cost_rate;
    j["warmup_seconds"] = r.warmup_seconds;
    j["cost_after_warmup"] = r.cost_after_warmup;
    j["avg_cost_rate_after_warmup"] = r.avg_cost_rate_after_warmup;
    j["occupancy_time_average"] = r.occupancy_time_average;
    j["occupancy_after_warmup"] = r.occupancy_after_warmup;
    j["request_count"] = r.request_count;
    j["fetch_count"] = r.fetch_count;
    j["request_count_per_item"] = r.request_count_per_item;
    j["fetch_count_per_item"] = r.fetch_count_per_item;
    j["seed"] = r.seed;
    j["config_hash"] = r.config_hash;
    auto& samples = j["samples"] = nlohmann::json::array();
    for (const auto& s : r.samples) {
        samples.push_back({{"t", s.t},
                           {"running_avg_cost", s.running_avg_cost},
                           {"occupancy", s.occupancy}});
    }
    return j;
}

}  // namespace

std::string report_to_json(const SimulationReport& report, int indent) {
    return report_json(report).dump(indent);
}

std::string replications_to_json(const ReplicationSet& set, int indent) {
    nlohmann::json j;
    j["summary"] = {
        {"mean_cost_rate", set.summary.mean_cost_rate},
        {"stderr_cost_rate", set.summary.stderr_cost_rate},
        {"mean_cost_rate_after_warmup", set.summary.mean_cost_rate_after_warmup},
        {"stderr_cost_rate_after_warmup", set.summary.stderr_cost_rate_after_warmup},
        {"mean_occupancy_after_warmup", set.summary.mean_occupancy_after_warmup},
        {"stderr_occupancy_after_warmup", set.summary.stderr_occupancy_after_warmup},
        {"n_runs", set.reports.size()},
    };
    auto& runs = j["runs"] = nlohmann::json::array();
    for (const auto& r : set.reports) {
        runs.push_back(report_json(r));
    }
    return j.dump(indent);
}

}  // namespace freshcache
