#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freshcache/engine.hpp"

namespace freshcache {

// 100 * (C_measured - C*) / C_measured. The denominator is the measured cost.
// Negative when a finite run beats the analytic benchmark.
// Throws std::invalid_argument when measured <= 0.
double pct_increase_vs_optimal(double measured, double optimal);

// 100 * (C_MF - C_MB) / C_MB. Positive favors the model-based policy.
// Throws std::invalid_argument when c_mb <= 0.
double pct_increase_mf_vs_mb(double c_mf, double c_mb);

struct ExperimentResult {
    std::string label;
    std::string policy;
    double measured = 0.0;
    double baseline = 0.0;
    double pct_increase = 0.0;
    std::size_t n_runs = 0;
    double std_error = 0.0;
};

// One output row. Cells left unset print empty, per the stable schema
//   param,policy,seed,avg_cost_rate,occupancy,pct_vs_optimal,pct_mf_vs_mb,stderr
struct CsvRow {
    std::optional<double> param;
    std::string policy;
    std::optional<std::uint64_t> seed;  // unset rows are per-group summaries
    std::optional<double> avg_cost_rate;
    std::optional<double> occupancy;
    std::optional<double> pct_vs_optimal;
    std::optional<double> pct_mf_vs_mb;
    std::optional<double> std_error;
};

// Renders rows sorted by (param, policy, seed), summary rows after their
// group's seed rows. Deterministic: fixed %.12g number formatting.
std::string to_csv(std::vector<CsvRow> rows);
void write_csv(const std::string& path, std::vector<CsvRow> rows);

// JSON view of a report (and a replication set), mirroring SimulationReport.
std::string report_to_json(const SimulationReport& report, int indent = 2);
std::string replications_to_json(const ReplicationSet& set, int indent = 2);

}  // namespace freshcache
