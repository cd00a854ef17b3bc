#include "freshcache/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "freshcache/errors.hpp"

namespace freshcache {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, int line, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigParseError(key, line, "key '" + key + "' (line " + std::to_string(line) +
                                              "): not a number: '" + text + "'");
    }
}

std::vector<double> parse_list(const std::string& key, int line, const std::string& text,
                               std::size_t n) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        out.push_back(parse_number(key, line, trim(part)));
    }
    if (out.size() == 1 && n > 1) {
        out.assign(n, out.front());  // scalar broadcast
    }
    if (out.size() != n) {
        throw ConfigParseError(key, line,
                               "key '" + key + "' (line " + std::to_string(line) + "): expected " +
                                   std::to_string(n) + " values, got " +
                                   std::to_string(out.size()));
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class Parser {
public:
    explicit Parser(const std::string& text) {
        std::stringstream ss(text);
        std::string line;
        int line_no = 0;
        while (std::getline(ss, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigParseError("", line_no,
                                       "line " + std::to_string(line_no) + ": expected key = value");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty()) {
                throw ConfigParseError(key, line_no,
                                       "line " + std::to_string(line_no) + ": empty key or value");
            }
            if (entries_.count(key) != 0) {
                throw ConfigParseError(key, line_no,
                                       "key '" + key + "' (line " + std::to_string(line_no) +
                                           "): duplicate");
            }
            entries_[key] = {value, line_no, false};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const RawEntry& require(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            throw ConfigParseError(key, 0, "missing required key '" + key + "'");
        }
        it->second.used = true;
        return it->second;
    }

    const RawEntry* optional(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return nullptr;
        }
        it->second.used = true;
        return &it->second;
    }

    double number(const std::string& key) {
        const auto& e = require(key);
        return parse_number(key, e.line, e.value);
    }

    double number_or(const std::string& key, double fallback) {
        const auto* e = optional(key);
        return e != nullptr ? parse_number(key, e->line, e->value) : fallback;
    }

    void fail_on_unknown() const {
        for (const auto& [key, e] : entries_) {
            if (!e.used) {
                throw ConfigParseError(key, e.line,
                                       "key '" + key + "' (line " + std::to_string(e.line) +
                                           "): unknown key");
            }
        }
    }

private:
    std::map<std::string, RawEntry> entries_;
};

bool catalog_is_uniform(const ItemCatalog& c) {
    auto all_equal = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    return c.n_items > 0 && all_equal(c.sizes) && all_equal(c.popularity) &&
           all_equal(c.refresh_rates);
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
    Parser p(text);
    ScenarioConfig cfg;

    const double n_items = p.number("catalog.n_items");
    if (n_items < 1 || n_items != std::floor(n_items)) {
        throw ConfigParseError("catalog.n_items", 0, "catalog.n_items must be a positive integer");
    }
    cfg.catalog.n_items = static_cast<std::size_t>(n_items);
    {
        const auto& e = p.require("catalog.sizes");
        cfg.catalog.sizes = parse_list("catalog.sizes", e.line, e.value, cfg.catalog.n_items);
    }
    {
        const auto& e = p.require("catalog.popularity");
        if (e.value == "uniform") {
            cfg.catalog.popularity = build_zipf_popularity(cfg.catalog.n_items, 0.0);
        } else if (e.value.rfind("zipf:", 0) == 0) {
            cfg.catalog.popularity = build_zipf_popularity(
                cfg.catalog.n_items,
                parse_number("catalog.popularity", e.line, e.value.substr(5)));
        } else {
            cfg.catalog.popularity =
                parse_list("catalog.popularity", e.line, e.value, cfg.catalog.n_items);
        }
    }
    {
        const auto& e = p.require("catalog.refresh_rates");
        cfg.catalog.refresh_rates =
            parse_list("catalog.refresh_rates", e.line, e.value, cfg.catalog.n_items);
    }

    cfg.demand.beta = p.number("demand.beta");
    if (const auto* e = p.optional("demand.arrival_law")) {
        if (e->value == "poisson") {
            cfg.demand.arrival_law = ArrivalLaw::PoissonProcess;
        } else if (e->value == "gamma") {
            cfg.demand.arrival_law = ArrivalLaw::GammaRenewal;
        } else {
            throw ConfigParseError("demand.arrival_law", e->line,
                                   "demand.arrival_law must be poisson or gamma");
        }
    }
    if (cfg.demand.arrival_law == ArrivalLaw::GammaRenewal) {
        cfg.demand.omega = p.number("demand.omega");
    } else {
        cfg.demand.omega = p.number_or("demand.omega", 1.0);
    }

    cfg.costs.fetch_unit_cost = p.number("costs.fetch_unit_cost");
    cfg.costs.aging_unit_cost = p.number("costs.aging_unit_cost");

    if (const auto* e = p.optional("capacity.budget")) {
        if (e->value != "unlimited") {
            cfg.capacity = CapacityConstraint::make_finite(
                parse_number("capacity.budget", e->line, e->value));
        }
    }
    if (const auto* e = p.optional("capacity.budget_fraction")) {
        if (!cfg.capacity.unlimited()) {
            throw ConfigParseError("capacity.budget_fraction", e->line,
                                   "capacity.budget and capacity.budget_fraction are exclusive");
        }
        cfg.capacity = CapacityConstraint::make_fraction(
            parse_number("capacity.budget_fraction", e->line, e->value));
    }

    cfg.horizon_seconds = p.number("horizon_seconds");
    const double seed = p.number("seed");
    cfg.seed = static_cast<std::uint64_t>(seed);

    cfg.swiftcache.theta = p.number_or("swiftcache.theta", 0.005);
    cfg.swiftcache.tau_max = p.number_or("swiftcache.tau_max", 1e4);
    if (const auto* e = p.optional("swiftcache.lambda_estimator")) {
        if (e->value == "aov-rate") {
            cfg.swiftcache.estimator = LambdaEstimator::AovRate;
        } else if (e->value == "paper-diff") {
            cfg.swiftcache.estimator = LambdaEstimator::PaperDiff;
        } else {
            throw ConfigParseError("swiftcache.lambda_estimator", e->line,
                                   "swiftcache.lambda_estimator must be aov-rate or paper-diff");
        }
    }

    cfg.qlearning.time_step = p.number_or("qlearning.time_step", 0.1);
    cfg.qlearning.learning_rate = p.number_or("qlearning.learning_rate", 0.1);
    cfg.qlearning.discount = p.number_or("qlearning.discount", 0.99);
    cfg.qlearning.epsilon_initial = p.number_or("qlearning.epsilon_initial", 0.2);
    cfg.qlearning.epsilon_floor = p.number_or("qlearning.epsilon_floor", 0.01);
    cfg.qlearning.max_age_steps =
        static_cast<std::size_t>(p.number_or("qlearning.max_age_steps", 600));
    cfg.qlearning.train_horizon = p.number_or("qlearning.train_horizon", 1e6);
    if (const auto* e = p.optional("qlearning.share_table")) {
        if (e->value == "on") {
            cfg.qlearning.share_table = true;
        } else if (e->value == "off") {
            cfg.qlearning.share_table = false;
        } else if (e->value == "auto") {
            cfg.qlearning.share_table = catalog_is_uniform(cfg.catalog);
        } else {
            throw ConfigParseError("qlearning.share_table", e->line,
                                   "qlearning.share_table must be auto, on or off");
        }
    } else {
        cfg.qlearning.share_table = catalog_is_uniform(cfg.catalog);
    }

    cfg.report.warmup_fraction = p.number_or("report.warmup_fraction", 0.1);
    cfg.report.sample_interval = p.number_or("report.sample_interval", 0.0);

    p.fail_on_unknown();
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigParseError("", 0, "cannot open config file: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
    std::ostringstream out;
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) {
                s += ",";
            }
            s += fmt(v[i]);
        }
        return s;
    };
    out << "catalog.n_items = " << cfg.catalog.n_items << "\n";
    out << "catalog.sizes = " << list(cfg.catalog.sizes) << "\n";
    out << "catalog.popularity = " << list(cfg.catalog.popularity) << "\n";
    out << "catalog.refresh_rates = " << list(cfg.catalog.refresh_rates) << "\n";
    out << "demand.beta = " << fmt(cfg.demand.beta) << "\n";
    out << "demand.arrival_law = "
        << (cfg.demand.arrival_law == ArrivalLaw::PoissonProcess ? "poisson" : "gamma") << "\n";
    out << "demand.omega = " << fmt(cfg.demand.omega) << "\n";
    out << "costs.fetch_unit_cost = " << fmt(cfg.costs.fetch_unit_cost) << "\n";
    out << "costs.aging_unit_cost = " << fmt(cfg.costs.aging_unit_cost) << "\n";
    if (cfg.capacity.fraction_of_unconstrained) {
        out << "capacity.budget_fraction = " << fmt(*cfg.capacity.fraction_of_unconstrained)
            << "\n";
    } else if (cfg.capacity.unlimited()) {
        out << "capacity.budget = unlimited\n";
    } else {
        out << "capacity.budget = " << fmt(cfg.capacity.budget) << "\n";
    }
    out << "horizon_seconds = " << fmt(cfg.horizon_seconds) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "swiftcache.theta = " << fmt(cfg.swiftcache.theta) << "\n";
    out << "swiftcache.tau_max = " << fmt(cfg.swiftcache.tau_max) << "\n";
    out << "swiftcache.lambda_estimator = "
        << (cfg.swiftcache.estimator == LambdaEstimator::AovRate ? "aov-rate" : "paper-diff")
        << "\n";
    out << "qlearning.time_step = " << fmt(cfg.qlearning.time_step) << "\n";
    out << "qlearning.learning_rate = " << fmt(cfg.qlearning.learning_rate) << "\n";
    out << "qlearning.discount = " << fmt(cfg.qlearning.discount) << "\n";
    out << "qlearning.epsilon_initial = " << fmt(cfg.qlearning.epsilon_initial) << "\n";
    out << "qlearning.epsilon_floor = " << fmt(cfg.qlearning.epsilon_floor) << "\n";
    out << "qlearning.max_age_steps = " << cfg.qlearning.max_age_steps << "\n";
    out << "qlearning.train_horizon = " << fmt(cfg.qlearning.train_horizon) << "\n";
    out << "qlearning.share_table = " << (cfg.qlearning.share_table ? "on" : "off") << "\n";
    out << "report.warmup_fraction = " << fmt(cfg.report.warmup_fraction) << "\n";
    out << "report.sample_interval = " << fmt(cfg.report.sample_interval) << "\n";
    return out.str();
}

std::uint64_t config_fingerprint(const ScenarioConfig& cfg) {
    const std::string s = serialize_scenario(cfg);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace freshcache
