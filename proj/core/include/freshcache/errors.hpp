#pragma once

#include <stdexcept>
#include <string>

namespace freshcache {

// Budget is non-positive while demand is positive: no timer vector can satisfy it.
class InfeasibleBudgetError : public std::runtime_error {
public:
    explicit InfeasibleBudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A policy/config combination the engine cannot run (e.g. q-learning eval without a table).
class ConfigurationError : public std::runtime_error {
public:
    explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap before reaching tolerance.
class IterationLimitError : public std::runtime_error {
public:
    explicit IterationLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Config file problem, carrying the offending line and dotted key when known.
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(std::string key, int line, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

}  // namespace freshcache
