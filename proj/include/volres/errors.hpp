#pragma once

#include <stdexcept>
#include <string>

namespace volres {

/// Malformed input: bad parameters, unreadable or inconsistent configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not deliver a certified result (divergence,
/// refused certificate, unknown accuracy where accuracy was demanded).
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace volres
