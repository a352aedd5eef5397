#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace etsim {

struct Violation {
    std::string field;
    std::string message;
};

/// Bad input: malformed config, precondition failure. CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

std::string join_violations(const std::vector<Violation>& violations);

}  // namespace etsim
