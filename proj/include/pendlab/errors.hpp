#pragma once

#include <stdexcept>
#include <string>

namespace pendlab {

/// Raised when a scenario, controller spec or command violates its invariants.
/// `field()` carries the dotted path of the offending setting when known.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& message, std::string field = {})
        : std::invalid_argument(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A command that is well-formed but does not fit the running session
/// (for example an ADC frame while the reference is not joystick-driven).
class ModeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace pendlab
