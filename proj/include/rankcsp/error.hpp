#pragma once

#include <stdexcept>
#include <string>

namespace rankcsp {

/// Base of every error raised by the library. `kind()` is a stable short tag
/// used by the CLI when it reports failures as JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct MalformedInstance : Error {
    explicit MalformedInstance(const std::string& what) : Error("malformed-instance", what) {}
};

struct PositionCollision : Error {
    explicit PositionCollision(const std::string& what) : Error("position-collision", what) {}
};

struct DomainMismatch : Error {
    explicit DomainMismatch(const std::string& what) : Error("domain-mismatch", what) {}
};

struct InstanceTooSmall : Error {
    explicit InstanceTooSmall(const std::string& what) : Error("instance-too-small", what) {}
};

struct SizeCapExceeded : Error {
    explicit SizeCapExceeded(const std::string& what) : Error("size-cap-exceeded", what) {}
};

struct GuessBudgetExceeded : Error {
    GuessBudgetExceeded(const std::string& what, double required)
        : Error("guess-budget-exceeded", what), required_(required) {}

    /// Number of guesses the exhaustive enumeration would need.
    double required() const noexcept { return required_; }

private:
    double required_;
};

struct IncompatibleFamily : Error {
    explicit IncompatibleFamily(const std::string& what) : Error("incompatible-family", what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error("parse-error", what) {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

} // namespace rankcsp
