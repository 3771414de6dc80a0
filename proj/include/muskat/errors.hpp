#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace muskat {

// Base class for everything thrown by the library. Subclasses distinguish
// user-input problems (ConfigError, exit code 1 in the CLI) from numerical
// failures (ConvergenceError, StiffnessError, exit code 2).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or malformed input data. Carries the full list of
// violations so a user can fix everything in one pass.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
    ConfigError(const std::string& msg, std::vector<std::string> violations)
        : Error(msg + " [" + std::to_string(violations.size()) + " violation(s)]"),
          violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Geometric preconditions broken: interface touching a boundary, non-graph
// strip, empty separation.
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

// An iterative or series computation failed to converge. Carries the history
// (series term norms, or Krylov residuals) for diagnosis.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> history)
        : Error(msg), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

// Time step incompatible with the stiffness of the retained modes.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& msg, double suggested_dt)
        : Error(msg), suggested_dt_(suggested_dt) {}
    double suggested_dt() const { return suggested_dt_; }

private:
    double suggested_dt_ = 0.0;
};

// Filesystem / serialization failures.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace muskat
