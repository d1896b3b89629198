#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pathatlas {

/// Evaluation point, interval, or image outside the admissible set.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what, std::optional<double> time = std::nullopt)
        : std::runtime_error(what), time_(time) {}

    /// First parameter time at which the violation was detected, when known.
    std::optional<double> time() const { return time_; }

private:
    std::optional<double> time_;
};

/// A path (or a sample of one) is not covered by the chosen charts.
class CoverError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Requested derivative order exceeds what the curve carries.
class OrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Incompatible vector or matrix shapes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A certified approximation would need more work than the configured budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required certificate (monotonicity, margin positivity) is missing or false.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pathatlas
