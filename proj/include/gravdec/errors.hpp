// errors.hpp — exception types shared across the library

#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gravdec {

// Parameter/config validation failure; carries every violated field at once.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "validation failed:";
        for (const auto& s : v) out += " [" + s + "]";
        return out;
    }
    std::vector<std::string> violations_;
};

// Quadrature/integrator failure; carries the residual error estimate.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual estimate " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_ = 0.0;
};

// Requested representation exceeds a dense-storage or mode guard.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation invoked outside its declared regime (failed commutation check, basis mismatch).
class RegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gravdec
