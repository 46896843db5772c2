#pragma once

#include <stdexcept>
#include <string>

namespace riskshare {

// Invalid parameters, malformed configs, inadmissible family arguments.
// CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures of the numeric machinery (lost brackets, tolerance not reached).
// CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Derivative requested at an endpoint where it is unbounded (e.g. Prelec
// alpha<1 at p=0 or p=1).  Callers doing quadrature must use open nodes.
class EndpointSingularity : public NumericError {
public:
    explicit EndpointSingularity(const std::string& msg) : NumericError(msg) {}
};

// Tangent-point bracketing failed in a way the shape dispatch cannot explain.
class EnvelopeError : public NumericError {
public:
    explicit EnvelopeError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace riskshare
