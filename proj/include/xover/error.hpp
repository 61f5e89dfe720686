#pragma once

#include <stdexcept>
#include <string>

namespace xover {

// Bad user input: malformed files, schema violations, out-of-range arguments.
// The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that could not be carried out on otherwise well-formed input.
// The CLI maps these to exit code 2.
class ComputationError : public std::runtime_error {
public:
    explicit ComputationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model fit failures (e.g. treatment effect confounded with nuisance effects).
class EstimationError : public ComputationError {
public:
    explicit EstimationError(const std::string& msg) : ComputationError(msg) {}
};

}  // namespace xover
