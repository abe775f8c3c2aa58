// Error taxonomy shared by the library and the CLI exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace gaugetherm {

// Malformed or contradictory input (config schema, bad dimensions, invalid
// parameters). CLI exit code 1.
class SchemaError : public std::invalid_argument {
public:
    explicit SchemaError(const std::string& msg, std::string path = {})
        : std::invalid_argument(msg), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Numerical breakdown during integration or a solve (trace drift, positivity
// loss, missing null space). CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A redundant internal identity failed beyond tolerance, e.g. generator
// invariance under a gauge or the two routes to the transformed current.
// CLI exit code 3.
class CrossCheckError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gaugetherm
