// Scalar time-function grammar for declarative configs: complex constants,
// the variable t, exp/sin/cos/sqrt, powers and products. Example:
// "0.5*exp(i*0.3*t) + 2^t".

#pragma once

#include <string>

#include "gaugetherm/operators.hpp"

namespace gaugetherm {

// Parses into a callable of t; throws SchemaError with the offending
// position on malformed input. Derivatives fall back to central differences.
ScalarFn parse_scalar_expression(const std::string& source);

// One-off evaluation, mostly for tests and config validation.
Complex eval_expression(const std::string& source, double t);

}  // namespace gaugetherm
