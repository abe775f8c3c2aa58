#include "gaugetherm/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace gaugetherm {

double derivative_step(double t) { return 1e-6 * std::max(1.0, std::abs(t)); }

Operator::Operator(std::string label, Eigen::Index dim, ValueFn value,
                   ValueFn analytic_derivative)
    : label_(std::move(label)),
      dim_(dim),
      value_(std::move(value)),
      derivative_(std::move(analytic_derivative)) {
    if (dim_ < 1) {
        throw std::invalid_argument("Operator: dim must be >= 1");
    }
    if (!value_) {
        throw std::invalid_argument("Operator: missing value function");
    }
}

Operator Operator::constant(std::string label, const CMatrix& matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) {
        throw std::invalid_argument("Operator::constant: matrix must be square");
    }
    const Eigen::Index d = matrix.rows();
    const CMatrix zero = CMatrix::Zero(d, d);
    return Operator(std::move(label), d,
                    [matrix](double) { return matrix; },
                    [zero](double) { return zero; });
}

CMatrix Operator::derivative(double t) const {
    if (derivative_) return derivative_(t);
    const double h = derivative_step(t);
    return (value_(t + h) - value_(t - h)) / (2.0 * h);
}

Complex ScalarFn::derivative(double t) const {
    if (derivative_) return derivative_(t);
    const double h = derivative_step(t);
    return (value_(t + h) - value_(t - h)) / (2.0 * h);
}

}  // namespace gaugetherm
