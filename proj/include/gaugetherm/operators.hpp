// Time-dependent operators: a value closure plus an optional analytic
// derivative. Callers never observe whether the derivative is analytic or
// the central-difference fallback.

#pragma once

#include <functional>
#include <string>

#include "gaugetherm/matrix_ops.hpp"

namespace gaugetherm {

// Step for central differences of user closures: h = 1e-6 * max(1, |t|).
double derivative_step(double t);

class Operator {
public:
    using ValueFn = std::function<CMatrix(double)>;

    Operator() = default;
    Operator(std::string label, Eigen::Index dim, ValueFn value,
             ValueFn analytic_derivative = {});

    static Operator constant(std::string label, const CMatrix& matrix);

    const std::string& label() const noexcept { return label_; }
    Eigen::Index dim() const noexcept { return dim_; }

    CMatrix operator()(double t) const { return value_(t); }
    CMatrix value(double t) const { return value_(t); }

    // Analytic derivative when registered, else central difference.
    CMatrix derivative(double t) const;

    bool has_analytic_derivative() const noexcept {
        return static_cast<bool>(derivative_);
    }
    bool valid() const noexcept { return static_cast<bool>(value_); }

private:
    std::string label_;
    Eigen::Index dim_ = 0;
    ValueFn value_;
    ValueFn derivative_;
};

// Convenience scalar-valued time functions with the same fallback policy.
class ScalarFn {
public:
    using Fn = std::function<Complex(double)>;

    ScalarFn() = default;
    ScalarFn(Fn value, Fn derivative = {})
        : value_(std::move(value)), derivative_(std::move(derivative)) {}

    static ScalarFn constant(Complex c) {
        return ScalarFn([c](double) { return c; }, [](double) { return Complex{0.0, 0.0}; });
    }

    Complex operator()(double t) const { return value_(t); }
    Complex derivative(double t) const;
    bool valid() const noexcept { return static_cast<bool>(value_); }
    bool has_analytic_derivative() const noexcept {
        return static_cast<bool>(derivative_);
    }

private:
    Fn value_;
    Fn derivative_;
};

}  // namespace gaugetherm
