#include <doctest.h>

#include "gaugetherm/errors.hpp"
#include "gaugetherm/expression.hpp"

using namespace gaugetherm;

TEST_CASE("expression evaluation") {
    CHECK(eval_expression("2", 0.0).real() == doctest::Approx(2.0));
    CHECK(eval_expression("t", 1.5).real() == doctest::Approx(1.5));
    CHECK(eval_expression("1 + 2*3", 0.0).real() == doctest::Approx(7.0));
    CHECK(eval_expression("(1 + 2)*3", 0.0).real() == doctest::Approx(9.0));
    CHECK(eval_expression("2^3^1", 0.0).real() == doctest::Approx(8.0));
    CHECK(eval_expression("-2^2", 0.0).real() == doctest::Approx(-4.0));
    CHECK(eval_expression("sin(pi/2)", 0.0).real() == doctest::Approx(1.0));
    CHECK(eval_expression("cos(0)", 0.0).real() == doctest::Approx(1.0));
    CHECK(eval_expression("sqrt(4)", 0.0).real() == doctest::Approx(2.0));
    CHECK(eval_expression("exp(1)", 0.0).real() == doctest::Approx(M_E));
    CHECK(eval_expression("1e-3", 0.0).real() == doctest::Approx(1e-3));

    const Complex rotating = eval_expression("exp(i*t)", M_PI / 2.0);
    CHECK(rotating.real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rotating.imag() == doctest::Approx(1.0));

    const Complex scaled = eval_expression("i*sin(t)", 0.7);
    CHECK(scaled.real() == doctest::Approx(0.0));
    CHECK(scaled.imag() == doctest::Approx(std::sin(0.7)));
}

TEST_CASE("expression derivatives fall back to central differences") {
    const ScalarFn f = parse_scalar_expression("sin(2*t)");
    CHECK(f.derivative(0.4).real() == doctest::Approx(2.0 * std::cos(0.8)).epsilon(1e-8));
}

TEST_CASE("malformed expressions are rejected with a position") {
    CHECK_THROWS_AS(parse_scalar_expression("2 +"), SchemaError);
    CHECK_THROWS_AS(parse_scalar_expression("sin(t"), SchemaError);
    CHECK_THROWS_AS(parse_scalar_expression("bogus(t)"), SchemaError);
    CHECK_THROWS_AS(parse_scalar_expression("2 * * 3"), SchemaError);
    CHECK_THROWS_AS(parse_scalar_expression("x"), SchemaError);
    CHECK_THROWS_AS(parse_scalar_expression("1 2"), SchemaError);
}
