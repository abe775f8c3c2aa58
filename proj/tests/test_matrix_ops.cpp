#include <doctest.h>

#include "gaugetherm/models.hpp"
#include "test_support.hpp"

using namespace gaugetherm;

TEST_CASE("commutator basics") {
    const CMatrix sz = pauli_z();
    CHECK(commutator(sz, sz).norm() == doctest::Approx(0.0));

    // [sx, sy] = 2i sz by direct 2x2 multiplication
    const CMatrix lhs = commutator(pauli_x(), pauli_y());
    CHECK((lhs - 2.0 * kImag * pauli_z()).norm() < 1e-14);

    auto rng = testing::make_rng(11);
    const CMatrix a = testing::random_matrix(rng, 4);
    CHECK(commutator(CMatrix::Identity(4, 4), a).norm() < 1e-14);

    CHECK_THROWS_AS(commutator(pauli_x(), CMatrix::Identity(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("anticommutator basics") {
    CHECK((anticommutator(pauli_x(), pauli_x()) - 2.0 * CMatrix::Identity(2, 2)).norm() <
          1e-14);
    auto rng = testing::make_rng(12);
    const CMatrix a = testing::random_matrix(rng, 3);
    CHECK(anticommutator(a, CMatrix::Zero(3, 3)).norm() == doctest::Approx(0.0));
    CHECK(anticommutator(pauli_x(), pauli_y()).norm() < 1e-14);
}

TEST_CASE("expectation values") {
    auto rng = testing::make_rng(13);
    const CMatrix rho = testing::random_density(rng, 4);
    CHECK(expectation(CMatrix::Identity(4, 4), rho).real() == doctest::Approx(1.0));

    const double p = 0.8;
    CMatrix qubit = CMatrix::Zero(2, 2);
    qubit(0, 0) = p;
    qubit(1, 1) = 1.0 - p;
    CHECK(expectation(pauli_z(), qubit).real() == doctest::Approx(2.0 * p - 1.0));
    CHECK(std::abs(expectation(pauli_z(), 0.5 * CMatrix::Identity(2, 2))) < 1e-14);
}

TEST_CASE("expectation is linear in the observable") {
    auto rng = testing::make_rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 2 + trial % 4;
        const CMatrix a = testing::random_matrix(rng, d);
        const CMatrix b = testing::random_matrix(rng, d);
        const CMatrix rho = testing::random_density(rng, d);
        const Complex alpha{0.7, -1.3};
        const Complex lhs = expectation(alpha * a + b, rho);
        const Complex rhs = alpha * expectation(a, rho) + expectation(b, rho);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("trace of a commutator vanishes") {
    auto rng = testing::make_rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index d = 2 + trial % 7;
        const CMatrix a = testing::random_matrix(rng, d);
        const CMatrix b = testing::random_matrix(rng, d);
        const CMatrix c = commutator(a, b);
        CHECK(std::abs(c.trace()) <= 1e-12 * std::max(1.0, c.norm()));
    }
}

TEST_CASE("adjoint of a product reverses order") {
    auto rng = testing::make_rng(16);
    const CMatrix a = testing::random_matrix(rng, 5);
    const CMatrix b = testing::random_matrix(rng, 5);
    CHECK(((a * b).adjoint() - b.adjoint() * a.adjoint()).norm() < 1e-14);
}

TEST_CASE("hermitian eigendecomposition") {
    CMatrix d2 = CMatrix::Zero(2, 2);
    d2(0, 0) = 1.0;
    d2(1, 1) = 2.0;
    const HermitianEig eig = eig_hermitian(d2);
    CHECK(eig.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(eig.eigenvalues(1) == doctest::Approx(2.0));

    const HermitianEig sx = eig_hermitian(pauli_x());
    CHECK(sx.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(sx.eigenvalues(1) == doctest::Approx(1.0));

    auto rng = testing::make_rng(17);
    const CMatrix a = testing::random_hermitian(rng, 5);
    const HermitianEig ea = eig_hermitian(a);
    // reconstruction and unitarity
    const CMatrix rebuilt =
        ea.eigenvectors * ea.eigenvalues.asDiagonal() * ea.eigenvectors.adjoint();
    CHECK((rebuilt - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
    CHECK((ea.eigenvectors.adjoint() * ea.eigenvectors - CMatrix::Identity(5, 5)).norm() <
          1e-10);

    // shift property: A + cI shares eigenvectors, eigenvalues shift by c
    const HermitianEig shifted = eig_hermitian(a + 3.0 * CMatrix::Identity(5, 5));
    for (Eigen::Index i = 0; i < 5; ++i) {
        CHECK(shifted.eigenvalues(i) == doctest::Approx(ea.eigenvalues(i) + 3.0));
    }

    CHECK_THROWS_AS(eig_hermitian(testing::random_matrix(rng, 3)), std::invalid_argument);
}

TEST_CASE("matrix functions") {
    CHECK((matrix_exp_hermitian(CMatrix::Zero(3, 3)) - CMatrix::Identity(3, 3)).norm() <
          1e-14);

    CMatrix diag = CMatrix::Zero(2, 2);
    diag(0, 0) = M_E;
    diag(1, 1) = M_E * M_E;
    const CMatrix log_diag = matrix_log(diag);
    CHECK(log_diag(0, 0).real() == doctest::Approx(1.0));
    CHECK(log_diag(1, 1).real() == doctest::Approx(2.0));

    // pure state: clamped log keeps -Tr(rho ln rho) at zero
    CMatrix pure = CMatrix::Zero(2, 2);
    pure(0, 0) = 1.0;
    const double s = -expectation(matrix_log(pure), pure).real();
    CHECK(std::abs(s) <= 1e-12);
}

TEST_CASE("exp(log(rho)) recovers full-rank states") {
    auto rng = testing::make_rng(18);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix rho = testing::random_density(rng, 4);
        const CMatrix back = matrix_exp_hermitian(matrix_log(rho));
        CHECK((back - rho).norm() < 1e-8);
    }
}

TEST_CASE("column stacking conventions") {
    auto rng = testing::make_rng(19);
    const CMatrix a = testing::random_matrix(rng, 3);
    const CMatrix b = testing::random_matrix(rng, 3);
    const CMatrix x = testing::random_matrix(rng, 3);
    const CVector lhs = stack_columns(a * x * b);
    const CVector rhs = kron(b.transpose(), a) * stack_columns(x);
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK((unstack_columns(stack_columns(x), 3) - x).norm() == doctest::Approx(0.0));
}
