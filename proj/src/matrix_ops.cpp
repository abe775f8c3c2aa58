#include "gaugetherm/matrix_ops.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

double frobenius_norm(const CMatrix& a) { return a.norm(); }

bool is_hermitian(const CMatrix& a, double tol) {
    return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

CMatrix hermitize(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw std::invalid_argument("commutator: dimension mismatch");
    }
    return a * b - b * a;
}

CMatrix anticommutator(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw std::invalid_argument("anticommutator: dimension mismatch");
    }
    return a * b + b * a;
}

Complex expectation(const CMatrix& a, const CMatrix& rho) {
    if (a.rows() != rho.rows() || a.cols() != rho.cols()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    return (a * rho).trace();
}

double real_expectation(const CMatrix& a, const CMatrix& rho, double tol) {
    const Complex v = expectation(a, rho);
    if (std::abs(v.imag()) > tol * std::max(1.0, std::abs(v))) {
        throw CrossCheckError("real_expectation: imaginary part " +
                              std::to_string(v.imag()) + " exceeds tolerance");
    }
    return v.real();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CVector stack_columns(const CMatrix& m) {
    return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unstack_columns(const CVector& v, Eigen::Index dim) {
    if (v.size() != dim * dim) {
        throw std::invalid_argument("unstack_columns: size mismatch");
    }
    return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

HermitianEig eig_hermitian(const CMatrix& a) {
    if (!is_hermitian(a)) {
        throw std::invalid_argument("eig_hermitian: input is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(a));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eig_hermitian: decomposition failed");
    }
    return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix matrix_function(const CMatrix& a, const std::function<double(double)>& f,
                        double clamp) {
    const HermitianEig eig = eig_hermitian(a);
    Eigen::VectorXd mapped(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < mapped.size(); ++i) {
        mapped(i) = f(std::max(eig.eigenvalues(i), clamp));
    }
    return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

CMatrix matrix_log(const CMatrix& a, double clamp) {
    return matrix_function(a, [](double x) { return std::log(x); }, clamp);
}

CMatrix matrix_exp_hermitian(const CMatrix& a) {
    return matrix_function(a, [](double x) { return std::exp(x); });
}

}  // namespace gaugetherm
