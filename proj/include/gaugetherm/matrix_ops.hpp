// Dense complex operator algebra on small Hilbert spaces: commutators,
// traces, Hermitian eigen-decompositions and spectral matrix functions.

#pragma once

#include <complex>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace gaugetherm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kImag{0.0, 1.0};

// Eigenvalue floor used when taking ln of a density matrix; keeps the
// x ln x -> 0 limit continuous instead of special-casing rank deficiency.
inline constexpr double kLogClamp = 1e-14;

double frobenius_norm(const CMatrix& a);

// ||A - A^dag||_F <= tol * max(1, ||A||_F)
bool is_hermitian(const CMatrix& a, double tol = 1e-10);

CMatrix hermitize(const CMatrix& a);

CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

// Tr(A rho)
Complex expectation(const CMatrix& a, const CMatrix& rho);

// Expectation that must come out real; throws CrossCheckError if the
// imaginary part exceeds tol * max(1, |value|).
double real_expectation(const CMatrix& a, const CMatrix& rho, double tol = 1e-10);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Column-stacking conventions: stack(rho) lists rho column by column, so
// stack(A rho B) = (B^T kron A) stack(rho).
CVector stack_columns(const CMatrix& m);
CMatrix unstack_columns(const CVector& v, Eigen::Index dim);

struct HermitianEig {
    Eigen::VectorXd eigenvalues;  // ascending
    CMatrix eigenvectors;         // columns, unitary
};

// Throws std::invalid_argument on non-Hermitian input.
HermitianEig eig_hermitian(const CMatrix& a);

// V diag(f(max(lambda_i, clamp))) V^dag for Hermitian A.
CMatrix matrix_function(const CMatrix& a, const std::function<double(double)>& f,
                        double clamp = -std::numeric_limits<double>::infinity());

CMatrix matrix_log(const CMatrix& a, double clamp = kLogClamp);
CMatrix matrix_exp_hermitian(const CMatrix& a);

}  // namespace gaugetherm
