#include "gaugetherm/entropy.hpp"

#include <cmath>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

double von_neumann_entropy(const CMatrix& rho) {
    const HermitianEig eig = eig_hermitian(rho);
    double s = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        const double lam = std::max(eig.eigenvalues(i), kLogClamp);
        s -= lam * std::log(lam);
    }
    return s;
}

double entropy_rate(const MasterEquationModel& model, double t, const CMatrix& rho) {
    const HermitianEig eig = eig_hermitian(rho);
    if (eig.eigenvalues.minCoeff() < 1e-12) {
        throw NumericalError("entropy_rate: rho is rank deficient beyond the clamp");
    }
    const CMatrix log_rho = matrix_log(rho);
    const GeneratorSnapshot snap = model.snapshot(t);
    const double rate = -real_expectation(log_rho, liouvillian(snap, rho), 1e-9);

    // Redundant route through the channel sum.
    double by_channels = 0.0;
    for (std::size_t mu = 0; mu < snap.lindblads.size(); ++mu) {
        const CMatrix& l = snap.lindblads[mu];
        by_channels += snap.signs[mu] *
                       expectation(l.adjoint() * commutator(l, log_rho), rho).real();
    }
    if (std::abs(rate - by_channels) > 1e-9 * std::max(1.0, std::abs(rate))) {
        throw CrossCheckError("entropy_rate: trace form vs channel form mismatch");
    }
    return rate;
}

double relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    }
    const HermitianEig eig_rho = eig_hermitian(rho);
    const HermitianEig eig_sigma = eig_hermitian(sigma);

    // Support condition: rho may not weigh directions where sigma vanishes.
    for (Eigen::Index j = 0; j < eig_sigma.eigenvalues.size(); ++j) {
        if (eig_sigma.eigenvalues(j) >= kLogClamp) continue;
        const CVector v = eig_sigma.eigenvectors.col(j);
        const double weight = std::real((v.adjoint() * rho * v)(0, 0));
        if (weight > 1e-10) {
            throw NumericalError("relative_entropy: support violation, rho weight " +
                                 std::to_string(weight) + " on null direction of sigma");
        }
    }

    double tr_rho_log_rho = 0.0;
    for (Eigen::Index i = 0; i < eig_rho.eigenvalues.size(); ++i) {
        const double lam = std::max(eig_rho.eigenvalues(i), kLogClamp);
        tr_rho_log_rho += lam * std::log(lam);
    }
    double tr_rho_log_sigma = 0.0;
    for (Eigen::Index j = 0; j < eig_sigma.eigenvalues.size(); ++j) {
        const double lam = std::max(eig_sigma.eigenvalues(j), kLogClamp);
        const CVector v = eig_sigma.eigenvectors.col(j);
        tr_rho_log_sigma += std::log(lam) * std::real((v.adjoint() * rho * v)(0, 0));
    }
    return tr_rho_log_rho - tr_rho_log_sigma;
}

double ep_sigma(const CMatrix& rho0, const CMatrix& rho_t, const CMatrix& rho_star) {
    return relative_entropy(rho0, rho_star) - relative_entropy(rho_t, rho_star);
}

double ep_rate(const MasterEquationModel& model, double t, const CMatrix& rho,
               const CMatrix& rho_star) {
    // d/dt Tr(rho ln rho_star) = Tr(L(rho) ln rho_star): rho_star is constant.
    const CMatrix log_star = matrix_log(rho_star);
    const double flux = real_expectation(log_star, liouvillian(model, t, rho), 1e-9);
    return entropy_rate(model, t, rho) + flux;
}

double thermal_ep_rate(const GaugedModel& gm, double t, const CMatrix& rho, double beta) {
    if (beta <= 0.0) {
        throw std::invalid_argument("thermal_ep_rate: beta must be positive");
    }
    const double ds = entropy_rate(gm.base, t, rho);
    const double value = ds - beta * total_current(gm.transformed, t, rho);

    // Gauge rule E~' = E~ - beta (J_dH + C_dH).
    const GaugeTerms terms = gauge_terms(gm.base, gm.gauge, t, rho);
    const double base_rate = ds - beta * total_current(gm.base, t, rho);
    const double via_rule = base_rate - beta * (terms.j_delta_h + terms.c_delta_h);
    if (std::abs(value - via_rule) > 1e-9 * std::max(1.0, std::abs(value))) {
        throw CrossCheckError("thermal_ep_rate: gauge rule violated");
    }
    return value;
}

}  // namespace gaugetherm
