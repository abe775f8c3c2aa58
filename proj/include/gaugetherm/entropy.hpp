// Von Neumann entropy, entropy rate, relative entropy and the entropy
// production measures: the fixed-point form Sigma with rate E and the
// thermal-coupling rate E~ = dS/dt - beta J with its gauge rule.

#pragma once

#include "gaugetherm/thermo.hpp"

namespace gaugetherm {

struct EpSample {
    double t = 0.0;
    double entropy = 0.0;
    double entropy_rate = 0.0;
    // NaN when the ingredient (fixed point, beta) was not supplied.
    double sigma = std::numeric_limits<double>::quiet_NaN();
    double ep_rate = std::numeric_limits<double>::quiet_NaN();
    double thermal_ep_rate = std::numeric_limits<double>::quiet_NaN();
};

// -<ln rho> with the spectral clamp; >= 0.
double von_neumann_entropy(const CMatrix& rho);

// dS/dt = -Tr(ln rho L(rho)); cross-checked against
// g_mu Re<L_mu^dag [L_mu, ln rho]> to 1e-9. Throws on rank-deficient rho.
double entropy_rate(const MasterEquationModel& model, double t, const CMatrix& rho);

// Tr rho (ln rho - ln sigma); throws when rho has weight above 1e-10 on the
// clamped null space of sigma.
double relative_entropy(const CMatrix& rho, const CMatrix& sigma);

// Sigma = S(rho_0|rho_star) - S(rho_t|rho_star); nonnegative up to clamp noise.
double ep_sigma(const CMatrix& rho0, const CMatrix& rho_t, const CMatrix& rho_star);

// E = dS/dt + Tr(L(rho) ln rho_star); exact in rho_star (no finite differences).
double ep_rate(const MasterEquationModel& model, double t, const CMatrix& rho,
               const CMatrix& rho_star);

// E~' = dS/dt - beta J' on the transformed presentation; the gauge rule
// E~' = E~ - beta (J_dH + C_dH) is verified internally to 1e-9.
double thermal_ep_rate(const GaugedModel& gm, double t, const CMatrix& rho, double beta);

}  // namespace gaugetherm
