// Pointwise thermodynamic functionals: currents, power, gauge-induced
// terms, invariance-condition reports and detailed-balance verification.

#pragma once

#include <optional>

#include "gaugetherm/gauge.hpp"

namespace gaugetherm {

// All quantities refer to the transformed presentation of a GaugedModel
// (the identity gauge reproduces the base quantities).
struct ThermoSample {
    double t = 0.0;
    double energy = 0.0;         // <H'>
    double total_current = 0.0;  // J'
    std::vector<double> channel_currents;
    std::vector<std::pair<std::string, double>> reservoir_currents;
    double power = 0.0;          // P'
    double j_delta_h = 0.0;      // Tr[dH D(rho)] on the base model
    double c_delta_h = 0.0;      // Tr[dH U(rho)] = i<[H, dH]>
    double power_delta_h = 0.0;  // <d dH/dt>
    // |d<H'>/dt - (J'+P')| from a finite difference along the trajectory;
    // NaN for isolated samples.
    double first_law_residual = std::numeric_limits<double>::quiet_NaN();
};

// Alicki total current J = Tr(H D(rho)).
double total_current(const MasterEquationModel& model, double t, const CMatrix& rho);

// Current carried by channel mu: -g_mu Re<L_mu^dag [L_mu, H]>.
double channel_current(const MasterEquationModel& model, Eigen::Index mu, double t,
                       const CMatrix& rho);

// Lindblad power P = <dH/dt>.
double power(const MasterEquationModel& model, double t, const CMatrix& rho);

struct GaugeTerms {
    double j_delta_h = 0.0;
    double c_delta_h = 0.0;
    double power_delta_h = 0.0;
};

// The three gauge-induced contributions, evaluated on the base model.
// Checks Tr(dH d rho/dt) = j_delta_h + c_delta_h internally.
GaugeTerms gauge_terms(const MasterEquationModel& model, const GaugeSpec& gauge,
                       double t, const CMatrix& rho);

// Full sample with the two-route cross-check: transformed quantities are
// computed directly on the transformed model and via the gauge identities
// J' = J + J_dH + C_dH, P' = P + <d dH/dt>; a discrepancy above 1e-9 throws.
ThermoSample thermo_sample(const GaugedModel& gm, double t, const CMatrix& rho,
                           std::optional<double> denergy_dt = std::nullopt);

struct InvarianceReport {
    double t = 0.0;
    double dphi_dt = 0.0;
    bool phi_constrained = false;  // true when a candidate gauge was supplied
    std::vector<Complex> mean_l;
    std::vector<Complex> mean_dl;
    double tol = 1e-9;
    bool invariant = false;
};

// Evaluates the gauge-independence conditions d phi/dt = <L_mu> = <dL_mu/dt> = 0.
InvarianceReport invariance_report(const MasterEquationModel& model, double t,
                                   const CMatrix& rho, double tol = 1e-9,
                                   const GaugeSpec* candidate = nullptr);

struct QdbcReport {
    double commutes_a = 0.0;                  // ||[H_S, H]||_F
    std::vector<double> eigenoperator_b;      // per-channel eigenoperator residual
    std::vector<double> pairing_c;            // ||A_{mu+n} - e^{-beta w/2} A_mu^dag||_F
    double gibbs_fixed_point_residual = 0.0;  // ||L(rho_Gibbs)||_F
    std::vector<Complex> mean_a_at_gibbs;
};

// Detailed-balance check for an autonomous model with channels ordered as
// n lowering operators followed by their n conjugate partners; omegas are
// the n positive Bohr frequencies. The eigenoperator residual uses
// [H_S, A_mu] = -w_mu A_mu for the first block and +w_mu for the partners.
QdbcReport qdbc_check(const MasterEquationModel& model, const Operator& h_s,
                      double beta, const std::vector<double>& omegas);

}  // namespace gaugetherm
