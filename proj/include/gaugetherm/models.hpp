// Curated model constructors and closed-form oracles: the pure decoherence
// qubit, the three-level maser engine, the resonance-fluorescence
// presentation pair and a detailed-balance two-level decay model.

#pragma once

#include "gaugetherm/integrator.hpp"

namespace gaugetherm {

// Operator builtins shared with the CLI's inline model grammar.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix pauli_plus();   // |0><1|, raises toward the sigma_z = +1 state
CMatrix pauli_minus();  // |1><0|
CMatrix projector(Eigen::Index dim, Eigen::Index m, Eigen::Index n);  // |m><n|
CMatrix ladder_down(Eigen::Index dim);  // truncated oscillator a
CMatrix ladder_up(Eigen::Index dim);    // a^dag
CMatrix number_operator(Eigen::Index dim);

// ---------------------------------------------------------------------------
// Pure decoherence qubit: H = (omega/2) sigma_z, L = sqrt(|Gamma(t)|) sigma_z,
// signature g = sign(Gamma(t)). Populations are frozen; the coherence decays
// through D(t) = exp(-2 int_0^t Gamma), the factor fixed by the dissipator
// of this Lindblad normalization.
// ---------------------------------------------------------------------------

struct PdmParams {
    double omega = 1.0;
    std::function<double(double)> gamma;  // decay rate Gamma(t), may change sign
    double p = 0.5;                       // initial rho_00
    Complex rho01{0.0, 0.0};              // initial coherence

    void validate() const;  // |rho01|^2 <= p(1-p) + 1e-12 and 0 <= p <= 1
};

MasterEquationModel build_pdm(const PdmParams& params);

CMatrix pdm_initial_state(const PdmParams& params);
CMatrix pdm_fixed_point(const PdmParams& params);  // diag(p, 1-p)

// exp(-2 int_0^t Gamma(s) ds) by composite Simpson.
double pdm_decoherence(const PdmParams& params, double t);

CMatrix pdm_analytic_state(const PdmParams& params, double t);

struct PdmEntropyProduction {
    double sigma = 0.0;
    double ep_rate = 0.0;
};

// Sigma = H[R(t)] - H[R(0)] and its rate, R = sqrt((p-1/2)^2 + |rho01 D|^2).
PdmEntropyProduction pdm_ep_closed_form(const PdmParams& params, double t);

double binary_entropy(double x);  // H(x) on [0, 1/2]

// ---------------------------------------------------------------------------
// Three-level maser: H = H0 + V(t) with a resonant drive between the two
// lowest levels and two thermal reservoirs (channels ordered hot-up,
// hot-down, cold-up, cold-down). hbar = 1 and zero detuning throughout.
// ---------------------------------------------------------------------------

struct MaserParams {
    double omega1 = 0.0, omega2 = 1.0, omega3 = 3.0;
    double epsilon = 0.5;
    double gamma_rate = 1.0;  // common rate of both reservoirs
    double beta_h = 0.0, beta_c = 0.0;

    static MaserParams from_occupations(double omega1, double omega2, double omega3,
                                        double epsilon, double gamma_rate, double nbar_h,
                                        double nbar_c);

    double omega() const { return omega2 - omega1; }
    double omega_h() const { return omega3 - omega1; }
    double omega_c() const { return omega3 - omega2; }
    double nbar_h() const { return 1.0 / std::expm1(beta_h * omega_h()); }
    double nbar_c() const { return 1.0 / std::expm1(beta_c * omega_c()); }
    double period() const { return 2.0 * M_PI / omega(); }

    void validate() const;  // engine regime: nbar_h > nbar_c > 0, frequencies ordered
};

MasterEquationModel build_maser(const MaserParams& params);

// Autonomous co-rotating presentation (drive made static); the fixed point
// of this model is the limit cycle of the lab-frame model.
MasterEquationModel build_maser_rotating(const MaserParams& params);

struct MaserLimitCycle {
    double rho11 = 0.0, rho22 = 0.0, rho33 = 0.0;
    Complex rho12{0.0, 0.0};  // co-rotating coherence, purely imaginary at zero detuning

    CMatrix rotating_state() const;
    CMatrix lab_state(double omega, double t) const;  // rho_12(t) = rho12 e^{i omega t}
};

MaserLimitCycle maser_steady_state(const MaserParams& params);

struct MaserThermo {
    double j_hot = 0.0;   // >= 0
    double j_cold = 0.0;  // <= 0
    double work_cycle = 0.0;  // <= 0, performed by the system
    double eta = 0.0;         // 1 - omega_c/omega_h
};

MaserThermo maser_thermo(const MaserParams& params);

enum class MaserGaugeKind {
    shifting,  // gamma_{h,1} = gamma_{c,1}^* = C e^{+i omega t/2}: moves heat between baths
    neutral,   // gamma_{h,1} = gamma_{c,1}^* = C e^{-i omega t}: zero net heat over a period
};

GaugeSpec maser_gauge_family(MaserGaugeKind kind, const MaserParams& params, Complex c);

// Predicted pointwise change of the hot current under the shifting family:
// -(Gamma/2) sqrt(nbar_c nbar_h) Re(C^2) Im(rho12); for real C this is the
// |C|^2 form.
double maser_shifting_current_shift(const MaserParams& params, Complex c);

// ---------------------------------------------------------------------------
// Resonance fluorescence: the same evolution presented with a driven
// Hamiltonian or with displaced Lindblad operators, plus the witness gauge
// mapping one presentation to the other.
// ---------------------------------------------------------------------------

struct ResonanceFluorescencePair {
    MasterEquationModel driven;     // H = w0 sz/2 + V(t), thermal sigma_+/- channels
    MasterEquationModel displaced;  // H = w0 sz/2, L'' = lambda sigma -_+ displaced
    GaugeSpec witness;              // apply_gauge(driven, witness) == displaced
};

ResonanceFluorescencePair resonance_fluorescence_pair(double omega0, double omega,
                                                      double rabi, double gamma_rate,
                                                      double nbar);

// ---------------------------------------------------------------------------
// Two-level decay satisfying the detailed-balance conditions exactly:
// A_1 = sqrt(Gamma) sigma_-, A_2 = e^{-beta omega0/2} A_1^dag.
// ---------------------------------------------------------------------------

struct QdbcDecayModel {
    MasterEquationModel model;
    Operator h_s;
    std::vector<double> omegas;  // the single Bohr frequency {omega0}
};

QdbcDecayModel build_qdbc_decay(double omega0, double beta, double gamma_rate);

}  // namespace gaugetherm
