// Gauge transformations of the master equation. The canonical convention
// used throughout this project is
//
//   L'_mu = U_{mu nu} L_nu - gamma_mu,
//   dH    = (g_mu / 2i) ( gamma_mu (U L)_mu^dag - gamma_mu^* (U L)_mu ) + phi I,
//   H'    = H + dH,
//
// with U pseudo-unitary with respect to the signature, U^dag g U = g.
// The generator of the master equation is invariant under every such
// transformation; thermodynamic functionals are not.

#pragma once

#include <optional>

#include "gaugetherm/master_equation.hpp"

namespace gaugetherm {

class GaugeSpec {
public:
    GaugeSpec() = default;
    GaugeSpec(Eigen::Index channel_count, std::vector<ScalarFn> gamma,
              Operator umatrix, ScalarFn phi, std::string label = {});

    static GaugeSpec identity(Eigen::Index channel_count);

    Eigen::Index channel_count() const noexcept { return m_; }
    const std::string& label() const noexcept { return label_; }

    Complex gamma(Eigen::Index mu, double t) const;
    Complex gamma_derivative(Eigen::Index mu, double t) const;
    CMatrix umatrix(double t) const;
    CMatrix umatrix_derivative(double t) const;
    double phi(double t) const;
    double phi_derivative(double t) const;

    bool is_identity_tag() const noexcept { return identity_tag_; }

private:
    Eigen::Index m_ = 0;
    std::vector<ScalarFn> gamma_;
    Operator umatrix_;  // M x M, pseudo-unitary w.r.t. the model signature
    ScalarFn phi_;
    std::string label_;
    bool identity_tag_ = false;
};

// ||U(t)^dag g U(t) - g||_F
double pseudo_unitarity_residual(const GaugeSpec& gauge, const Signature& signature,
                                 double t);

// Samples pseudo-unitarity pointwise; throws SchemaError above tol.
void validate_gauge(const GaugeSpec& gauge, const Signature& signature,
                    const std::vector<double>& sample_times, double tol = 1e-10);

// The Hermitian Hamiltonian shift induced by the gauge (phi included).
CMatrix delta_H(const GaugeSpec& gauge, const MasterEquationModel& model, double t);

// d(dH)/dt by the product rule over gamma, U, L and phi.
CMatrix delta_H_derivative(const GaugeSpec& gauge, const MasterEquationModel& model,
                           double t);

struct GaugedModel {
    MasterEquationModel base;
    GaugeSpec gauge;
    MasterEquationModel transformed;
};

struct ApplyGaugeOptions {
    std::vector<double> sample_times = {0.0, 0.41, 1.0, 2.3};
    double pseudo_unitarity_tol = 1e-10;
    // Residual check of generator invariance on seeded pseudo-random states;
    // a failure signals an implementation or validation bug.
    int invariance_probes = 3;
    double invariance_tol = 1e-9;
};

GaugedModel apply_gauge(const MasterEquationModel& model, const GaugeSpec& gauge,
                        const ApplyGaugeOptions& options = {});

// Wraps a model as the result of the identity gauge (no checks needed).
GaugedModel identity_gauged(const MasterEquationModel& model);

// Group product: acting with `inner` first, then `outer`.
GaugeSpec compose(const GaugeSpec& outer, const GaugeSpec& inner,
                  const Signature& signature);

enum class PresetKind {
    energy_preserving,    // <dH> = 0 along the trajectory, phi = 0
    power_preserving,     // phi cancels <d/dt dH>, so P' = P
    current_preserving,   // gamma g-orthogonal to Tr[(UL) d rho/dt]; J' = J and P' = P
    minimal_dissipation,  // U = 1, gamma = Tr(L_mu)/dim, so Tr L'_mu = 0
};

// State and seed context needed by the presets that depend on rho(t).
struct PresetContext {
    std::function<CMatrix(double)> state_at;  // rho(t) along the stored trajectory
    double t0 = 0.0;                          // integration origin for phi
    std::optional<GaugeSpec> seed;            // gamma/U seed for (ii) and (iii)
};

GaugeSpec preset_gauge(PresetKind kind, const MasterEquationModel& model,
                       const PresetContext& context);

}  // namespace gaugetherm
