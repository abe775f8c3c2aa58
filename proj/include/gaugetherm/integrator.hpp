// Fixed-step RK4 evolution of the master equation and path accumulation:
// heat, work, per-reservoir heats and entropy production along a gauge,
// integrated with composite Simpson on the RK4 grid.

#pragma once

#include "gaugetherm/entropy.hpp"

namespace gaugetherm {

class Trajectory {
public:
    Trajectory() = default;
    Trajectory(MasterEquationModel model, double t0, double dt,
               std::vector<CMatrix> states, std::vector<CMatrix> slopes,
               double trace_drift, double min_eigenvalue,
               std::vector<double> signature_switches);

    const MasterEquationModel& model() const noexcept { return model_; }
    double t0() const noexcept { return t0_; }
    double t1() const noexcept { return t0_ + dt_ * static_cast<double>(steps()); }
    double dt() const noexcept { return dt_; }
    Eigen::Index steps() const noexcept {
        return static_cast<Eigen::Index>(states_.size()) - 1;
    }
    double time_at(Eigen::Index k) const { return t0_ + dt_ * static_cast<double>(k); }
    const CMatrix& state(Eigen::Index k) const {
        return states_[static_cast<std::size_t>(k)];
    }

    double trace_drift() const noexcept { return trace_drift_; }
    double min_eigenvalue_seen() const noexcept { return min_eigenvalue_; }
    const std::vector<double>& signature_switch_times() const noexcept {
        return signature_switches_;
    }

    // Cubic Hermite interpolation using the exact slopes L(rho); O(dt^4).
    CMatrix state_at(double t) const;
    std::function<CMatrix(double)> state_provider() const;

private:
    MasterEquationModel model_;
    double t0_ = 0.0;
    double dt_ = 0.0;
    std::vector<CMatrix> states_;
    std::vector<CMatrix> slopes_;  // L(t_k, rho_k) per node
    double trace_drift_ = 0.0;
    double min_eigenvalue_ = 0.0;
    std::vector<double> signature_switches_;
};

// One classical RK4 step; output is Hermitized, the trace is never
// renormalized (drift is a quality signal, not something to hide).
CMatrix step_rk4(const MasterEquationModel& model, double t, double dt,
                 const CMatrix& rho);

struct EvolveOptions {
    double trace_drift_tol = 1e-6;
    DensityCheck density_check = {};
};

// steps must be even (Simpson quadrature runs on the same grid).
Trajectory evolve(const MasterEquationModel& model, const CMatrix& rho0, double t0,
                  double t1, Eigen::Index steps, const EvolveOptions& options = {});

struct PathLedger {
    std::string gauge_label;
    double t0 = 0.0;
    double t1 = 0.0;
    double heat = 0.0;  // Q = int J' dt
    double work = 0.0;  // W = int P' dt
    std::vector<std::pair<std::string, double>> heat_by_reservoir;
    double delta_energy = 0.0;  // <H'(t1)> - <H'(t0)>
    double first_law_gap = 0.0;
    double sigma_tilde = std::numeric_limits<double>::quiet_NaN();
    std::vector<ThermoSample> samples;
    std::vector<EpSample> ep_samples;
    double trace_drift = 0.0;
    double min_eigenvalue_seen = 0.0;
    // True when both the state and the gauge functions return to their
    // initial values at t1; machine reports require it.
    bool cyclic = false;
    double cycle_residual = 0.0;
    bool markovian = false;  // all-plus signature along the grid
};

struct AccumulateOptions {
    // Entropy columns (S, dS/dt) and, with the extra inputs, Sigma / E / E~.
    bool entropy = false;
    std::optional<CMatrix> rho_star;       // enables Sigma and E
    std::optional<double> thermal_beta;    // enables the pointwise E~
    std::map<std::string, double> beta_map;  // per-reservoir betas for sigma_tilde
    double first_law_tol = 1e-6;
    double cycle_tol = 1e-6;
};

PathLedger accumulate(const GaugedModel& gm, const Trajectory& trajectory,
                      const AccumulateOptions& options = {});

struct MachineReport {
    double eta = 0.0;
    double carnot_bound = 0.0;
    double sigma_tilde = 0.0;
    double balance_residual = 0.0;  // |sigma_tilde + beta_h Q_h + beta_c Q_c|
};

// Cycle ledger over exactly one period with reservoirs tagged "hot"/"cold".
MachineReport machine_report(const PathLedger& ledger, double beta_h, double beta_c);

// Composite Simpson over uniformly spaced samples; size must be odd (even
// interval count).
double simpson(const std::vector<double>& values, double dt);

}  // namespace gaugetherm
