#include "gaugetherm/integrator.hpp"

#include <cmath>
#include <memory>

#include <Eigen/Eigenvalues>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

Trajectory::Trajectory(MasterEquationModel model, double t0, double dt,
                       std::vector<CMatrix> states, std::vector<CMatrix> slopes,
                       double trace_drift, double min_eigenvalue,
                       std::vector<double> signature_switches)
    : model_(std::move(model)),
      t0_(t0),
      dt_(dt),
      states_(std::move(states)),
      slopes_(std::move(slopes)),
      trace_drift_(trace_drift),
      min_eigenvalue_(min_eigenvalue),
      signature_switches_(std::move(signature_switches)) {}

CMatrix Trajectory::state_at(double t) const {
    const Eigen::Index n = steps();
    // Numeric derivatives of gauge closures probe just past the grid ends;
    // allow half a step of extrapolation, clamp anything farther out.
    double s = (t - t0_) / dt_;
    s = std::clamp(s, -0.5, static_cast<double>(n) + 0.5);
    Eigen::Index k = static_cast<Eigen::Index>(std::floor(s));
    k = std::clamp(k, Eigen::Index{0}, n - 1);
    s -= static_cast<double>(k);

    const CMatrix& p0 = states_[static_cast<std::size_t>(k)];
    const CMatrix& p1 = states_[static_cast<std::size_t>(k + 1)];
    const CMatrix& m0 = slopes_[static_cast<std::size_t>(k)];
    const CMatrix& m1 = slopes_[static_cast<std::size_t>(k + 1)];

    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * p0 + (h10 * dt_) * m0 + h01 * p1 + (h11 * dt_) * m1;
}

std::function<CMatrix(double)> Trajectory::state_provider() const {
    // Shared copy keeps the provider valid past the trajectory's lifetime.
    auto self = std::make_shared<Trajectory>(*this);
    return [self](double t) { return self->state_at(t); };
}

CMatrix step_rk4(const MasterEquationModel& model, double t, double dt,
                 const CMatrix& rho) {
    if (dt <= 0.0) throw std::invalid_argument("step_rk4: dt must be positive");
    const GeneratorSnapshot s0 = model.snapshot(t);
    const GeneratorSnapshot s1 = model.snapshot(t + 0.5 * dt);
    const GeneratorSnapshot s2 = model.snapshot(t + dt);

    const CMatrix k1 = liouvillian(s0, rho);
    const CMatrix k2 = liouvillian(s1, rho + (0.5 * dt) * k1);
    const CMatrix k3 = liouvillian(s1, rho + (0.5 * dt) * k2);
    const CMatrix k4 = liouvillian(s2, rho + dt * k3);
    CMatrix next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
        throw NumericalError("step_rk4: non-finite generator output at t=" +
                             std::to_string(t));
    }
    return hermitize(next);
}

Trajectory evolve(const MasterEquationModel& model, const CMatrix& rho0, double t0,
                  double t1, Eigen::Index steps, const EvolveOptions& options) {
    if (steps < 2 || steps % 2 != 0) {
        throw std::invalid_argument("evolve: steps must be even and >= 2");
    }
    if (t1 <= t0) throw std::invalid_argument("evolve: t1 must exceed t0");
    model.validate({t0, 0.5 * (t0 + t1), t1});
    DensityMatrix::validated(rho0, options.density_check);

    const double dt = (t1 - t0) / static_cast<double>(steps);
    std::vector<CMatrix> states;
    std::vector<CMatrix> slopes;
    states.reserve(static_cast<std::size_t>(steps) + 1);
    slopes.reserve(static_cast<std::size_t>(steps) + 1);
    states.push_back(hermitize(rho0));

    double trace_drift = 0.0;
    double min_eig = 1.0;
    std::vector<double> switches;
    std::vector<int> prev_signs = model.signature.at(t0);

    Eigen::SelfAdjointEigenSolver<CMatrix> eigs;
    for (Eigen::Index k = 0; k <= steps; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        const CMatrix& rho = states.back();

        eigs.compute(rho, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, eigs.eigenvalues().minCoeff());
        trace_drift = std::max(trace_drift, std::abs(rho.trace().real() - 1.0) +
                                                std::abs(rho.trace().imag()));
        if (min_eig < -options.density_check.positivity_error) {
            throw NumericalError("evolve: positivity failure, eigenvalue " +
                                 std::to_string(min_eig) + " at t=" + std::to_string(t));
        }
        if (trace_drift > options.trace_drift_tol) {
            throw NumericalError("evolve: trace drift " + std::to_string(trace_drift) +
                                 " at t=" + std::to_string(t));
        }
        if (!model.signature.constant_in_time()) {
            const std::vector<int> signs = model.signature.at(t);
            if (signs != prev_signs) switches.push_back(t);
            prev_signs = signs;
        }

        const GeneratorSnapshot st = model.snapshot(t);
        slopes.push_back(liouvillian(st, rho));
        if (k == steps) break;

        // RK4 with the already computed k1 = slopes.back().
        const GeneratorSnapshot sm = model.snapshot(t + 0.5 * dt);
        const GeneratorSnapshot se = model.snapshot(t + dt);
        const CMatrix& k1 = slopes.back();
        const CMatrix k2 = liouvillian(sm, rho + (0.5 * dt) * k1);
        const CMatrix k3 = liouvillian(sm, rho + (0.5 * dt) * k2);
        const CMatrix k4 = liouvillian(se, rho + dt * k3);
        CMatrix next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite()) {
            throw NumericalError("evolve: non-finite state at t=" + std::to_string(t));
        }
        states.push_back(hermitize(next));
    }

    return Trajectory(model, t0, dt, std::move(states), std::move(slopes), trace_drift,
                      min_eig, std::move(switches));
}

double simpson(const std::vector<double>& values, double dt) {
    const std::size_t n = values.size();
    if (n < 3 || n % 2 == 0) {
        throw std::invalid_argument("simpson: need an odd number of samples");
    }
    double sum = values.front() + values.back();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        sum += (k % 2 == 1 ? 4.0 : 2.0) * values[k];
    }
    return sum * dt / 3.0;
}

PathLedger accumulate(const GaugedModel& gm, const Trajectory& trajectory,
                      const AccumulateOptions& options) {
    const Eigen::Index n = trajectory.steps();
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("accumulate: trajectory grid must have even steps");
    }
    const double dt = trajectory.dt();
    const MasterEquationModel& tr = gm.transformed;

    PathLedger ledger;
    ledger.gauge_label = gm.gauge.label();
    ledger.t0 = trajectory.t0();
    ledger.t1 = trajectory.t1();
    ledger.trace_drift = trajectory.trace_drift();
    ledger.min_eigenvalue_seen = trajectory.min_eigenvalue_seen();

    // <H'(t_k)> first: the per-sample First Law residual uses a finite
    // difference of these, independent of the analytic chain rule.
    std::vector<double> energy(static_cast<std::size_t>(n) + 1);
    for (Eigen::Index k = 0; k <= n; ++k) {
        energy[static_cast<std::size_t>(k)] = real_expectation(
            tr.hamiltonian(trajectory.time_at(k)), trajectory.state(k));
    }
    auto denergy_dt = [&](Eigen::Index k) {
        const std::size_t i = static_cast<std::size_t>(k);
        if (k == 0) return (-3.0 * energy[0] + 4.0 * energy[1] - energy[2]) / (2.0 * dt);
        if (k == n) {
            return (3.0 * energy[i] - 4.0 * energy[i - 1] + energy[i - 2]) / (2.0 * dt);
        }
        return (energy[i + 1] - energy[i - 1]) / (2.0 * dt);
    };

    const std::vector<std::string> tags = tr.reservoir_tags();
    std::vector<double> current_series(static_cast<std::size_t>(n) + 1);
    std::vector<double> power_series(static_cast<std::size_t>(n) + 1);
    std::map<std::string, std::vector<double>> tag_series;
    for (const std::string& tag : tags) {
        tag_series[tag].resize(static_cast<std::size_t>(n) + 1);
    }
    std::vector<double> thermal_series;

    ledger.markovian = true;
    ledger.samples.reserve(static_cast<std::size_t>(n) + 1);
    for (Eigen::Index k = 0; k <= n; ++k) {
        const double t = trajectory.time_at(k);
        const CMatrix& rho = trajectory.state(k);
        ThermoSample sample = thermo_sample(gm, t, rho, denergy_dt(k));
        current_series[static_cast<std::size_t>(k)] = sample.total_current;
        power_series[static_cast<std::size_t>(k)] = sample.power;
        for (const auto& [tag, value] : sample.reservoir_currents) {
            tag_series[tag][static_cast<std::size_t>(k)] = value;
        }
        for (int s : tr.signature.at(t)) {
            if (s < 0) ledger.markovian = false;
        }

        if (options.entropy || !options.beta_map.empty()) {
            EpSample ep;
            ep.t = t;
            ep.entropy = von_neumann_entropy(rho);
            ep.entropy_rate = entropy_rate(gm.base, t, rho);
            if (options.rho_star) {
                ep.sigma = ep_sigma(trajectory.state(0), rho, *options.rho_star);
                ep.ep_rate = ep_rate(gm.base, t, rho, *options.rho_star);
            }
            if (options.thermal_beta) {
                ep.thermal_ep_rate = thermal_ep_rate(gm, t, rho, *options.thermal_beta);
            }
            if (!options.beta_map.empty()) {
                double rate = ep.entropy_rate;
                for (const auto& [tag, beta] : options.beta_map) {
                    const auto it = tag_series.find(tag);
                    if (it == tag_series.end()) {
                        throw SchemaError("accumulate: beta for unknown reservoir '" +
                                          tag + "'");
                    }
                    rate -= beta * it->second[static_cast<std::size_t>(k)];
                }
                thermal_series.push_back(rate);
            }
            ledger.ep_samples.push_back(ep);
        }
        ledger.samples.push_back(std::move(sample));
    }

    ledger.heat = simpson(current_series, dt);
    ledger.work = simpson(power_series, dt);
    for (const std::string& tag : tags) {
        ledger.heat_by_reservoir.emplace_back(tag, simpson(tag_series[tag], dt));
    }
    if (!thermal_series.empty()) {
        ledger.sigma_tilde = simpson(thermal_series, dt);
    }

    ledger.delta_energy = energy.back() - energy.front();
    ledger.first_law_gap = std::abs(ledger.delta_energy - ledger.heat - ledger.work);
    if (ledger.first_law_gap >
        options.first_law_tol * std::max(1.0, std::abs(ledger.delta_energy))) {
        throw CrossCheckError("accumulate: First Law gap " +
                              std::to_string(ledger.first_law_gap));
    }

    // Cycle closure: state and gauge functions both return to their start.
    double closure = (trajectory.state(n) - trajectory.state(0)).norm();
    const double ta = ledger.t0;
    const double tb = ledger.t1;
    for (Eigen::Index mu = 0; mu < gm.gauge.channel_count(); ++mu) {
        closure = std::max(closure, std::abs(gm.gauge.gamma(mu, tb) - gm.gauge.gamma(mu, ta)));
    }
    if (gm.gauge.channel_count() > 0) {
        closure = std::max(closure, (gm.gauge.umatrix(tb) - gm.gauge.umatrix(ta)).norm());
    }
    closure = std::max(closure, std::abs(gm.gauge.phi(tb) - gm.gauge.phi(ta)));
    ledger.cycle_residual = closure;
    ledger.cyclic = closure <= options.cycle_tol;

    return ledger;
}

MachineReport machine_report(const PathLedger& ledger, double beta_h, double beta_c) {
    if (!ledger.cyclic) {
        throw std::invalid_argument(
            "machine_report: ledger is not cyclic (state or gauge does not close)");
    }
    double q_h = std::numeric_limits<double>::quiet_NaN();
    double q_c = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [tag, q] : ledger.heat_by_reservoir) {
        if (tag == "hot") q_h = q;
        if (tag == "cold") q_c = q;
    }
    if (!std::isfinite(q_h) || !std::isfinite(q_c)) {
        throw std::invalid_argument("machine_report: ledger lacks hot/cold reservoirs");
    }
    if (q_h <= 0.0) {
        throw NumericalError("machine_report: Q_h <= 0, not operating as an engine");
    }

    MachineReport report;
    report.eta = std::abs(ledger.work) / q_h;
    report.carnot_bound = 1.0 - beta_h / beta_c;
    report.sigma_tilde = ledger.sigma_tilde;
    report.balance_residual = std::abs(ledger.sigma_tilde + beta_h * q_h + beta_c * q_c);
    if (ledger.markovian && report.eta > report.carnot_bound + 1e-8) {
        throw CrossCheckError("machine_report: efficiency exceeds the Carnot bound");
    }
    return report;
}

}  // namespace gaugetherm
