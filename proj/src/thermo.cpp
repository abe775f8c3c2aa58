#include "gaugetherm/thermo.hpp"

#include <cmath>
#include <stdexcept>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

double total_current(const MasterEquationModel& model, double t, const CMatrix& rho) {
    const GeneratorSnapshot snap = model.snapshot(t);
    return real_expectation(snap.hamiltonian, dissipator(snap, rho));
}

double channel_current(const MasterEquationModel& model, Eigen::Index mu, double t,
                       const CMatrix& rho) {
    if (mu < 0 || mu >= model.channel_count()) {
        throw std::invalid_argument("channel_current: index out of range");
    }
    const GeneratorSnapshot snap = model.snapshot(t);
    const CMatrix& l = snap.lindblads[static_cast<std::size_t>(mu)];
    const double sign = static_cast<double>(snap.signs[static_cast<std::size_t>(mu)]);
    const Complex v = expectation(l.adjoint() * commutator(l, snap.hamiltonian), rho);
    return -sign * v.real();
}

double power(const MasterEquationModel& model, double t, const CMatrix& rho) {
    return real_expectation(model.hamiltonian.derivative(t), rho);
}

GaugeTerms gauge_terms(const MasterEquationModel& model, const GaugeSpec& gauge,
                       double t, const CMatrix& rho) {
    const GeneratorSnapshot snap = model.snapshot(t);
    const CMatrix dh = delta_H(gauge, model, t);

    GaugeTerms terms;
    terms.j_delta_h = real_expectation(dh, dissipator(snap, rho));
    terms.c_delta_h = real_expectation(dh, unitary_generator(snap, rho));
    terms.power_delta_h = real_expectation(delta_H_derivative(gauge, model, t), rho);

    const double direct = real_expectation(dh, liouvillian(snap, rho));
    const double sum = terms.j_delta_h + terms.c_delta_h;
    if (std::abs(direct - sum) > 1e-10 * std::max(1.0, std::abs(direct))) {
        throw CrossCheckError("gauge_terms: Tr(dH d rho/dt) != J_dH + C_dH");
    }
    return terms;
}

ThermoSample thermo_sample(const GaugedModel& gm, double t, const CMatrix& rho,
                           std::optional<double> denergy_dt) {
    const MasterEquationModel& base = gm.base;
    const MasterEquationModel& tr = gm.transformed;

    ThermoSample s;
    s.t = t;
    s.energy = real_expectation(tr.hamiltonian(t), rho);
    s.total_current = total_current(tr, t, rho);
    s.power = power(tr, t, rho);

    const GaugeTerms terms = gauge_terms(base, gm.gauge, t, rho);
    s.j_delta_h = terms.j_delta_h;
    s.c_delta_h = terms.c_delta_h;
    s.power_delta_h = terms.power_delta_h;

    // Route (b): transformed quantities from the base presentation.
    const double j_base = total_current(base, t, rho);
    const double p_base = power(base, t, rho);
    const double j_via_identity = j_base + terms.j_delta_h + terms.c_delta_h;
    const double p_via_identity = p_base + terms.power_delta_h;
    if (std::abs(s.total_current - j_via_identity) >
        1e-9 * std::max(1.0, std::abs(s.total_current))) {
        throw CrossCheckError("thermo_sample: J' direct vs J + J_dH + C_dH mismatch");
    }
    if (std::abs(s.power - p_via_identity) > 1e-9 * std::max(1.0, std::abs(s.power))) {
        throw CrossCheckError("thermo_sample: P' direct vs P + <d dH/dt> mismatch");
    }

    s.channel_currents.resize(static_cast<std::size_t>(tr.channel_count()));
    double channel_sum = 0.0;
    for (Eigen::Index mu = 0; mu < tr.channel_count(); ++mu) {
        const double j = channel_current(tr, mu, t, rho);
        s.channel_currents[static_cast<std::size_t>(mu)] = j;
        channel_sum += j;
    }
    if (std::abs(channel_sum - s.total_current) >
        1e-10 * std::max(1.0, std::abs(s.total_current))) {
        throw CrossCheckError("thermo_sample: sum of channel currents != total current");
    }

    for (const std::string& tag : tr.reservoir_tags()) {
        double j_tag = 0.0;
        for (Eigen::Index mu = 0; mu < tr.channel_count(); ++mu) {
            if (tr.channels[static_cast<std::size_t>(mu)].reservoir_tag == tag) {
                j_tag += s.channel_currents[static_cast<std::size_t>(mu)];
            }
        }
        s.reservoir_currents.emplace_back(tag, j_tag);
    }

    if (denergy_dt) {
        s.first_law_residual = std::abs(*denergy_dt - (s.total_current + s.power));
    }
    return s;
}

InvarianceReport invariance_report(const MasterEquationModel& model, double t,
                                   const CMatrix& rho, double tol,
                                   const GaugeSpec* candidate) {
    InvarianceReport report;
    report.t = t;
    report.tol = tol;
    if (candidate) {
        report.phi_constrained = true;
        report.dphi_dt = candidate->phi_derivative(t);
    }
    bool ok = !candidate || std::abs(report.dphi_dt) <= tol;
    for (const Channel& c : model.channels) {
        const Complex ml = expectation(c.lindblad(t), rho);
        const Complex mdl = expectation(c.lindblad.derivative(t), rho);
        report.mean_l.push_back(ml);
        report.mean_dl.push_back(mdl);
        ok = ok && std::abs(ml) <= tol && std::abs(mdl) <= tol;
    }
    report.invariant = ok;
    return report;
}

QdbcReport qdbc_check(const MasterEquationModel& model, const Operator& h_s,
                      double beta, const std::vector<double>& omegas) {
    const Eigen::Index m = model.channel_count();
    if (m % 2 != 0 || m == 0) {
        throw std::invalid_argument("qdbc_check: needs M = 2n paired channels");
    }
    const Eigen::Index n = m / 2;
    if (static_cast<Eigen::Index>(omegas.size()) != n) {
        throw std::invalid_argument("qdbc_check: expected one Bohr frequency per pair");
    }
    for (double w : omegas) {
        if (std::abs(w) < 1e-12) {
            throw std::invalid_argument("qdbc_check: Bohr frequencies must be non-null");
        }
    }

    // Autonomy: detailed balance is stated for time-independent generators.
    const GeneratorSnapshot s0 = model.snapshot(0.0);
    for (double t : {0.7, 1.9}) {
        const GeneratorSnapshot st = model.snapshot(t);
        double drift = (st.hamiltonian - s0.hamiltonian).norm();
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            drift += (st.lindblads[static_cast<std::size_t>(mu)] -
                      s0.lindblads[static_cast<std::size_t>(mu)])
                         .norm();
        }
        if (drift > 1e-10) {
            throw std::invalid_argument("qdbc_check: model is not autonomous");
        }
    }

    const CMatrix hs = h_s(0.0);
    QdbcReport report;
    report.commutes_a = commutator(hs, s0.hamiltonian).norm();

    for (Eigen::Index mu = 0; mu < m; ++mu) {
        const CMatrix& a = s0.lindblads[static_cast<std::size_t>(mu)];
        // First block lowers energy: [H_S, A] = -w A; partners raise it.
        const double w =
            mu < n ? -omegas[static_cast<std::size_t>(mu)] : omegas[static_cast<std::size_t>(mu - n)];
        report.eigenoperator_b.push_back((commutator(hs, a) - w * a).norm());
    }
    for (Eigen::Index mu = 0; mu < n; ++mu) {
        const CMatrix& a = s0.lindblads[static_cast<std::size_t>(mu)];
        const CMatrix& partner = s0.lindblads[static_cast<std::size_t>(mu + n)];
        const double f = std::exp(-0.5 * beta * omegas[static_cast<std::size_t>(mu)]);
        report.pairing_c.push_back((partner - f * a.adjoint()).norm());
    }

    const CMatrix boltzmann = matrix_exp_hermitian(-beta * hs);
    const CMatrix gibbs = boltzmann / boltzmann.trace().real();
    report.gibbs_fixed_point_residual = liouvillian(s0, gibbs).norm();
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        report.mean_a_at_gibbs.push_back(
            expectation(s0.lindblads[static_cast<std::size_t>(mu)], gibbs));
    }
    return report;
}

}  // namespace gaugetherm
