#include <doctest.h>

#include "gaugetherm/models.hpp"
#include "test_support.hpp"

using namespace gaugetherm;

namespace {

MaserParams maser_params() {
    return MaserParams::from_occupations(0.0, 1.0, 3.0, 0.5, 1.0, 2.0, 0.5);
}

}  // namespace

TEST_CASE("pdm construction") {
    PdmParams params;
    params.omega = 2.0;
    params.gamma = [](double t) { return std::cos(t); };
    params.p = 0.5;
    params.rho01 = Complex{0.04, 0.0};
    const MasterEquationModel model = build_pdm(params);

    CHECK(model.signature.at(0.0)[0] == 1);
    CHECK(model.signature.at(2.0)[0] == -1);
    CHECK(model.channels[0].reservoir_tag == "env");

    // [L, H] = 0 at several times
    for (double t : {0.0, 0.4, 3.0}) {
        CHECK(commutator(model.channels[0].lindblad(t), model.hamiltonian(t)).norm() <
              1e-14);
    }

    // L carries the full sqrt(|Gamma|)
    CHECK((model.channels[0].lindblad(0.0) - pauli_z()).norm() < 1e-14);

    PdmParams bad = params;
    bad.rho01 = Complex{0.9, 0.0};
    CHECK_THROWS_AS(build_pdm(bad), std::invalid_argument);
}

TEST_CASE("pdm analytic state") {
    PdmParams params;
    params.omega = 1.5;
    params.gamma = [](double) { return 0.5; };
    params.p = 0.62;
    params.rho01 = Complex{0.2, 0.15};

    CHECK((pdm_analytic_state(params, 0.0) - pdm_initial_state(params)).norm() < 1e-14);

    // constant Gamma = 1/2 gives |rho01(t)| = |rho01| e^{-t}
    const CMatrix at_one = pdm_analytic_state(params, 1.0);
    CHECK(std::abs(at_one(0, 1)) ==
          doctest::Approx(std::abs(params.rho01) * std::exp(-1.0)).epsilon(1e-9));

    // integrator cross-validation
    const MasterEquationModel model = build_pdm(params);
    const Trajectory traj = evolve(model, pdm_initial_state(params), 0.0, 2.0, 2000);
    CHECK((traj.state(traj.steps()) - pdm_analytic_state(params, 2.0)).norm() < 1e-8);
}

TEST_CASE("pdm analytic state matches rk4 for varied rate profiles") {
    std::vector<std::function<double(double)>> rates = {
        [](double) { return 1.0; },
        [](double t) { return std::exp(-0.5 * t); },
        [](double t) { return std::cos(t); },
    };
    for (const auto& rate : rates) {
        PdmParams params;
        params.omega = 2.0;
        params.gamma = rate;
        params.p = 0.5;
        params.rho01 = Complex{0.04, 0.0};
        const MasterEquationModel model = build_pdm(params);
        const Trajectory traj = evolve(model, pdm_initial_state(params), 0.0, 5.0, 5000);
        double sup = 0.0;
        for (Eigen::Index k = 0; k <= traj.steps(); k += 100) {
            sup = std::max(
                sup, (traj.state(k) - pdm_analytic_state(params, traj.time_at(k))).norm());
        }
        CHECK(sup < 1e-7);
    }
}

TEST_CASE("pdm closed-form entropy production") {
    PdmParams params;
    params.omega = 1.0;
    params.gamma = [](double) { return 0.5; };
    params.p = 0.5;
    params.rho01 = Complex{0.4, 0.0};

    const PdmEntropyProduction start = pdm_ep_closed_form(params, 0.0);
    CHECK(std::abs(start.sigma) < 1e-14);

    // Sigma(t) = H(0.4 e^{-t}) - H(0.4), increasing
    double prev = -1.0;
    for (double t : {0.5, 1.0, 2.0}) {
        const PdmEntropyProduction ep = pdm_ep_closed_form(params, t);
        const double expected =
            binary_entropy(0.4 * std::exp(-t)) - binary_entropy(0.4);
        CHECK(ep.sigma == doctest::Approx(expected).epsilon(1e-9));
        CHECK(ep.sigma > prev);
        prev = ep.sigma;
        CHECK(ep.ep_rate > 0.0);
    }

    // oscillatory envelope: negative rate where the coherence revives
    params.gamma = [](double t) { return std::cos(t); };
    params.rho01 = Complex{0.04, 0.0};
    CHECK(pdm_ep_closed_form(params, 2.0).ep_rate < 0.0);  // Gamma < 0 there
    CHECK(pdm_ep_closed_form(params, 0.3).ep_rate > 0.0);
}

TEST_CASE("maser construction") {
    const MaserParams params = maser_params();
    CHECK(params.nbar_h() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(params.nbar_c() == doctest::Approx(0.5).epsilon(1e-12));

    const MasterEquationModel model = build_maser(params);
    REQUIRE(model.channel_count() == 4);
    CHECK(model.channels[0].reservoir_tag == "hot");
    CHECK(model.channels[1].reservoir_tag == "hot");
    CHECK(model.channels[2].reservoir_tag == "cold");
    CHECK(model.channels[3].reservoir_tag == "cold");

    // channel norms squared: Gamma nbar etc.
    CHECK(model.channels[0].lindblad(0.0).squaredNorm() == doctest::Approx(2.0));
    CHECK(model.channels[1].lindblad(0.0).squaredNorm() == doctest::Approx(3.0));
    CHECK(model.channels[2].lindblad(0.0).squaredNorm() == doctest::Approx(0.5));
    CHECK(model.channels[3].lindblad(0.0).squaredNorm() == doctest::Approx(1.5));

    for (Eigen::Index mu = 0; mu < 4; ++mu) {
        CHECK(std::abs(model.channels[mu].lindblad(0.3).trace()) < 1e-14);
    }
    for (double t : {0.0, 0.9, 2.6}) {
        CHECK(is_hermitian(model.hamiltonian(t), 1e-12));
    }
}

TEST_CASE("maser steady state agrees with the null-space oracle") {
    const MaserParams params = maser_params();
    const MaserLimitCycle cycle = maser_steady_state(params);

    // frozen closed-form values for Gamma=1, eps=1/2, nbar_h=2, nbar_c=1/2
    CHECK(cycle.rho11 == doctest::Approx(33.0 / 101.0).epsilon(1e-12));
    CHECK(cycle.rho22 == doctest::Approx(48.0 / 101.0).epsilon(1e-12));
    CHECK(cycle.rho33 == doctest::Approx(20.0 / 101.0).epsilon(1e-12));
    CHECK(cycle.rho12.imag() == doctest::Approx(-6.0 / 101.0).epsilon(1e-12));
    CHECK(std::abs(cycle.rho12.real()) < 1e-14);

    const MasterEquationModel rotating = build_maser_rotating(params);
    const FixedPointResult oracle = fixed_point(rotating, 0.0);
    REQUIRE_FALSE(oracle.degenerate);
    CHECK((oracle.unique().matrix - cycle.rotating_state()).norm() < 1e-9);

    // without the drive the coherence disappears
    const MaserParams weak =
        MaserParams::from_occupations(0.0, 1.0, 3.0, 1e-6, 1.0, 2.0, 0.5);
    CHECK(std::abs(maser_steady_state(weak).rho12) < 1e-5);
}

TEST_CASE("evolving from the limit cycle stays on it") {
    const MaserParams params = maser_params();
    const MasterEquationModel model = build_maser(params);
    const MaserLimitCycle cycle = maser_steady_state(params);
    const double tau = params.period();
    const Trajectory traj =
        evolve(model, cycle.lab_state(params.omega(), 0.0), 0.0, tau, 4000);
    for (Eigen::Index k = 0; k <= traj.steps(); k += 500) {
        CHECK((traj.state(k) - cycle.lab_state(params.omega(), traj.time_at(k))).norm() <
              1e-8);
    }
}

TEST_CASE("maser thermodynamic closed forms") {
    const MaserParams params = maser_params();
    const MaserThermo thermo = maser_thermo(params);

    CHECK(thermo.j_hot == doctest::Approx(18.0 / 101.0).epsilon(1e-12));
    CHECK(thermo.j_cold == doctest::Approx(-12.0 / 101.0).epsilon(1e-12));
    CHECK(thermo.eta == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(thermo.work_cycle < 0.0);

    // first law over a period: W + tau (J_h + J_c) = 0
    const double tau = params.period();
    CHECK(std::abs(thermo.work_cycle + tau * (thermo.j_hot + thermo.j_cold)) < 1e-12);

    // Carnot bound from the inverted occupations
    const double carnot = 1.0 - params.beta_h / params.beta_c;
    CHECK(carnot == doctest::Approx(0.7539531686).epsilon(1e-9));
    CHECK(thermo.eta <= carnot);

    // nearly equal baths carry nearly no current
    const MaserParams tight =
        MaserParams::from_occupations(0.0, 1.0, 3.0, 0.5, 1.0, 0.5 + 1e-6, 0.5);
    CHECK(std::abs(maser_thermo(tight).j_hot) < 1e-6);
    CHECK_THROWS_AS(
        MaserParams::from_occupations(0.0, 1.0, 3.0, 0.5, 1.0, 0.5, 0.5).validate(),
        std::invalid_argument);
}

TEST_CASE("shifting gauge family moves heat at a constant rate") {
    const MaserParams params = maser_params();
    const MasterEquationModel model = build_maser(params);
    const MaserLimitCycle cycle = maser_steady_state(params);
    const double tau = params.period();

    for (Complex c : {Complex{1.0, 0.0}, Complex{0.5, 0.0}, Complex{-1.0, 0.0}}) {
        const GaugeSpec gauge = maser_gauge_family(MaserGaugeKind::shifting, params, c);
        ApplyGaugeOptions gopts;
        gopts.sample_times = {0.0, 0.4 * tau, tau};
        const GaugedModel gauged = apply_gauge(model, gauge, gopts);
        const double predicted = maser_shifting_current_shift(params, c);
        for (double t : {0.0, 0.7, 3.9}) {
            const CMatrix rho = cycle.lab_state(params.omega(), t);
            double shift = 0.0;
            for (Eigen::Index mu = 0; mu < 2; ++mu) {
                shift += channel_current(gauged.transformed, mu, t, rho) -
                         channel_current(model, mu, t, rho);
            }
            CHECK(shift == doctest::Approx(predicted).epsilon(1e-9));
        }
    }

    // frozen value for C = 1: +3/101, positive (efficiency drops)
    CHECK(maser_shifting_current_shift(params, Complex{1.0, 0.0}) ==
          doctest::Approx(3.0 / 101.0).epsilon(1e-12));
    // C -> -C leaves the shift unchanged
    CHECK(maser_shifting_current_shift(params, Complex{-1.0, 0.0}) ==
          doctest::Approx(maser_shifting_current_shift(params, Complex{1.0, 0.0})));
}

TEST_CASE("neutral gauge family leaves the period heats unchanged") {
    const MaserParams params = maser_params();
    const MasterEquationModel model = build_maser(params);
    const MaserLimitCycle cycle = maser_steady_state(params);
    const double tau = params.period();
    const GaugeSpec gauge =
        maser_gauge_family(MaserGaugeKind::neutral, params, Complex{1.0, 0.0});
    ApplyGaugeOptions gopts;
    gopts.sample_times = {0.0, 0.4 * tau, tau};
    const GaugedModel gauged = apply_gauge(model, gauge, gopts);

    // pointwise the hot current moves, but the period integral closes
    const Eigen::Index n = 400;
    std::vector<double> shift(static_cast<std::size_t>(n) + 1);
    bool nonzero_somewhere = false;
    for (Eigen::Index k = 0; k <= n; ++k) {
        const double t = tau * static_cast<double>(k) / static_cast<double>(n);
        const CMatrix rho = cycle.lab_state(params.omega(), t);
        double j_hot_shift = 0.0;
        for (Eigen::Index mu = 0; mu < 2; ++mu) {
            j_hot_shift += channel_current(gauged.transformed, mu, t, rho) -
                           channel_current(model, mu, t, rho);
        }
        shift[static_cast<std::size_t>(k)] = j_hot_shift;
        nonzero_somewhere = nonzero_somewhere || std::abs(j_hot_shift) > 1e-3;
    }
    CHECK(nonzero_somewhere);
    CHECK(std::abs(simpson(shift, tau / static_cast<double>(n))) < 1e-6);
}

TEST_CASE("resonance fluorescence presentations rule the same evolution") {
    const ResonanceFluorescencePair pair =
        resonance_fluorescence_pair(1.3, 1.1, 0.8, 0.7, 0.4);
    auto rng = testing::make_rng(71);

    for (int trial = 0; trial < 100; ++trial) {
        const CMatrix rho = testing::random_density(rng, 2);
        const double t = 0.05 * trial;
        const CMatrix a = liouvillian(pair.driven, t, rho);
        const CMatrix b = liouvillian(pair.displaced, t, rho);
        CHECK((a - b).norm() <= 1e-9 * std::max(1.0, a.norm()));
    }

    // the witness gauge maps the driven presentation onto the displaced one
    ApplyGaugeOptions gopts;
    gopts.sample_times = {0.0, 0.9, 2.0};
    const GaugedModel gauged = apply_gauge(pair.driven, pair.witness, gopts);
    for (double t : {0.0, 1.2}) {
        CHECK((gauged.transformed.hamiltonian(t) - pair.displaced.hamiltonian(t)).norm() <
              1e-12);
        for (Eigen::Index mu = 0; mu < 2; ++mu) {
            CHECK((gauged.transformed.channels[mu].lindblad(t) -
                   pair.displaced.channels[mu].lindblad(t))
                      .norm() < 1e-12);
        }
    }
}

TEST_CASE("resonance fluorescence first-law bookkeeping differs by gauge terms") {
    const ResonanceFluorescencePair pair =
        resonance_fluorescence_pair(1.3, 1.1, 0.8, 0.7, 0.4);
    auto rng = testing::make_rng(72);
    const CMatrix rho0 = testing::random_density(rng, 2);
    const Trajectory traj = evolve(pair.driven, rho0, 0.0, 1.0, 200);

    ApplyGaugeOptions gopts;
    gopts.sample_times = {0.0, 0.5, 1.0};
    const GaugedModel gauged = apply_gauge(pair.driven, pair.witness, gopts);

    for (Eigen::Index k = 0; k <= traj.steps(); k += 40) {
        const double t = traj.time_at(k);
        const CMatrix& rho = traj.state(k);
        // driven presentation: plain quantities
        const double j_driven = total_current(pair.driven, t, rho);
        const double p_driven = power(pair.driven, t, rho);
        // displaced presentation directly
        const double j_displaced = total_current(pair.displaced, t, rho);
        const double p_displaced = power(pair.displaced, t, rho);
        // they differ exactly by the witness gauge terms
        const GaugeTerms terms = gauge_terms(pair.driven, pair.witness, t, rho);
        CHECK(std::abs(j_displaced - (j_driven + terms.j_delta_h + terms.c_delta_h)) <
              1e-8);
        CHECK(std::abs(p_displaced - (p_driven + terms.power_delta_h)) < 1e-8);
        // the drive carries power in one presentation only
        CHECK(std::abs(p_displaced) < 1e-12);
    }
}

TEST_CASE("resonance fluorescence collapses without the drive") {
    const ResonanceFluorescencePair pair =
        resonance_fluorescence_pair(1.3, 1.1, 0.0, 0.7, 0.4);
    for (double t : {0.0, 0.8}) {
        CHECK((pair.driven.hamiltonian(t) - pair.displaced.hamiltonian(t)).norm() <
              1e-14);
        for (Eigen::Index mu = 0; mu < 2; ++mu) {
            CHECK((pair.driven.channels[mu].lindblad(t) -
                   pair.displaced.channels[mu].lindblad(t))
                      .norm() < 1e-14);
        }
    }
}

TEST_CASE("qdbc decay model") {
    const double omega0 = 1.0, beta = 0.8, rate = 0.6;
    const QdbcDecayModel decay = build_qdbc_decay(omega0, beta, rate);

    const QdbcReport report = qdbc_check(decay.model, decay.h_s, beta, decay.omegas);
    CHECK(report.commutes_a <= 1e-12);
    for (double r : report.eigenoperator_b) CHECK(r <= 1e-12);
    for (double r : report.pairing_c) CHECK(r <= 1e-12);
    CHECK(report.gibbs_fixed_point_residual <= 1e-10);

    // evolution from a diagonal state keeps <A_mu> = 0 at all times
    CMatrix diagonal = CMatrix::Zero(2, 2);
    diagonal(0, 0) = 0.9;
    diagonal(1, 1) = 0.1;
    const Trajectory traj = evolve(decay.model, diagonal, 0.0, 3.0, 600);
    for (Eigen::Index k = 0; k <= traj.steps(); k += 100) {
        const InvarianceReport inv =
            invariance_report(decay.model, traj.time_at(k), traj.state(k));
        CHECK(inv.invariant);
    }
}
