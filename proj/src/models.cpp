#include "gaugetherm/models.hpp"

#include <cmath>
#include <stdexcept>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0};
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix pauli_plus() { return projector(2, 0, 1); }
CMatrix pauli_minus() { return projector(2, 1, 0); }

CMatrix projector(Eigen::Index dim, Eigen::Index m, Eigen::Index n) {
    if (m < 0 || n < 0 || m >= dim || n >= dim) {
        throw std::invalid_argument("projector: index out of range");
    }
    CMatrix out = CMatrix::Zero(dim, dim);
    out(m, n) = 1.0;
    return out;
}

CMatrix ladder_down(Eigen::Index dim) {
    CMatrix out = CMatrix::Zero(dim, dim);
    for (Eigen::Index k = 1; k < dim; ++k) {
        out(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    return out;
}

CMatrix ladder_up(Eigen::Index dim) { return ladder_down(dim).adjoint(); }

CMatrix number_operator(Eigen::Index dim) {
    CMatrix out = CMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) out(k, k) = static_cast<double>(k);
    return out;
}

// --------------------------- pure decoherence ------------------------------

void PdmParams::validate() const {
    if (!gamma) throw std::invalid_argument("PdmParams: missing Gamma(t)");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("PdmParams: p outside [0,1]");
    if (std::norm(rho01) > p * (1.0 - p) + 1e-12) {
        throw std::invalid_argument("PdmParams: |rho01|^2 exceeds p(1-p)");
    }
}

MasterEquationModel build_pdm(const PdmParams& params) {
    params.validate();
    const CMatrix sz = pauli_z();
    const auto gamma = params.gamma;

    MasterEquationModel model;
    model.dim = 2;
    model.hamiltonian = Operator::constant("H", 0.5 * params.omega * sz);
    model.channels.push_back(Channel{
        Operator("L", 2,
                 [gamma, sz](double t) {
                     return CMatrix(std::sqrt(std::abs(gamma(t))) * sz);
                 }),
        "env"});
    model.signature = Signature::time_dependent(1, [gamma](double t) {
        return std::vector<int>{gamma(t) >= 0.0 ? 1 : -1};
    });
    return model;
}

CMatrix pdm_initial_state(const PdmParams& params) {
    params.validate();
    CMatrix rho(2, 2);
    rho << params.p, params.rho01, std::conj(params.rho01), 1.0 - params.p;
    return rho;
}

CMatrix pdm_fixed_point(const PdmParams& params) {
    CMatrix rho = CMatrix::Zero(2, 2);
    rho(0, 0) = params.p;
    rho(1, 1) = 1.0 - params.p;
    return rho;
}

double pdm_decoherence(const PdmParams& params, double t) {
    if (t == 0.0) return 1.0;
    int n = std::max(200, static_cast<int>(std::ceil(std::abs(t) * 200.0)));
    if (n % 2 != 0) ++n;
    const double h = t / n;
    double sum = params.gamma(0.0) + params.gamma(t);
    for (int k = 1; k < n; ++k) {
        sum += (k % 2 == 1 ? 4.0 : 2.0) * params.gamma(k * h);
    }
    return std::exp(-2.0 * sum * h / 3.0);
}

CMatrix pdm_analytic_state(const PdmParams& params, double t) {
    const Complex coherence = params.rho01 *
                              std::exp(Complex{0.0, -params.omega * t}) *
                              pdm_decoherence(params, t);
    CMatrix rho(2, 2);
    rho << params.p, coherence, std::conj(coherence), 1.0 - params.p;
    return rho;
}

double binary_entropy(double x) {
    double s = 0.0;
    for (double lam : {0.5 + x, 0.5 - x}) {
        lam = std::max(lam, kLogClamp);
        s -= lam * std::log(lam);
    }
    return s;
}

PdmEntropyProduction pdm_ep_closed_form(const PdmParams& params, double t) {
    const double half_gap = params.p - 0.5;
    const double c0 = std::abs(params.rho01);
    const double d = pdm_decoherence(params, t);
    const double r_now = std::sqrt(half_gap * half_gap + c0 * c0 * d * d);
    const double r_start = std::sqrt(half_gap * half_gap + c0 * c0);

    PdmEntropyProduction out;
    out.sigma = binary_entropy(r_now) - binary_entropy(r_start);

    // dD^2/dt = -4 Gamma D^2; the atanh(2R)/R factor limits to 2 as R -> 0
    // and is guarded just below the pure-state edge R = 1/2.
    const double dd2 = -4.0 * params.gamma(t) * d * d;
    const double factor =
        r_now < 1e-12 ? 2.0 : std::atanh(std::min(2.0 * r_now, 1.0 - 1e-12)) / r_now;
    out.ep_rate = -c0 * c0 * factor * dd2;
    return out;
}

// ------------------------------- maser -------------------------------------

MaserParams MaserParams::from_occupations(double omega1, double omega2, double omega3,
                                          double epsilon, double gamma_rate,
                                          double nbar_h, double nbar_c) {
    MaserParams p;
    p.omega1 = omega1;
    p.omega2 = omega2;
    p.omega3 = omega3;
    p.epsilon = epsilon;
    p.gamma_rate = gamma_rate;
    // beta_alpha = ln(1 + 1/nbar_alpha) / omega_alpha
    p.beta_h = std::log1p(1.0 / nbar_h) / (omega3 - omega1);
    p.beta_c = std::log1p(1.0 / nbar_c) / (omega3 - omega2);
    p.validate();
    return p;
}

void MaserParams::validate() const {
    if (!(omega1 < omega2 && omega2 < omega3)) {
        throw std::invalid_argument("MaserParams: need omega1 < omega2 < omega3");
    }
    if (epsilon <= 0.0 || gamma_rate <= 0.0) {
        throw std::invalid_argument("MaserParams: epsilon and Gamma must be positive");
    }
    if (!(beta_h > 0.0 && beta_c > 0.0 && beta_h < beta_c)) {
        throw std::invalid_argument("MaserParams: need 0 < beta_h < beta_c");
    }
    if (!(nbar_h() > nbar_c() && nbar_c() > 0.0)) {
        throw std::invalid_argument("MaserParams: engine regime needs nbar_h > nbar_c > 0");
    }
}

namespace {

std::vector<Channel> maser_channels(const MaserParams& p) {
    const double g = p.gamma_rate;
    std::vector<Channel> channels;
    channels.push_back(Channel{
        Operator::constant("A_h1", std::sqrt(g * p.nbar_h()) * projector(3, 2, 0)), "hot"});
    channels.push_back(Channel{
        Operator::constant("A_h2", std::sqrt(g * (p.nbar_h() + 1.0)) * projector(3, 0, 2)),
        "hot"});
    channels.push_back(Channel{
        Operator::constant("A_c1", std::sqrt(g * p.nbar_c()) * projector(3, 2, 1)), "cold"});
    channels.push_back(Channel{
        Operator::constant("A_c2", std::sqrt(g * (p.nbar_c() + 1.0)) * projector(3, 1, 2)),
        "cold"});
    return channels;
}

}  // namespace

MasterEquationModel build_maser(const MaserParams& params) {
    params.validate();
    const double w = params.omega();
    const double eps = params.epsilon;
    CMatrix h0 = CMatrix::Zero(3, 3);
    h0(0, 0) = params.omega1;
    h0(1, 1) = params.omega2;
    h0(2, 2) = params.omega3;

    MasterEquationModel model;
    model.dim = 3;
    model.hamiltonian = Operator(
        "H0+V", 3,
        [h0, eps, w](double t) {
            CMatrix h = h0;
            h(0, 1) += eps * std::exp(Complex{0.0, w * t});
            h(1, 0) += eps * std::exp(Complex{0.0, -w * t});
            return h;
        },
        [eps, w](double t) {
            CMatrix dh = CMatrix::Zero(3, 3);
            dh(0, 1) = Complex{0.0, w} * eps * std::exp(Complex{0.0, w * t});
            dh(1, 0) = Complex{0.0, -w} * eps * std::exp(Complex{0.0, -w * t});
            return dh;
        });
    model.channels = maser_channels(params);
    model.signature = Signature::all_plus(4);
    model.reservoir_betas = {{"hot", params.beta_h}, {"cold", params.beta_c}};
    return model;
}

MasterEquationModel build_maser_rotating(const MaserParams& params) {
    params.validate();
    CMatrix h = CMatrix::Zero(3, 3);
    h(0, 1) = params.epsilon;
    h(1, 0) = params.epsilon;

    MasterEquationModel model;
    model.dim = 3;
    model.hamiltonian = Operator::constant("H_rot", h);
    model.channels = maser_channels(params);
    model.signature = Signature::all_plus(4);
    model.reservoir_betas = {{"hot", params.beta_h}, {"cold", params.beta_c}};
    return model;
}

CMatrix MaserLimitCycle::rotating_state() const {
    CMatrix rho = CMatrix::Zero(3, 3);
    rho(0, 0) = rho11;
    rho(1, 1) = rho22;
    rho(2, 2) = rho33;
    rho(0, 1) = rho12;
    rho(1, 0) = std::conj(rho12);
    return rho;
}

CMatrix MaserLimitCycle::lab_state(double omega, double t) const {
    CMatrix rho = rotating_state();
    const Complex phase = std::exp(Complex{0.0, omega * t});
    rho(0, 1) *= phase;
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

MaserLimitCycle maser_steady_state(const MaserParams& params) {
    params.validate();
    const double nh = params.nbar_h();
    const double nc = params.nbar_c();
    const double g = params.gamma_rate;
    const double eps = params.epsilon;
    const double n_sum = nh + nc;

    // Drive coefficient of the population rate equations and the coherence
    // relation, both fixed by eliminating rho_12 from the stationary master
    // equation at zero detuning.
    const double lambda = 4.0 * eps * eps / (g * n_sum);
    const double k = lambda * (4.0 + 3.0 * n_sum) + g * (n_sum + 3.0 * nc * nh);

    MaserLimitCycle cycle;
    cycle.rho11 = (g * nc * (nh + 1.0) + lambda * (n_sum + 2.0)) / k;
    cycle.rho22 = (g * (nc + 1.0) * nh + lambda * (n_sum + 2.0)) / k;
    cycle.rho33 = (lambda * n_sum + g * nc * nh) / k;
    cycle.rho12 = -2.0 * kImag * eps * (cycle.rho22 - cycle.rho11) / (g * n_sum);

    if (cycle.rho12.imag() > 0.0 || std::abs(cycle.rho12.real()) > 1e-12) {
        throw NumericalError("maser_steady_state: coherence sign facts violated");
    }
    return cycle;
}

MaserThermo maser_thermo(const MaserParams& params) {
    const MaserLimitCycle cycle = maser_steady_state(params);
    const double g = params.gamma_rate;
    const double n_sum = params.nbar_h() + params.nbar_c();
    const double lambda = 4.0 * params.epsilon * params.epsilon / (g * n_sum);
    const double flux = lambda * (cycle.rho22 - cycle.rho11);  // net hot-quanta flow

    MaserThermo out;
    out.j_hot = params.omega_h() * flux;
    out.j_cold = -params.omega_c() * flux;
    out.work_cycle = 4.0 * M_PI * params.epsilon * cycle.rho12.imag();
    out.eta = 1.0 - params.omega_c() / params.omega_h();
    return out;
}

GaugeSpec maser_gauge_family(MaserGaugeKind kind, const MaserParams& params, Complex c) {
    const double w = params.omega();
    const double freq = kind == MaserGaugeKind::shifting ? 0.5 * w : -w;
    std::vector<ScalarFn> gamma(4, ScalarFn::constant(Complex{0.0, 0.0}));
    gamma[0] = ScalarFn([c, freq](double t) { return c * std::exp(Complex{0.0, freq * t}); },
                        [c, freq](double t) {
                            return Complex{0.0, freq} * c * std::exp(Complex{0.0, freq * t});
                        });
    gamma[2] = ScalarFn(
        [c, freq](double t) { return std::conj(c) * std::exp(Complex{0.0, -freq * t}); },
        [c, freq](double t) {
            return Complex{0.0, -freq} * std::conj(c) * std::exp(Complex{0.0, -freq * t});
        });
    return GaugeSpec(4, std::move(gamma), Operator::constant("U", CMatrix::Identity(4, 4)),
                     ScalarFn::constant(Complex{0.0, 0.0}),
                     kind == MaserGaugeKind::shifting ? "shifting" : "neutral");
}

double maser_shifting_current_shift(const MaserParams& params, Complex c) {
    const MaserLimitCycle cycle = maser_steady_state(params);
    return -0.5 * params.gamma_rate * std::sqrt(params.nbar_c() * params.nbar_h()) *
           (c * c).real() * cycle.rho12.imag();
}

// ----------------------- resonance fluorescence ----------------------------

ResonanceFluorescencePair resonance_fluorescence_pair(double omega0, double omega,
                                                      double rabi, double gamma_rate,
                                                      double nbar) {
    const double lambda_plus = std::sqrt(gamma_rate * nbar);
    const double lambda_minus = std::sqrt(gamma_rate * (nbar + 1.0));
    if (lambda_plus < 1e-12 || lambda_minus < 1e-12) {
        throw std::invalid_argument("resonance_fluorescence_pair: degenerate rates");
    }
    const CMatrix sz = pauli_z();
    const CMatrix sp = pauli_plus();
    const CMatrix sm = pauli_minus();

    ResonanceFluorescencePair pair;

    pair.driven.dim = 2;
    pair.driven.hamiltonian = Operator(
        "H0+V", 2,
        [omega0, omega, rabi, sz, sp, sm](double t) {
            return CMatrix(0.5 * omega0 * sz +
                           rabi * (std::exp(Complex{0.0, -omega * t}) * sp +
                                   std::exp(Complex{0.0, omega * t}) * sm));
        },
        [omega, rabi, sp, sm](double t) {
            return CMatrix(rabi * (Complex{0.0, -omega} * std::exp(Complex{0.0, -omega * t}) * sp +
                                   Complex{0.0, omega} * std::exp(Complex{0.0, omega * t}) * sm));
        });
    pair.driven.channels = {Channel{Operator::constant("L+", lambda_plus * sp), "env"},
                            Channel{Operator::constant("L-", lambda_minus * sm), "env"}};
    pair.driven.signature = Signature::all_plus(2);

    // gamma_pm = -i rabi / lambda_pm e^{pm i omega t}
    auto gamma_fn = [rabi, omega](double lambda, double sign) {
        return ScalarFn(
            [rabi, omega, lambda, sign](double t) {
                return -kImag * rabi / lambda * std::exp(Complex{0.0, sign * omega * t});
            },
            [rabi, omega, lambda, sign](double t) {
                return Complex{0.0, sign * omega} * (-kImag) * rabi / lambda *
                       std::exp(Complex{0.0, sign * omega * t});
            });
    };
    const ScalarFn gamma_plus = gamma_fn(lambda_plus, +1.0);
    const ScalarFn gamma_minus = gamma_fn(lambda_minus, -1.0);

    pair.displaced.dim = 2;
    pair.displaced.hamiltonian = Operator::constant("H0", 0.5 * omega0 * sz);
    pair.displaced.channels = {
        Channel{Operator("L+'", 2,
                         [lambda_plus, sp, gamma_plus](double t) {
                             return CMatrix(lambda_plus * sp -
                                            gamma_plus(t) * CMatrix::Identity(2, 2));
                         },
                         [gamma_plus](double t) {
                             return CMatrix(-gamma_plus.derivative(t) * CMatrix::Identity(2, 2));
                         }),
                "env"},
        Channel{Operator("L-'", 2,
                         [lambda_minus, sm, gamma_minus](double t) {
                             return CMatrix(lambda_minus * sm -
                                            gamma_minus(t) * CMatrix::Identity(2, 2));
                         },
                         [gamma_minus](double t) {
                             return CMatrix(-gamma_minus.derivative(t) * CMatrix::Identity(2, 2));
                         }),
                "env"}};
    pair.displaced.signature = Signature::all_plus(2);

    pair.witness = GaugeSpec(2, {gamma_plus, gamma_minus},
                             Operator::constant("U", CMatrix::Identity(2, 2)),
                             ScalarFn::constant(Complex{0.0, 0.0}), "rf_witness");
    return pair;
}

// --------------------------- detailed balance ------------------------------

QdbcDecayModel build_qdbc_decay(double omega0, double beta, double gamma_rate) {
    if (omega0 <= 0.0 || beta <= 0.0 || gamma_rate <= 0.0) {
        throw std::invalid_argument("build_qdbc_decay: arguments must be positive");
    }
    const CMatrix hs = 0.5 * omega0 * pauli_z();
    const CMatrix a1 = std::sqrt(gamma_rate) * pauli_minus();
    const CMatrix a2 = std::exp(-0.5 * beta * omega0) * a1.adjoint();

    QdbcDecayModel out;
    out.model.dim = 2;
    out.model.hamiltonian = Operator::constant("H", hs);
    out.model.channels = {Channel{Operator::constant("A1", a1), "bath"},
                          Channel{Operator::constant("A2", a2), "bath"}};
    out.model.signature = Signature::all_plus(2);
    out.model.reservoir_betas = {{"bath", beta}};
    out.h_s = Operator::constant("H_S", hs);
    out.omegas = {omega0};
    return out;
}

}  // namespace gaugetherm
