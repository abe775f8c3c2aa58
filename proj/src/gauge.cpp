#include "gaugetherm/gauge.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

namespace {

// Deterministic probe states for the invariance self-check.
CMatrix probe_state(Eigen::Index dim, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    CMatrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            a(i, j) = Complex{dist(rng), dist(rng)};
        }
    }
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace();
    return rho;
}

// (U L)_mu at time t for all mu.
std::vector<CMatrix> mixed_lindblads(const GaugeSpec& gauge,
                                     const GeneratorSnapshot& snap, double t) {
    const Eigen::Index m = gauge.channel_count();
    const Eigen::Index d = snap.hamiltonian.rows();
    const CMatrix u = gauge.umatrix(t);
    std::vector<CMatrix> w(static_cast<std::size_t>(m), CMatrix::Zero(d, d));
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        for (Eigen::Index nu = 0; nu < m; ++nu) {
            w[mu].noalias() += u(mu, nu) * snap.lindblads[nu];
        }
    }
    return w;
}

}  // namespace

GaugeSpec::GaugeSpec(Eigen::Index channel_count, std::vector<ScalarFn> gamma,
                     Operator umatrix, ScalarFn phi, std::string label)
    : m_(channel_count),
      gamma_(std::move(gamma)),
      umatrix_(std::move(umatrix)),
      phi_(std::move(phi)),
      label_(std::move(label)) {
    if (m_ < 0) throw std::invalid_argument("GaugeSpec: negative channel count");
    if (static_cast<Eigen::Index>(gamma_.size()) != m_) {
        throw std::invalid_argument("GaugeSpec: gamma length differs from channel count");
    }
    if (m_ > 0 && !umatrix_.valid()) {
        throw std::invalid_argument("GaugeSpec: missing U matrix");
    }
    if (!phi_.valid()) phi_ = ScalarFn::constant(Complex{0.0, 0.0});
}

GaugeSpec GaugeSpec::identity(Eigen::Index channel_count) {
    std::vector<ScalarFn> gamma(static_cast<std::size_t>(channel_count),
                                ScalarFn::constant(Complex{0.0, 0.0}));
    Operator u;
    if (channel_count > 0) {
        u = Operator::constant("U", CMatrix::Identity(channel_count, channel_count));
    }
    GaugeSpec g(channel_count, std::move(gamma), std::move(u),
                ScalarFn::constant(Complex{0.0, 0.0}), "identity");
    g.identity_tag_ = true;
    return g;
}

Complex GaugeSpec::gamma(Eigen::Index mu, double t) const {
    return gamma_[static_cast<std::size_t>(mu)](t);
}

Complex GaugeSpec::gamma_derivative(Eigen::Index mu, double t) const {
    return gamma_[static_cast<std::size_t>(mu)].derivative(t);
}

CMatrix GaugeSpec::umatrix(double t) const {
    if (m_ == 0) return CMatrix(0, 0);
    return umatrix_(t);
}

CMatrix GaugeSpec::umatrix_derivative(double t) const {
    if (m_ == 0) return CMatrix(0, 0);
    return umatrix_.derivative(t);
}

double GaugeSpec::phi(double t) const {
    const Complex v = phi_(t);
    return v.real();
}

double GaugeSpec::phi_derivative(double t) const { return phi_.derivative(t).real(); }

double pseudo_unitarity_residual(const GaugeSpec& gauge, const Signature& signature,
                                 double t) {
    const Eigen::Index m = gauge.channel_count();
    if (m == 0) return 0.0;
    const std::vector<int> signs = signature.at(t);
    Eigen::VectorXcd g(m);
    for (Eigen::Index i = 0; i < m; ++i) g(i) = static_cast<double>(signs[i]);
    const CMatrix u = gauge.umatrix(t);
    const CMatrix gm = g.asDiagonal();
    return (u.adjoint() * gm * u - gm).norm();
}

void validate_gauge(const GaugeSpec& gauge, const Signature& signature,
                    const std::vector<double>& sample_times, double tol) {
    if (gauge.channel_count() != signature.size()) {
        throw SchemaError("gauge: channel count differs from model");
    }
    for (double t : sample_times) {
        const double r = pseudo_unitarity_residual(gauge, signature, t);
        if (r > tol) {
            throw SchemaError("gauge: pseudo-unitarity residual " + std::to_string(r) +
                              " at t=" + std::to_string(t));
        }
    }
}

CMatrix delta_H(const GaugeSpec& gauge, const MasterEquationModel& model, double t) {
    if (gauge.channel_count() != model.channel_count()) {
        throw std::invalid_argument("delta_H: gauge/model channel count mismatch");
    }
    const GeneratorSnapshot snap = model.snapshot(t);
    const std::vector<CMatrix> w = mixed_lindblads(gauge, snap, t);
    CMatrix dh = gauge.phi(t) * CMatrix::Identity(model.dim, model.dim);
    for (Eigen::Index mu = 0; mu < gauge.channel_count(); ++mu) {
        const Complex gm = gauge.gamma(mu, t);
        const double sign = static_cast<double>(snap.signs[static_cast<std::size_t>(mu)]);
        dh += (sign / (2.0 * kImag)) *
              (gm * w[static_cast<std::size_t>(mu)].adjoint() -
               std::conj(gm) * w[static_cast<std::size_t>(mu)]);
    }
    return dh;
}

CMatrix delta_H_derivative(const GaugeSpec& gauge, const MasterEquationModel& model,
                           double t) {
    const Eigen::Index m = gauge.channel_count();
    const Eigen::Index d = model.dim;
    const GeneratorSnapshot snap = model.snapshot(t);
    const CMatrix u = gauge.umatrix(t);
    const CMatrix udot = gauge.umatrix_derivative(t);
    std::vector<CMatrix> ldot;
    ldot.reserve(model.channels.size());
    for (const Channel& c : model.channels) ldot.push_back(c.lindblad.derivative(t));

    CMatrix dh = gauge.phi_derivative(t) * CMatrix::Identity(d, d);
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        CMatrix w = CMatrix::Zero(d, d);
        CMatrix wdot = CMatrix::Zero(d, d);
        for (Eigen::Index nu = 0; nu < m; ++nu) {
            w.noalias() += u(mu, nu) * snap.lindblads[static_cast<std::size_t>(nu)];
            wdot.noalias() += udot(mu, nu) * snap.lindblads[static_cast<std::size_t>(nu)] +
                              u(mu, nu) * ldot[static_cast<std::size_t>(nu)];
        }
        const Complex gm = gauge.gamma(mu, t);
        const Complex gmdot = gauge.gamma_derivative(mu, t);
        const double sign = static_cast<double>(snap.signs[static_cast<std::size_t>(mu)]);
        dh += (sign / (2.0 * kImag)) *
              (gmdot * w.adjoint() + gm * wdot.adjoint() -
               std::conj(gmdot) * w - std::conj(gm) * wdot);
    }
    return dh;
}

GaugedModel apply_gauge(const MasterEquationModel& model, const GaugeSpec& gauge,
                        const ApplyGaugeOptions& options) {
    model.validate({options.sample_times.empty() ? 0.0 : options.sample_times.front()});
    validate_gauge(gauge, model.signature, options.sample_times,
                   options.pseudo_unitarity_tol);

    MasterEquationModel out;
    out.dim = model.dim;
    out.signature = model.signature;
    out.reservoir_betas = model.reservoir_betas;

    const Operator base_h = model.hamiltonian;
    out.hamiltonian = Operator(
        base_h.label().empty() ? "H'" : base_h.label() + "'", model.dim,
        [base_h, gauge, model](double t) { return CMatrix(base_h(t) + delta_H(gauge, model, t)); },
        [base_h, gauge, model](double t) {
            return CMatrix(base_h.derivative(t) + delta_H_derivative(gauge, model, t));
        });

    const Eigen::Index m = model.channel_count();
    out.channels.reserve(model.channels.size());
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        const std::string label = model.channels[static_cast<std::size_t>(mu)].lindblad.label();
        Operator lp(
            label.empty() ? "L'" : label + "'", model.dim,
            [model, gauge, mu](double t) {
                const Eigen::Index d = model.dim;
                const CMatrix u = gauge.umatrix(t);
                CMatrix w = CMatrix::Zero(d, d);
                for (Eigen::Index nu = 0; nu < model.channel_count(); ++nu) {
                    w.noalias() += u(mu, nu) * model.channels[static_cast<std::size_t>(nu)].lindblad(t);
                }
                w -= gauge.gamma(mu, t) * CMatrix::Identity(d, d);
                return w;
            },
            [model, gauge, mu](double t) {
                const Eigen::Index d = model.dim;
                const CMatrix u = gauge.umatrix(t);
                const CMatrix udot = gauge.umatrix_derivative(t);
                CMatrix w = CMatrix::Zero(d, d);
                for (Eigen::Index nu = 0; nu < model.channel_count(); ++nu) {
                    const auto& ch = model.channels[static_cast<std::size_t>(nu)].lindblad;
                    w.noalias() += udot(mu, nu) * ch(t) + u(mu, nu) * ch.derivative(t);
                }
                w -= gauge.gamma_derivative(mu, t) * CMatrix::Identity(d, d);
                return w;
            });
        out.channels.push_back(
            Channel{std::move(lp), model.channels[static_cast<std::size_t>(mu)].reservoir_tag});
    }

    // Generator invariance is the defining property; a residual above
    // tolerance means the gauge or the transform machinery is broken.
    std::mt19937 rng(0x5eed);
    for (double t : options.sample_times) {
        const GeneratorSnapshot sb = model.snapshot(t);
        const GeneratorSnapshot st = out.snapshot(t);
        for (int k = 0; k < options.invariance_probes; ++k) {
            const CMatrix rho = probe_state(model.dim, rng);
            const CMatrix base_l = liouvillian(sb, rho);
            const double r = (liouvillian(st, rho) - base_l).norm();
            if (r > options.invariance_tol * std::max(1.0, base_l.norm())) {
                throw CrossCheckError("apply_gauge: generator invariance residual " +
                                      std::to_string(r) + " at t=" + std::to_string(t));
            }
        }
    }

    return GaugedModel{model, gauge, std::move(out)};
}

GaugedModel identity_gauged(const MasterEquationModel& model) {
    return GaugedModel{model, GaugeSpec::identity(model.channel_count()), model};
}

GaugeSpec compose(const GaugeSpec& outer, const GaugeSpec& inner,
                  const Signature& signature) {
    if (outer.channel_count() != inner.channel_count() ||
        outer.channel_count() != signature.size()) {
        throw std::invalid_argument("compose: channel count mismatch");
    }
    const Eigen::Index m = outer.channel_count();

    std::vector<ScalarFn> gamma;
    gamma.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        gamma.emplace_back(
            [outer, inner, mu, m](double t) {
                Complex v = outer.gamma(mu, t);
                const CMatrix u2 = outer.umatrix(t);
                for (Eigen::Index nu = 0; nu < m; ++nu) {
                    v += u2(mu, nu) * inner.gamma(nu, t);
                }
                return v;
            },
            [outer, inner, mu, m](double t) {
                Complex v = outer.gamma_derivative(mu, t);
                const CMatrix u2 = outer.umatrix(t);
                const CMatrix u2dot = outer.umatrix_derivative(t);
                for (Eigen::Index nu = 0; nu < m; ++nu) {
                    v += u2dot(mu, nu) * inner.gamma(nu, t) +
                         u2(mu, nu) * inner.gamma_derivative(nu, t);
                }
                return v;
            });
    }

    Operator u;
    if (m > 0) {
        u = Operator(
            "U''U'", m,
            [outer, inner](double t) { return CMatrix(outer.umatrix(t) * inner.umatrix(t)); },
            [outer, inner](double t) {
                return CMatrix(outer.umatrix_derivative(t) * inner.umatrix(t) +
                               outer.umatrix(t) * inner.umatrix_derivative(t));
            });
    }

    // phi = phi' + phi'' + Im(gamma''^* g U'' gamma'), pointwise in t.
    auto cross = [outer, inner, signature, m](double t) {
        const std::vector<int> signs = signature.at(t);
        const CMatrix u2 = outer.umatrix(t);
        Complex z{0.0, 0.0};
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            Complex ug{0.0, 0.0};
            for (Eigen::Index nu = 0; nu < m; ++nu) ug += u2(mu, nu) * inner.gamma(nu, t);
            z += static_cast<double>(signs[static_cast<std::size_t>(mu)]) *
                 std::conj(outer.gamma(mu, t)) * ug;
        }
        return z.imag();
    };
    ScalarFn phi(
        [outer, inner, cross](double t) {
            return Complex{inner.phi(t) + outer.phi(t) + cross(t), 0.0};
        });

    return GaugeSpec(m, std::move(gamma), std::move(u), std::move(phi),
                     outer.label() + "*" + inner.label());
}

namespace {

Eigen::VectorXcd gamma_seed(const PresetContext& context, Eigen::Index m, double t) {
    Eigen::VectorXcd g0 = Eigen::VectorXcd::Zero(m);
    if (context.seed) {
        for (Eigen::Index mu = 0; mu < m; ++mu) g0(mu) = context.seed->gamma(mu, t);
    } else if (m > 0) {
        g0(0) = Complex{1.0, 0.0};
    }
    return g0;
}

CMatrix u_of(const PresetContext& context, Eigen::Index m, double t) {
    if (context.seed) return context.seed->umatrix(t);
    return CMatrix::Identity(m, m);
}

Operator u_operator(const PresetContext& context, Eigen::Index m) {
    if (context.seed) {
        const GaugeSpec seed = *context.seed;
        return Operator("U", m, [seed](double t) { return seed.umatrix(t); },
                        [seed](double t) { return seed.umatrix_derivative(t); });
    }
    return Operator::constant("U", CMatrix::Identity(m, m));
}

// <d/dt dH_0> along the trajectory for a gamma/U pair with phi = 0.
double mean_delta_h_dot(const GaugeSpec& gauge, const MasterEquationModel& model,
                        const PresetContext& context, double t) {
    const CMatrix rho = context.state_at(t);
    return real_expectation(delta_H_derivative(gauge, model, t), rho, 1e-9);
}

}  // namespace

GaugeSpec preset_gauge(PresetKind kind, const MasterEquationModel& model,
                       const PresetContext& context) {
    const Eigen::Index m = model.channel_count();

    if (kind == PresetKind::minimal_dissipation) {
        const double dim = static_cast<double>(model.dim);
        std::vector<ScalarFn> gamma;
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            const Operator l = model.channels[static_cast<std::size_t>(mu)].lindblad;
            gamma.emplace_back([l, dim](double t) { return Complex(l(t).trace()) / dim; },
                               [l, dim](double t) { return Complex(l.derivative(t).trace()) / dim; });
        }
        return GaugeSpec(m, std::move(gamma),
                         Operator::constant("U", CMatrix::Identity(m, m)),
                         ScalarFn::constant(Complex{0.0, 0.0}), "minimal_dissipation");
    }

    if (!context.state_at) {
        throw SchemaError("preset_gauge: this preset needs rho(t) from a trajectory");
    }
    const auto state_at = context.state_at;

    if (kind == PresetKind::energy_preserving) {
        std::vector<ScalarFn> gamma;
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            gamma.emplace_back([model, context, state_at, mu, m](double t) {
                const CMatrix rho = state_at(t);
                const CMatrix u = u_of(context, m, t);
                Complex v{0.0, 0.0};
                for (Eigen::Index nu = 0; nu < m; ++nu) {
                    v += u(mu, nu) *
                         expectation(model.channels[static_cast<std::size_t>(nu)].lindblad(t), rho);
                }
                return v;
            });
        }
        return GaugeSpec(m, std::move(gamma), u_operator(context, m),
                         ScalarFn::constant(Complex{0.0, 0.0}), "energy_preserving");
    }

    if (kind == PresetKind::power_preserving) {
        if (!context.seed) {
            throw SchemaError("preset_gauge: power_preserving needs a seed gauge");
        }
        const GaugeSpec seed = *context.seed;
        std::vector<ScalarFn> gamma;
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            gamma.emplace_back([seed, mu](double t) { return seed.gamma(mu, t); },
                               [seed, mu](double t) { return seed.gamma_derivative(mu, t); });
        }
        // phi(t) = -int_{t0}^t <d dH_0/dtau> dtau; the integrand itself is the
        // analytic derivative, so P' = P holds exactly.
        GaugeSpec bare(m, gamma, u_operator(context, m),
                       ScalarFn::constant(Complex{0.0, 0.0}), "seed");
        const double t0 = context.t0;
        auto integrand = [bare, model, context](double t) {
            return mean_delta_h_dot(bare, model, context, t);
        };
        ScalarFn phi(
            [integrand, t0](double t) {
                const double span = t - t0;
                if (span == 0.0) return Complex{0.0, 0.0};
                int n = std::max(16, static_cast<int>(std::ceil(std::abs(span) / 0.01)));
                if (n % 2 != 0) ++n;
                const double h = span / n;
                double sum = integrand(t0) + integrand(t);
                for (int k = 1; k < n; ++k) {
                    sum += (k % 2 == 1 ? 4.0 : 2.0) * integrand(t0 + k * h);
                }
                return Complex{-sum * h / 3.0, 0.0};
            },
            [integrand](double t) { return Complex{-integrand(t), 0.0}; });
        return GaugeSpec(m, std::move(gamma), u_operator(context, m), std::move(phi),
                         "power_preserving");
    }

    if (kind == PresetKind::current_preserving) {
        auto project = [model, context, m, state_at](double t) {
            const GeneratorSnapshot snap = model.snapshot(t);
            const CMatrix rho = state_at(t);
            const CMatrix drho = liouvillian(snap, rho);
            const CMatrix u = u_of(context, m, t);
            Eigen::VectorXcd w(m);
            for (Eigen::Index mu = 0; mu < m; ++mu) {
                Complex v{0.0, 0.0};
                for (Eigen::Index nu = 0; nu < m; ++nu) {
                    v += u(mu, nu) * (snap.lindblads[static_cast<std::size_t>(nu)] * drho).trace();
                }
                w(mu) = v;
            }
            Eigen::VectorXcd g0 = gamma_seed(context, m, t);
            Complex g0w{0.0, 0.0}, ww{0.0, 0.0};
            for (Eigen::Index mu = 0; mu < m; ++mu) {
                const double s = static_cast<double>(snap.signs[static_cast<std::size_t>(mu)]);
                g0w += s * std::conj(g0(mu)) * w(mu);
                ww += s * std::conj(w(mu)) * w(mu);
            }
            if (std::abs(ww) < 1e-14 * std::max(1.0, w.squaredNorm())) {
                if (std::abs(g0w) > 1e-12) {
                    throw NumericalError(
                        "preset_gauge: g-null current vector, cannot project the seed");
                }
                return g0;
            }
            return Eigen::VectorXcd(g0 - (std::conj(g0w) / ww) * w);
        };

        std::vector<ScalarFn> gamma;
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            gamma.emplace_back([project, mu](double t) { return project(t)(mu); });
        }
        // phi keeps <dH> = 0 pointwise, as in the energy-preserving choice.
        GaugeSpec bare(m, gamma, u_operator(context, m),
                       ScalarFn::constant(Complex{0.0, 0.0}), "bare");
        ScalarFn phi([bare, model, state_at](double t) {
            const CMatrix rho = state_at(t);
            const Complex v = expectation(delta_H(bare, model, t), rho);
            return Complex{-v.real(), 0.0};
        });
        return GaugeSpec(m, std::move(gamma), u_operator(context, m), std::move(phi),
                         "current_preserving");
    }

    throw std::invalid_argument("preset_gauge: unknown preset kind");
}

}  // namespace gaugetherm
