#include "gaugetherm/scenario.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <thread>

#include "gaugetherm/errors.hpp"
#include "gaugetherm/expression.hpp"

namespace gaugetherm {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& path) {
    if (!obj.is_object()) {
        throw SchemaError("expected an object", path);
    }
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw SchemaError("unknown key '" + key + "'", path);
        }
    }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) {
        throw SchemaError("missing key '" + key + "'", path);
    }
    return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError("expected a number", path);
    return v.get<double>();
}

Complex as_complex(const json& v, const std::string& path) {
    if (v.is_number()) return Complex{v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return Complex{v[0].get<double>(), v[1].get<double>()};
    }
    throw SchemaError("expected a number or [re, im] pair", path);
}

// Row-major matrix literal of [re, im] pairs.
CMatrix as_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw SchemaError("expected a matrix literal", path);
    const Eigen::Index dim = static_cast<Eigen::Index>(v.size());
    CMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const json& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            throw SchemaError("matrix rows must have equal length", path);
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            m(r, c) = as_complex(row[static_cast<std::size_t>(c)],
                                 path + "/" + std::to_string(r));
        }
    }
    return m;
}

ScalarFn parse_expr_at(const json& source, const std::string& path) {
    if (!source.is_string()) {
        throw SchemaError("expected an expression string", path);
    }
    try {
        return parse_scalar_expression(source.get<std::string>());
    } catch (const SchemaError& e) {
        throw SchemaError(e.what(), path);
    }
}

CMatrix builtin_matrix(const std::string& name, const json& args, Eigen::Index dim,
                       const std::string& path) {
    if (name == "identity") return CMatrix::Identity(dim, dim);
    if (name == "sigma_x") return pauli_x();
    if (name == "sigma_y") return pauli_y();
    if (name == "sigma_z") return pauli_z();
    if (name == "sigma_plus") return pauli_plus();
    if (name == "sigma_minus") return pauli_minus();
    if (name == "ladder_up") return ladder_up(dim);
    if (name == "ladder_down") return ladder_down(dim);
    if (name == "number") return number_operator(dim);
    if (name == "proj") {
        if (!args.is_array() || args.size() != 2) {
            throw SchemaError("proj needs args [m, n]", path);
        }
        try {
            return projector(dim, args[0].get<Eigen::Index>(), args[1].get<Eigen::Index>());
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what(), path);
        }
    }
    throw SchemaError("unknown operator builtin '" + name + "'", path);
}

// A term list [{op, args?, scale?}, ...] summed into one Operator.
Operator parse_operator_terms(const json& terms, Eigen::Index dim, const std::string& label,
                              const std::string& path) {
    if (!terms.is_array() || terms.empty()) {
        throw SchemaError("expected a non-empty term list", path);
    }
    std::vector<CMatrix> matrices;
    std::vector<ScalarFn> scales;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string term_path = path + "/" + std::to_string(k);
        const json& term = terms[k];
        require_keys(term, {"op", "args", "scale"}, term_path);
        const std::string op = require(term, "op", term_path).get<std::string>();
        CMatrix m = builtin_matrix(op, term.value("args", json::array()), dim, term_path);
        if (m.rows() != dim) {
            throw SchemaError("operator builtin '" + op + "' has the wrong dimension",
                              term_path);
        }
        matrices.push_back(std::move(m));
        scales.push_back(parse_expr_at(term.value("scale", json("1")), term_path + "/scale"));
    }
    return Operator(
        label, dim,
        [matrices, scales, dim](double t) {
            CMatrix out = CMatrix::Zero(dim, dim);
            for (std::size_t k = 0; k < matrices.size(); ++k) {
                out += scales[k](t) * matrices[k];
            }
            return out;
        },
        [matrices, scales, dim](double t) {
            CMatrix out = CMatrix::Zero(dim, dim);
            for (std::size_t k = 0; k < matrices.size(); ++k) {
                out += scales[k].derivative(t) * matrices[k];
            }
            return out;
        });
}

struct ModelBundle {
    std::string kind;
    MasterEquationModel model;
    std::optional<PdmParams> pdm;
    std::optional<MaserParams> maser;
    std::optional<QdbcDecayModel> qdbc;
};

ModelBundle build_model(const json& spec) {
    const std::string path = "/model";
    const std::string kind = require(spec, "kind", path).get<std::string>();
    ModelBundle bundle;
    bundle.kind = kind;

    if (kind == "pdm") {
        require_keys(spec, {"kind", "omega", "gamma", "p", "rho01"}, path);
        PdmParams params;
        params.omega = as_number(require(spec, "omega", path), path + "/omega");
        const ScalarFn gamma = parse_expr_at(require(spec, "gamma", path), path + "/gamma");
        params.gamma = [gamma](double t) { return gamma(t).real(); };
        params.p = as_number(require(spec, "p", path), path + "/p");
        params.rho01 = as_complex(require(spec, "rho01", path), path + "/rho01");
        bundle.model = build_pdm(params);
        bundle.pdm = params;
        return bundle;
    }
    if (kind == "maser") {
        require_keys(spec,
                     {"kind", "omega1", "omega2", "omega3", "epsilon", "gamma_rate",
                      "nbar_h", "nbar_c", "beta_h", "beta_c"},
                     path);
        const double w1 = as_number(require(spec, "omega1", path), path);
        const double w2 = as_number(require(spec, "omega2", path), path);
        const double w3 = as_number(require(spec, "omega3", path), path);
        const double eps = as_number(require(spec, "epsilon", path), path);
        const double rate = as_number(require(spec, "gamma_rate", path), path);
        MaserParams params;
        if (spec.contains("nbar_h") || spec.contains("nbar_c")) {
            params = MaserParams::from_occupations(
                w1, w2, w3, eps, rate, as_number(require(spec, "nbar_h", path), path),
                as_number(require(spec, "nbar_c", path), path));
        } else {
            params.omega1 = w1;
            params.omega2 = w2;
            params.omega3 = w3;
            params.epsilon = eps;
            params.gamma_rate = rate;
            params.beta_h = as_number(require(spec, "beta_h", path), path);
            params.beta_c = as_number(require(spec, "beta_c", path), path);
            params.validate();
        }
        bundle.model = build_maser(params);
        bundle.maser = params;
        return bundle;
    }
    if (kind == "resonance_fluorescence") {
        require_keys(spec, {"kind", "omega0", "omega", "rabi", "gamma_rate", "nbar",
                            "presentation"},
                     path);
        const auto pair = resonance_fluorescence_pair(
            as_number(require(spec, "omega0", path), path),
            as_number(require(spec, "omega", path), path),
            as_number(require(spec, "rabi", path), path),
            as_number(require(spec, "gamma_rate", path), path),
            as_number(require(spec, "nbar", path), path));
        const std::string which = spec.value("presentation", std::string("driven"));
        if (which == "driven") {
            bundle.model = pair.driven;
        } else if (which == "displaced") {
            bundle.model = pair.displaced;
        } else {
            throw SchemaError("presentation must be 'driven' or 'displaced'",
                              path + "/presentation");
        }
        return bundle;
    }
    if (kind == "qdbc_decay") {
        require_keys(spec, {"kind", "omega0", "beta", "gamma_rate"}, path);
        bundle.qdbc = build_qdbc_decay(as_number(require(spec, "omega0", path), path),
                                       as_number(require(spec, "beta", path), path),
                                       as_number(require(spec, "gamma_rate", path), path));
        bundle.model = bundle.qdbc->model;
        return bundle;
    }
    if (kind == "inline") {
        require_keys(spec, {"kind", "dim", "hamiltonian", "channels", "signature",
                            "reservoirs"},
                     path);
        const Eigen::Index dim = require(spec, "dim", path).get<Eigen::Index>();
        if (dim < 1 || dim > 16) throw SchemaError("dim must be in [1, 16]", path + "/dim");
        MasterEquationModel model;
        model.dim = dim;
        model.hamiltonian = parse_operator_terms(require(spec, "hamiltonian", path), dim,
                                                 "H", path + "/hamiltonian");
        const json& channels = require(spec, "channels", path);
        if (!channels.is_array()) throw SchemaError("channels must be a list", path);
        std::vector<int> signs;
        for (std::size_t k = 0; k < channels.size(); ++k) {
            const std::string cpath = path + "/channels/" + std::to_string(k);
            const json& ch = channels[k];
            require_keys(ch, {"operator", "sign", "reservoir"}, cpath);
            Operator l = parse_operator_terms(require(ch, "operator", cpath), dim,
                                              "L" + std::to_string(k + 1), cpath);
            const int sign = ch.value("sign", 1);
            if (sign != 1 && sign != -1) throw SchemaError("sign must be +-1", cpath);
            signs.push_back(sign);
            model.channels.push_back(Channel{std::move(l), ch.value("reservoir", std::string{})});
        }
        model.signature = Signature::constant(std::move(signs));
        if (spec.contains("reservoirs")) {
            for (const auto& [tag, beta] : spec.at("reservoirs").items()) {
                model.reservoir_betas[tag] = as_number(beta, path + "/reservoirs");
            }
        }
        model.validate();
        bundle.model = std::move(model);
        return bundle;
    }
    throw SchemaError("unknown model kind '" + kind + "'", path + "/kind");
}

CMatrix initial_state(const json& spec, const ModelBundle& bundle, double t0) {
    const std::string path = "/initial_state";
    if (spec.is_string()) {
        const std::string name = spec.get<std::string>();
        if (name == "maximally_mixed") {
            const Eigen::Index d = bundle.model.dim;
            return CMatrix::Identity(d, d) / static_cast<double>(d);
        }
        if (name == "pdm_initial") {
            if (!bundle.pdm) throw SchemaError("pdm_initial needs a pdm model", path);
            return pdm_initial_state(*bundle.pdm);
        }
        throw SchemaError("unknown initial state '" + name + "'", path);
    }
    if (spec.is_object()) {
        if (spec.contains("matrix")) {
            require_keys(spec, {"matrix"}, path);
            const CMatrix m = as_matrix(spec.at("matrix"), path + "/matrix");
            if (m.rows() != bundle.model.dim) {
                throw SchemaError("initial state dimension mismatch", path);
            }
            DensityMatrix::validated(m);
            return m;
        }
        if (spec.value("name", std::string{}) == "gibbs") {
            require_keys(spec, {"name", "beta"}, path);
            const double beta = as_number(require(spec, "beta", path), path + "/beta");
            const CMatrix boltzmann =
                matrix_exp_hermitian(-beta * bundle.model.hamiltonian(t0));
            return boltzmann / boltzmann.trace().real();
        }
    }
    throw SchemaError("malformed initial state", path);
}

std::vector<ScalarFn> parse_gamma_list(const json& list, Eigen::Index m,
                                       const std::string& path) {
    if (!list.is_array() || static_cast<Eigen::Index>(list.size()) != m) {
        throw SchemaError("gamma must list one expression per channel", path);
    }
    std::vector<ScalarFn> gamma;
    for (std::size_t k = 0; k < list.size(); ++k) {
        gamma.push_back(parse_expr_at(list[k], path + "/" + std::to_string(k)));
    }
    return gamma;
}

Operator parse_umatrix(const json& spec, Eigen::Index m, const std::string& path) {
    if (!spec.is_array() || static_cast<Eigen::Index>(spec.size()) != m) {
        throw SchemaError("umatrix must be an MxM expression grid", path);
    }
    std::vector<std::vector<ScalarFn>> entries;
    for (std::size_t r = 0; r < spec.size(); ++r) {
        const json& row = spec[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
            throw SchemaError("umatrix rows must have length M", path);
        }
        std::vector<ScalarFn> cells;
        for (std::size_t c = 0; c < row.size(); ++c) {
            cells.push_back(parse_expr_at(row[c], path + "/" + std::to_string(r)));
        }
        entries.push_back(std::move(cells));
    }
    return Operator("U", m, [entries, m](double t) {
        CMatrix u(m, m);
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                u(r, c) = entries[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)](t);
            }
        }
        return u;
    });
}

GaugeSpec build_gauge(const json& spec, const ModelBundle& bundle,
                      const PresetContext& context, std::size_t index) {
    const std::string path = "/gauges/" + std::to_string(index);
    const Eigen::Index m = bundle.model.channel_count();
    require_keys(spec, {"name", "gamma", "umatrix", "phi", "preset", "seed", "family", "C"},
                 path);

    if (spec.contains("preset")) {
        const std::string kind = spec.at("preset").get<std::string>();
        PresetContext ctx = context;
        if (spec.contains("seed")) {
            ctx.seed = build_gauge(spec.at("seed"), bundle, context, index);
        }
        if (kind == "minimal_dissipation") {
            return preset_gauge(PresetKind::minimal_dissipation, bundle.model, ctx);
        }
        if (kind == "energy_preserving") {
            return preset_gauge(PresetKind::energy_preserving, bundle.model, ctx);
        }
        if (kind == "power_preserving") {
            return preset_gauge(PresetKind::power_preserving, bundle.model, ctx);
        }
        if (kind == "current_preserving") {
            return preset_gauge(PresetKind::current_preserving, bundle.model, ctx);
        }
        throw SchemaError("unknown preset '" + kind + "'", path + "/preset");
    }
    if (spec.contains("family")) {
        if (!bundle.maser) throw SchemaError("gauge families need a maser model", path);
        const std::string family = spec.at("family").get<std::string>();
        const Complex c = as_complex(require(spec, "C", path), path + "/C");
        if (family == "shifting") {
            return maser_gauge_family(MaserGaugeKind::shifting, *bundle.maser, c);
        }
        if (family == "neutral") {
            return maser_gauge_family(MaserGaugeKind::neutral, *bundle.maser, c);
        }
        throw SchemaError("unknown gauge family '" + family + "'", path + "/family");
    }

    const std::string name = spec.value("name", "gauge" + std::to_string(index));
    if (name == "identity" && !spec.contains("gamma") && !spec.contains("umatrix") &&
        !spec.contains("phi")) {
        return GaugeSpec::identity(m);
    }
    std::vector<ScalarFn> gamma(static_cast<std::size_t>(m),
                                ScalarFn::constant(Complex{0.0, 0.0}));
    if (spec.contains("gamma")) gamma = parse_gamma_list(spec.at("gamma"), m, path + "/gamma");
    Operator u = m > 0 ? Operator::constant("U", CMatrix::Identity(m, m)) : Operator{};
    if (spec.contains("umatrix")) u = parse_umatrix(spec.at("umatrix"), m, path + "/umatrix");
    ScalarFn phi = ScalarFn::constant(Complex{0.0, 0.0});
    if (spec.contains("phi")) {
        phi = parse_expr_at(spec.at("phi"), path + "/phi");
    }
    return GaugeSpec(m, std::move(gamma), std::move(u), std::move(phi), name);
}

std::string sanitize(const std::string& label) {
    std::string out;
    for (char c : label) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    }
    return out.empty() ? "gauge" : out;
}

void write_lines(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw NumericalError("cannot open output file " + file.string());
    out << content;
}

std::string thermo_csv(const PathLedger& ledger, const std::vector<std::string>& tags,
                       bool entropy) {
    std::string text = "t,energy,J_total";
    const std::size_t m = ledger.samples.empty() ? 0 : ledger.samples.front().channel_currents.size();
    for (std::size_t mu = 1; mu <= m; ++mu) text += ",J_" + std::to_string(mu);
    for (const std::string& tag : tags) text += ",J_" + tag;
    text += ",P,J_dH,C_dH,P_dH,residual";
    if (entropy) text += ",S,dS_dt,Sigma,E_rate,E_thermal";
    text += "\n";

    for (std::size_t k = 0; k < ledger.samples.size(); ++k) {
        const ThermoSample& s = ledger.samples[k];
        text += format_double(s.t) + "," + format_double(s.energy) + "," +
                format_double(s.total_current);
        for (double j : s.channel_currents) text += "," + format_double(j);
        for (const std::string& tag : tags) {
            double v = 0.0;
            for (const auto& [name, value] : s.reservoir_currents) {
                if (name == tag) v = value;
            }
            text += "," + format_double(v);
        }
        text += "," + format_double(s.power) + "," + format_double(s.j_delta_h) + "," +
                format_double(s.c_delta_h) + "," + format_double(s.power_delta_h) + "," +
                format_double(s.first_law_residual);
        if (entropy) {
            const EpSample& e = ledger.ep_samples[k];
            text += "," + format_double(e.entropy) + "," + format_double(e.entropy_rate) +
                    "," + format_double(e.sigma) + "," + format_double(e.ep_rate) + "," +
                    format_double(e.thermal_ep_rate);
        }
        text += "\n";
    }
    return text;
}

std::string invariance_csv(const MasterEquationModel& model, const GaugeSpec& gauge,
                           const Trajectory& trajectory, double tol) {
    const Eigen::Index m = model.channel_count();
    std::string text = "t,dphi_dt";
    for (Eigen::Index mu = 1; mu <= m; ++mu) text += ",abs_L_" + std::to_string(mu);
    for (Eigen::Index mu = 1; mu <= m; ++mu) text += ",abs_dL_" + std::to_string(mu);
    text += ",invariant\n";
    for (Eigen::Index k = 0; k <= trajectory.steps(); ++k) {
        const double t = trajectory.time_at(k);
        const InvarianceReport report =
            invariance_report(model, t, trajectory.state(k), tol, &gauge);
        text += format_double(t) + "," + format_double(report.dphi_dt);
        for (const Complex& v : report.mean_l) text += "," + format_double(std::abs(v));
        for (const Complex& v : report.mean_dl) text += "," + format_double(std::abs(v));
        text += report.invariant ? ",1\n" : ",0\n";
    }
    return text;
}

json ledger_summary(const PathLedger& ledger) {
    json q_res = json::object();
    for (const auto& [tag, q] : ledger.heat_by_reservoir) q_res[tag] = q;
    json out{{"gauge", ledger.gauge_label},
             {"t0", ledger.t0},
             {"t1", ledger.t1},
             {"Q", ledger.heat},
             {"W", ledger.work},
             {"Q_by_reservoir", q_res},
             {"delta_energy", ledger.delta_energy},
             {"first_law_gap", ledger.first_law_gap},
             {"trace_drift", ledger.trace_drift},
             {"min_eigenvalue", ledger.min_eigenvalue_seen},
             {"cyclic", ledger.cyclic}};
    if (std::isfinite(ledger.sigma_tilde)) out["sigma_tilde"] = ledger.sigma_tilde;
    return out;
}

struct AnalysisPlan {
    bool thermo = false;
    bool entropy = false;
    std::optional<CMatrix> rho_star;
    std::optional<double> thermal_beta;
    bool invariance = false;
    double invariance_tol = 1e-9;
    std::optional<json> qdbc;
    bool machine = false;
    double period = 0.0;
    double burn_in = 20.0;
    double beta_h = 0.0;
    double beta_c = 0.0;
};

AnalysisPlan parse_analyses(const json& spec, const ModelBundle& bundle, double t0) {
    const std::string path = "/analyses";
    require_keys(spec, {"thermo", "entropy", "invariance", "qdbc", "machine"}, path);
    AnalysisPlan plan;
    plan.thermo = spec.value("thermo", false);

    if (spec.contains("entropy")) {
        const json& ent = spec.at("entropy");
        plan.entropy = true;
        if (ent.is_object()) {
            require_keys(ent, {"fixed_point", "beta"}, path + "/entropy");
            if (ent.contains("beta")) {
                plan.thermal_beta = as_number(ent.at("beta"), path + "/entropy/beta");
            }
            if (ent.contains("fixed_point")) {
                const json& fp = ent.at("fixed_point");
                if (fp.is_string() && fp.get<std::string>() == "auto") {
                    if (bundle.pdm) {
                        plan.rho_star = pdm_fixed_point(*bundle.pdm);
                    } else {
                        plan.rho_star = fixed_point(bundle.model, t0).unique().matrix;
                    }
                } else if (fp.is_array()) {
                    plan.rho_star = as_matrix(fp, path + "/entropy/fixed_point");
                } else {
                    throw SchemaError("fixed_point must be 'auto' or a matrix",
                                      path + "/entropy/fixed_point");
                }
            }
        } else if (!ent.is_boolean()) {
            throw SchemaError("entropy must be true or an object", path + "/entropy");
        } else {
            plan.entropy = ent.get<bool>();
        }
    }

    if (spec.contains("invariance")) {
        const json& inv = spec.at("invariance");
        if (inv.is_object()) {
            require_keys(inv, {"tol"}, path + "/invariance");
            plan.invariance = true;
            plan.invariance_tol = inv.value("tol", 1e-9);
        } else {
            plan.invariance = inv.get<bool>();
        }
    }

    if (spec.contains("qdbc")) {
        plan.qdbc = spec.at("qdbc");
        require_keys(*plan.qdbc, {"beta", "omegas", "h_s"}, path + "/qdbc");
    }

    if (spec.contains("machine")) {
        const json& mach = spec.at("machine");
        require_keys(mach, {"beta_h", "beta_c", "period", "burn_in"}, path + "/machine");
        plan.machine = true;
        if (bundle.maser) {
            plan.period = bundle.maser->period();
            plan.beta_h = bundle.maser->beta_h;
            plan.beta_c = bundle.maser->beta_c;
        }
        if (mach.contains("period")) plan.period = as_number(mach.at("period"), path);
        if (mach.contains("beta_h")) plan.beta_h = as_number(mach.at("beta_h"), path);
        if (mach.contains("beta_c")) plan.beta_c = as_number(mach.at("beta_c"), path);
        plan.burn_in = mach.value("burn_in", 20.0);
        if (plan.period <= 0.0) {
            throw SchemaError("machine analysis needs a positive period", path + "/machine");
        }
        if (plan.beta_h <= 0.0 || plan.beta_c <= 0.0) {
            throw SchemaError("machine analysis needs beta_h and beta_c",
                              path + "/machine");
        }
    }
    return plan;
}

json run_qdbc_analysis(const json& spec, const ModelBundle& bundle) {
    Operator h_s;
    double beta = 0.0;
    std::vector<double> omegas;
    if (bundle.qdbc) {
        h_s = bundle.qdbc->h_s;
        omegas = bundle.qdbc->omegas;
        beta = bundle.model.reservoir_betas.at("bath");
    }
    if (spec.contains("beta")) beta = spec.at("beta").get<double>();
    if (spec.contains("omegas")) omegas = spec.at("omegas").get<std::vector<double>>();
    if (spec.contains("h_s")) {
        const json& hs = spec.at("h_s");
        if (hs.is_string() && hs.get<std::string>() == "model_hamiltonian") {
            h_s = bundle.model.hamiltonian;
        } else {
            h_s = parse_operator_terms(hs, bundle.model.dim, "H_S", "/analyses/qdbc/h_s");
        }
    }
    if (!h_s.valid()) {
        throw SchemaError("qdbc analysis needs h_s", "/analyses/qdbc");
    }
    const QdbcReport report = qdbc_check(bundle.model, h_s, beta, omegas);
    json mean_a = json::array();
    for (const Complex& v : report.mean_a_at_gibbs) {
        mean_a.push_back(json::array({v.real(), v.imag()}));
    }
    return json{{"commutes_a", report.commutes_a},
                {"eigenoperator_b", report.eigenoperator_b},
                {"pairing_c", report.pairing_c},
                {"gibbs_fixed_point_residual", report.gibbs_fixed_point_residual},
                {"mean_A_at_gibbs", mean_a}};
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                      std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

nlohmann::json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file " + path.string());
    json config;
    try {
        in >> config;
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    return config;
}

void validate_config(const json& config) {
    require_keys(config,
                 {"schema", "model", "initial_state", "time", "gauges", "outputs",
                  "analyses", "sweep"},
                 "/");
    if (!config.contains("schema") || config.at("schema") != 1) {
        throw SchemaError("config must declare \"schema\": 1", "/schema");
    }
    const json& time = require(config, "time", "/");
    require_keys(time, {"t0", "t1", "steps"}, "/time");
    const double t0 = as_number(require(time, "t0", "/time"), "/time/t0");
    const double t1 = as_number(require(time, "t1", "/time"), "/time/t1");
    const auto steps = require(time, "steps", "/time").get<Eigen::Index>();
    if (t1 <= t0) throw SchemaError("t1 must exceed t0", "/time");
    if (steps < 2 || steps % 2 != 0) {
        throw SchemaError("steps must be even and >= 2", "/time/steps");
    }
    const json& outputs = require(config, "outputs", "/");
    require_keys(outputs, {"csv_path", "summary_path"}, "/outputs");

    // Build everything once; construction performs the deep validation.
    const ModelBundle bundle = build_model(require(config, "model", "/"));
    bundle.model.validate({t0, t1});
    initial_state(require(config, "initial_state", "/"), bundle, t0);
    const json& gauges = require(config, "gauges", "/");
    if (!gauges.is_array() || gauges.empty()) {
        throw SchemaError("gauges must be a non-empty list", "/gauges");
    }
    for (std::size_t k = 0; k < gauges.size(); ++k) {
        const json& g = gauges[k];
        require_keys(g, {"name", "gamma", "umatrix", "phi", "preset", "seed", "family", "C"},
                     "/gauges/" + std::to_string(k));
        if (!g.contains("preset")) {
            // Presets need the trajectory; they are validated at run time.
            PresetContext empty;
            build_gauge(g, bundle, empty, k);
        }
    }
    parse_analyses(require(config, "analyses", "/"), bundle, t0);
    if (config.contains("sweep")) {
        const json& sweep = config.at("sweep");
        require_keys(sweep, {"parameter", "values"}, "/sweep");
        const std::string pointer = require(sweep, "parameter", "/sweep").get<std::string>();
        if (pointer.empty() || pointer.front() != '/') {
            throw SchemaError("sweep parameter must be a JSON pointer", "/sweep/parameter");
        }
        const json& values = require(sweep, "values", "/sweep");
        if (!values.is_array() || values.empty()) {
            throw SchemaError("sweep values must be a non-empty list", "/sweep/values");
        }
    }
}

namespace {

RunArtifacts run_single(const json& config, const RunOptions& options,
                        const std::string& suffix) {
    validate_config(config);
    const json& time = config.at("time");
    const double t0 = time.at("t0").get<double>();
    const double t1 = time.at("t1").get<double>();
    const Eigen::Index steps = time.at("steps").get<Eigen::Index>();

    const ModelBundle bundle = build_model(config.at("model"));
    const CMatrix rho0 = initial_state(config.at("initial_state"), bundle, t0);
    const AnalysisPlan plan = parse_analyses(config.at("analyses"), bundle, t0);

    const std::string csv_prefix =
        config.at("outputs").at("csv_path").get<std::string>() + suffix;
    const std::filesystem::path summary_path =
        config.at("outputs").at("summary_path").get<std::string>() + suffix +
        (suffix.empty() ? "" : ".json");

    RunArtifacts artifacts;
    json summary{{"schema", 1}, {"model_kind", bundle.kind}};

    // Machine runs measure one period after a burn-in; anything else runs
    // the configured window directly.
    Trajectory trajectory;
    if (plan.machine) {
        CMatrix rho = rho0;
        if (plan.burn_in > 0.0) {
            const double burn_span = plan.burn_in * plan.period;
            Eigen::Index burn_steps = static_cast<Eigen::Index>(
                std::ceil(plan.burn_in * static_cast<double>(steps)));
            if (burn_steps % 2 != 0) ++burn_steps;
            if (options.log) *options.log << "burn-in over " << burn_span << " time units\n";
            const Trajectory burn = evolve(bundle.model, rho, 0.0, burn_span, burn_steps);
            rho = burn.state(burn.steps());
            trajectory = evolve(bundle.model, rho, burn_span, burn_span + plan.period, steps);
        } else {
            trajectory = evolve(bundle.model, rho, 0.0, plan.period, steps);
        }
    } else {
        trajectory = evolve(bundle.model, rho0, t0, t1, steps);
    }

    summary["trace_drift"] = trajectory.trace_drift();
    summary["min_eigenvalue"] = trajectory.min_eigenvalue_seen();
    if (!trajectory.signature_switch_times().empty()) {
        summary["signature_switches"] = trajectory.signature_switch_times();
    }

    PresetContext preset_context;
    preset_context.state_at = trajectory.state_provider();
    preset_context.t0 = trajectory.t0();

    json gauge_rows = json::array();
    const json& gauges = config.at("gauges");
    for (std::size_t k = 0; k < gauges.size(); ++k) {
        const GaugeSpec gauge = build_gauge(gauges[k], bundle, preset_context, k);
        const std::vector<double> probe_times = {trajectory.t0(),
                                                 0.5 * (trajectory.t0() + trajectory.t1()),
                                                 trajectory.t1()};
        ApplyGaugeOptions gauge_options;
        gauge_options.sample_times = probe_times;
        const GaugedModel gauged = gauge.is_identity_tag()
                                       ? identity_gauged(bundle.model)
                                       : apply_gauge(bundle.model, gauge, gauge_options);

        json row{{"gauge", gauge.label()}};
        const std::string file_tag = "_g" + std::to_string(k) + "_" + sanitize(gauge.label());

        if (plan.thermo || plan.entropy || plan.machine) {
            AccumulateOptions acc;
            acc.entropy = plan.entropy;
            acc.rho_star = plan.rho_star;
            acc.thermal_beta = plan.thermal_beta;
            if (plan.machine) {
                acc.beta_map = {{"hot", plan.beta_h}, {"cold", plan.beta_c}};
            }
            const PathLedger ledger = accumulate(gauged, trajectory, acc);
            row.update(ledger_summary(ledger));
            if (plan.machine) {
                if (ledger.cyclic) {
                    const MachineReport report =
                        machine_report(ledger, plan.beta_h, plan.beta_c);
                    row["eta"] = report.eta;
                    row["carnot_bound"] = report.carnot_bound;
                    row["sigma_tilde"] = report.sigma_tilde;
                    row["balance_residual"] = report.balance_residual;
                } else {
                    row["machine_skipped"] = "non-cyclic path";
                }
            }
            if (plan.thermo || plan.entropy) {
                const std::filesystem::path csv_file = csv_prefix + file_tag + "_thermo.csv";
                write_lines(csv_file,
                            thermo_csv(ledger, gauged.transformed.reservoir_tags(),
                                       plan.entropy));
                artifacts.csv_files.push_back(csv_file);
            }
        }

        if (plan.invariance) {
            const std::filesystem::path csv_file = csv_prefix + file_tag + "_invariance.csv";
            write_lines(csv_file, invariance_csv(bundle.model, gauge, trajectory,
                                                 plan.invariance_tol));
            artifacts.csv_files.push_back(csv_file);
            const InvarianceReport report =
                invariance_report(bundle.model, trajectory.t0(), trajectory.state(0),
                                  plan.invariance_tol, &gauge);
            row["invariant_at_t0"] = report.invariant;
        }

        gauge_rows.push_back(std::move(row));
        if (options.log) *options.log << "gauge " << gauge.label() << " done\n";
    }
    summary["gauges"] = std::move(gauge_rows);

    if (plan.qdbc) {
        summary["qdbc"] = run_qdbc_analysis(*plan.qdbc, bundle);
    }

    write_lines(summary_path, summary.dump(2) + "\n");
    artifacts.summary_file = summary_path;
    artifacts.summary = std::move(summary);
    return artifacts;
}

}  // namespace

RunArtifacts run_scenario(const json& config, const RunOptions& options) {
    return run_single(config, options, "");
}

RunArtifacts run_sweep(const json& config, const RunOptions& options) {
    validate_config(config);
    if (!config.contains("sweep")) {
        throw SchemaError("sweep requires a sweep block", "/sweep");
    }
    const std::string pointer_text = config.at("sweep").at("parameter").get<std::string>();
    const json values = config.at("sweep").at("values");
    const json::json_pointer pointer(pointer_text);

    json base = config;
    base.erase("sweep");

    struct Point {
        json summary;
        std::vector<std::filesystem::path> csv_files;
        std::exception_ptr error;
    };
    std::vector<Point> points(values.size());

    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, options.jobs);
    auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= values.size()) return;
            try {
                json point_config = base;
                point_config[pointer] = values[static_cast<std::size_t>(k)];
                RunOptions point_options = options;
                point_options.log = nullptr;  // serialized logging only
                const RunArtifacts arts =
                    run_single(point_config, point_options, "_p" + std::to_string(k));
                points[k].summary = arts.summary;
                points[k].csv_files = arts.csv_files;
            } catch (...) {
                points[k].error = std::current_exception();
            }
        }
    };
    if (jobs == 1 || values.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    json rows = json::array();
    RunArtifacts artifacts;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (points[k].error) std::rethrow_exception(points[k].error);
        rows.push_back(json{{"value", values[k]}, {"summary", points[k].summary}});
        for (const auto& f : points[k].csv_files) artifacts.csv_files.push_back(f);
        if (options.log) *options.log << "sweep point " << k << " done\n";
    }

    json summary{{"schema", 1},
                 {"sweep_parameter", pointer_text},
                 {"rows", std::move(rows)}};
    const std::filesystem::path summary_path =
        config.at("outputs").at("summary_path").get<std::string>();
    write_lines(summary_path, summary.dump(2) + "\n");
    artifacts.summary_file = summary_path;
    artifacts.summary = std::move(summary);
    return artifacts;
}

}  // namespace gaugetherm
