#include "gaugetherm/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

Signature Signature::constant(std::vector<int> diag) {
    Signature s;
    s.size_ = static_cast<Eigen::Index>(diag.size());
    s.constant_ = true;
    for (int v : diag) {
        if (v != 1 && v != -1) {
            throw std::invalid_argument("Signature: entries must be +1 or -1");
        }
    }
    s.diag_ = std::move(diag);
    return s;
}

Signature Signature::time_dependent(Eigen::Index size,
                                    std::function<std::vector<int>(double)> fn) {
    if (!fn) throw std::invalid_argument("Signature: missing function");
    Signature s;
    s.size_ = size;
    s.constant_ = false;
    s.fn_ = std::move(fn);
    return s;
}

Signature Signature::all_plus(Eigen::Index size) {
    return constant(std::vector<int>(static_cast<std::size_t>(size), 1));
}

std::vector<int> Signature::at(double t) const {
    if (constant_) return diag_;
    std::vector<int> d = fn_(t);
    if (static_cast<Eigen::Index>(d.size()) != size_) {
        throw std::invalid_argument("Signature: time-dependent length changed");
    }
    for (int v : d) {
        if (v != 1 && v != -1) {
            throw std::invalid_argument("Signature: entries must be +1 or -1");
        }
    }
    return d;
}

DensityMatrix DensityMatrix::validated(const CMatrix& m, const DensityCheck& check) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument("DensityMatrix: matrix must be square");
    }
    if (!m.allFinite()) {
        throw NumericalError("DensityMatrix: non-finite entries");
    }
    if ((m - m.adjoint()).norm() > check.hermiticity_tol * std::max(1.0, m.norm())) {
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    if (std::abs(m.trace() - Complex{1.0, 0.0}) > check.trace_tol) {
        throw std::invalid_argument("DensityMatrix: trace differs from one");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(m), Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -check.positivity_error) {
        throw NumericalError("DensityMatrix: eigenvalue " + std::to_string(min_eig) +
                             " below positivity error threshold");
    }
    DensityMatrix rho;
    rho.matrix = hermitize(m);
    rho.min_eigenvalue = min_eig;
    rho.positivity_warning = min_eig < -check.positivity_warn;
    return rho;
}

void MasterEquationModel::validate(const std::vector<double>& sample_times) const {
    if (dim < 1) throw std::invalid_argument("model: dim must be >= 1");
    if (!hamiltonian.valid()) throw std::invalid_argument("model: missing Hamiltonian");
    if (signature.size() != channel_count()) {
        throw std::invalid_argument("model: signature length differs from channel count");
    }
    for (const Channel& c : channels) {
        if (!c.lindblad.valid()) {
            throw std::invalid_argument("model: channel without Lindblad operator");
        }
    }
    for (const auto& [tag, beta] : reservoir_betas) {
        const auto tags = reservoir_tags();
        if (std::find(tags.begin(), tags.end(), tag) == tags.end()) {
            throw std::invalid_argument("model: reservoir beta for unused tag '" + tag + "'");
        }
        (void)beta;
    }
    for (double t : sample_times) {
        const CMatrix h = hamiltonian(t);
        if (h.rows() != dim || h.cols() != dim) {
            throw std::invalid_argument("model: Hamiltonian dimension mismatch");
        }
        if (!is_hermitian(h)) {
            throw std::invalid_argument("model: Hamiltonian not Hermitian at t=" +
                                        std::to_string(t));
        }
        for (const Channel& c : channels) {
            const CMatrix l = c.lindblad(t);
            if (l.rows() != dim || l.cols() != dim) {
                throw std::invalid_argument("model: Lindblad dimension mismatch");
            }
        }
    }
}

GeneratorSnapshot MasterEquationModel::snapshot(double t) const {
    GeneratorSnapshot s;
    s.hamiltonian = hamiltonian(t);
    s.lindblads.reserve(channels.size());
    for (const Channel& c : channels) s.lindblads.push_back(c.lindblad(t));
    s.signs = signature.at(t);
    return s;
}

std::vector<std::string> MasterEquationModel::reservoir_tags() const {
    std::vector<std::string> tags;
    for (const Channel& c : channels) {
        if (c.reservoir_tag.empty()) continue;
        if (std::find(tags.begin(), tags.end(), c.reservoir_tag) == tags.end()) {
            tags.push_back(c.reservoir_tag);
        }
    }
    return tags;
}

CMatrix unitary_generator(const GeneratorSnapshot& s, const CMatrix& rho) {
    return kImag * commutator(rho, s.hamiltonian);
}

CMatrix unitary_generator(const MasterEquationModel& m, double t, const CMatrix& rho) {
    return kImag * commutator(rho, m.hamiltonian(t));
}

CMatrix dissipator(const GeneratorSnapshot& s, const CMatrix& rho) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (std::size_t mu = 0; mu < s.lindblads.size(); ++mu) {
        const CMatrix& l = s.lindblads[mu];
        if (l.rows() != rho.rows()) {
            throw std::invalid_argument("dissipator: dimension mismatch");
        }
        const CMatrix ldl = l.adjoint() * l;
        out.noalias() += (-0.5 * s.signs[mu]) *
                         (ldl * rho + rho * ldl - 2.0 * l * rho * l.adjoint());
    }
    return out;
}

CMatrix dissipator(const MasterEquationModel& m, double t, const CMatrix& rho) {
    return dissipator(m.snapshot(t), rho);
}

CMatrix liouvillian(const GeneratorSnapshot& s, const CMatrix& rho) {
    return unitary_generator(s, rho) + dissipator(s, rho);
}

CMatrix liouvillian(const MasterEquationModel& m, double t, const CMatrix& rho) {
    return liouvillian(m.snapshot(t), rho);
}

CMatrix adjoint_dissipator(const GeneratorSnapshot& s, const CMatrix& x) {
    CMatrix out = CMatrix::Zero(x.rows(), x.cols());
    for (std::size_t mu = 0; mu < s.lindblads.size(); ++mu) {
        const CMatrix& l = s.lindblads[mu];
        if (l.rows() != x.rows()) {
            throw std::invalid_argument("adjoint_dissipator: dimension mismatch");
        }
        const CMatrix ldl = l.adjoint() * l;
        out.noalias() += (-0.5 * s.signs[mu]) *
                         (ldl * x + x * ldl - 2.0 * l.adjoint() * x * l);
    }
    return out;
}

CMatrix adjoint_dissipator(const MasterEquationModel& m, double t, const CMatrix& x) {
    return adjoint_dissipator(m.snapshot(t), x);
}

CMatrix vectorized_liouvillian(const GeneratorSnapshot& s) {
    const Eigen::Index d = s.hamiltonian.rows();
    const CMatrix id = CMatrix::Identity(d, d);
    // i[rho, H] = i(rho H - H rho) -> i (H^T kron I - I kron H)
    CMatrix lvec = kImag * (kron(s.hamiltonian.transpose(), id) - kron(id, s.hamiltonian));
    for (std::size_t mu = 0; mu < s.lindblads.size(); ++mu) {
        const CMatrix& l = s.lindblads[mu];
        const CMatrix ldl = l.adjoint() * l;
        lvec.noalias() += (-0.5 * s.signs[mu]) *
                          (kron(id, ldl) + kron(ldl.transpose(), id) -
                           2.0 * kron(l.conjugate(), l));
    }
    return lvec;
}

CMatrix vectorized_liouvillian(const MasterEquationModel& m, double t) {
    return vectorized_liouvillian(m.snapshot(t));
}

const DensityMatrix& FixedPointResult::unique() const {
    if (degenerate || !state) {
        throw NumericalError(
            "fixed_point: degenerate null space, a state must be selected by the caller");
    }
    return *state;
}

FixedPointResult fixed_point(const MasterEquationModel& m, double t, double tol) {
    const GeneratorSnapshot snap = m.snapshot(t);
    const CMatrix lvec = vectorized_liouvillian(snap);
    Eigen::ComplexEigenSolver<CMatrix> solver(lvec);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("fixed_point: eigendecomposition failed");
    }

    FixedPointResult result;
    for (Eigen::Index k = 0; k < lvec.rows(); ++k) {
        if (std::abs(solver.eigenvalues()(k)) > tol) continue;
        CMatrix cand = unstack_columns(solver.eigenvectors().col(k), m.dim);
        // The null space is closed under the adjoint; pick the Hermitian
        // combination carrying the trace.
        CMatrix herm = hermitize(cand);
        if (std::abs(herm.trace()) < 1e-12 * std::max(1.0, herm.norm())) {
            const CMatrix anti = (kImag * 0.5) * (cand.adjoint() - cand);
            if (std::abs(anti.trace()) > std::abs(herm.trace())) herm = anti;
        }
        result.basis.push_back(herm);
    }

    if (result.basis.empty()) {
        throw NumericalError("fixed_point: no null eigenvector within tolerance");
    }
    result.degenerate = result.basis.size() > 1;
    if (!result.degenerate) {
        CMatrix rho = result.basis.front();
        const Complex tr = rho.trace();
        if (std::abs(tr) < 1e-12) {
            throw NumericalError("fixed_point: traceless null vector, cannot normalize");
        }
        rho /= tr;
        rho = hermitize(rho);
        const double residual = liouvillian(snap, rho).norm();
        if (residual > 1e-9) {
            throw NumericalError("fixed_point: residual " + std::to_string(residual) +
                                 " above 1e-9");
        }
        result.state = DensityMatrix::validated(rho);
    }
    return result;
}

}  // namespace gaugetherm
