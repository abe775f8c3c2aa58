// Time-local master equation
//
//   d rho / dt = i [rho, H(t)] - (g_mu/2) ( {L_mu^dag L_mu, rho} - 2 L_mu rho L_mu^dag )
//
// with a diagonal +-1 signature g (possibly time-dependent) and hbar = 1.
// Provides the generators, their adjoints, the column-stacked Liouvillian
// and fixed points of autonomous snapshots.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaugetherm/errors.hpp"
#include "gaugetherm/operators.hpp"

namespace gaugetherm {

// Diagonal +-1 channel weights; negative entries mark channels that can
// break complete positivity (non-Markovian segments).
class Signature {
public:
    Signature() = default;

    static Signature constant(std::vector<int> diag);
    static Signature time_dependent(Eigen::Index size,
                                    std::function<std::vector<int>(double)> fn);
    static Signature all_plus(Eigen::Index size);

    std::vector<int> at(double t) const;
    Eigen::Index size() const noexcept { return size_; }
    bool constant_in_time() const noexcept { return constant_; }

private:
    Eigen::Index size_ = 0;
    bool constant_ = true;
    std::vector<int> diag_;
    std::function<std::vector<int>(double)> fn_;
};

struct Channel {
    Operator lindblad;
    std::string reservoir_tag;  // "hot", "cold", "env", ... or "" for untagged
};

// Validation thresholds for density matrices. Transient dips below
// -positivity_warn are recorded, below -positivity_error they throw; mixed
// signatures may legitimately dip in between.
struct DensityCheck {
    double hermiticity_tol = 1e-10;
    double trace_tol = 1e-10;
    double positivity_warn = 1e-8;
    double positivity_error = 1e-4;
};

struct DensityMatrix {
    CMatrix matrix;
    double min_eigenvalue = 0.0;
    bool positivity_warning = false;

    static DensityMatrix validated(const CMatrix& m, const DensityCheck& check = {});
    Eigen::Index dim() const { return matrix.rows(); }
};

// H(t) and L_mu(t) evaluated at one instant; the unit of work for all
// generator applications.
struct GeneratorSnapshot {
    CMatrix hamiltonian;
    std::vector<CMatrix> lindblads;
    std::vector<int> signs;
};

struct MasterEquationModel {
    Eigen::Index dim = 0;
    Operator hamiltonian;
    std::vector<Channel> channels;
    Signature signature;
    // Optional inverse temperatures per reservoir tag (units: 1/frequency).
    std::map<std::string, double> reservoir_betas;

    Eigen::Index channel_count() const { return static_cast<Eigen::Index>(channels.size()); }

    // Checks dimensions, signature length, Hermiticity of H at the sample
    // times and that every reservoir tag of a channel is declared.
    void validate(const std::vector<double>& sample_times = {0.0}) const;

    GeneratorSnapshot snapshot(double t) const;

    // Ordered list of reservoir tags as first seen over the channels.
    std::vector<std::string> reservoir_tags() const;
};

// i [rho, H]; traceless.
CMatrix unitary_generator(const GeneratorSnapshot& s, const CMatrix& rho);
CMatrix unitary_generator(const MasterEquationModel& m, double t, const CMatrix& rho);

// -(g_mu/2) ({L^dag L, rho} - 2 L rho L^dag); traceless, Hermiticity preserving.
CMatrix dissipator(const GeneratorSnapshot& s, const CMatrix& rho);
CMatrix dissipator(const MasterEquationModel& m, double t, const CMatrix& rho);

CMatrix liouvillian(const GeneratorSnapshot& s, const CMatrix& rho);
CMatrix liouvillian(const MasterEquationModel& m, double t, const CMatrix& rho);

// Adjoint dissipator: Tr(D(rho) X) = Tr(rho D+(X)) for all rho.
CMatrix adjoint_dissipator(const GeneratorSnapshot& s, const CMatrix& x);
CMatrix adjoint_dissipator(const MasterEquationModel& m, double t, const CMatrix& x);

// dim^2 x dim^2 matrix acting on stack_columns(rho).
CMatrix vectorized_liouvillian(const GeneratorSnapshot& s);
CMatrix vectorized_liouvillian(const MasterEquationModel& m, double t);

struct FixedPointResult {
    // Hermitian null-space basis; a single trace-one state when unique.
    std::vector<CMatrix> basis;
    bool degenerate = false;
    std::optional<DensityMatrix> state;

    // The unique fixed point; throws if the null space is degenerate.
    const DensityMatrix& unique() const;
};

// Null space of the autonomous snapshot at t. Eigenvalues with magnitude
// <= tol count as null. Degenerate null spaces are surfaced, never
// silently resolved.
FixedPointResult fixed_point(const MasterEquationModel& m, double t, double tol = 1e-10);

}  // namespace gaugetherm
