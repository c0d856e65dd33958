#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "nrpb/fock.hpp"

namespace nrpb {

using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

/// Hermitian, unit-trace, positive-semidefinite operator.
class DensityMatrix {
public:
    static constexpr double hermiticity_tol = 1e-10;
    static constexpr double trace_tol = 1e-10;
    static constexpr double positivity_tol = 1e-8;

    /// Validates all three invariants; throws InvalidOperands otherwise.
    DensityMatrix(CompositeSpace space, CMatrix data);

    /// |n><n| for the product basis state with the given occupations.
    static DensityMatrix fock_state(const CompositeSpace& space,
                                    const std::vector<int>& occupations);
    static DensityMatrix pure(const CompositeSpace& space, const CVector& psi);

    const CompositeSpace& space() const noexcept { return op_.space(); }
    const CMatrix& data() const noexcept { return op_.data(); }
    const Operator& op() const noexcept { return op_; }
    int dim() const noexcept { return op_.dim(); }

    double min_eigenvalue() const;

private:
    Operator op_;
};

/// Generator of d vec(rho)/dt = L vec(rho) under column-stacking
/// vectorization, vec(A X B) = (B^T kron A) vec(X).
class Superoperator {
public:
    /// Generator operators kept alongside the assembled matrix so solvers
    /// can work with the D x D factors instead of the D^2 x D^2 matrix.
    struct LindbladForm {
        Operator hamiltonian;
        std::vector<Operator> collapse_ops;
    };

    Superoperator(CompositeSpace space, SparseCMatrix data);
    Superoperator(SparseCMatrix data, LindbladForm form);

    /// Null when constructed from a bare matrix.
    const LindbladForm* lindblad_form() const noexcept { return form_.get(); }

    const CompositeSpace& space() const noexcept { return space_; }
    const SparseCMatrix& data() const noexcept { return data_; }
    int hilbert_dim() const noexcept { return space_.total_dim(); }
    int dim() const noexcept { return static_cast<int>(data_.rows()); }

    CVector apply(const CVector& vec_rho) const { return data_ * vec_rho; }

    /// ||vec(I)^dag L|| / ||L||_F; zero for an exactly trace-preserving L.
    double trace_defect() const;

private:
    CompositeSpace space_;
    SparseCMatrix data_;
    std::shared_ptr<const LindbladForm> form_;
};

CVector vectorize(const CMatrix& m);
CMatrix unvectorize(const CVector& v, int dim);

Superoperator build_liouvillian(const Operator& hamiltonian,
                                const std::vector<Operator>& collapse_ops);

/// H - (i/2) sum_k C_k^dag C_k
CMatrix effective_hamiltonian(const Operator& hamiltonian,
                              const std::vector<Operator>& collapse_ops);

/// Right-hand side of the master equation evaluated directly in matrix form.
CMatrix lindblad_rhs(const Operator& hamiltonian, const std::vector<Operator>& collapse_ops,
                     const CMatrix& rho);

enum class SteadyStateMethod {
    /// One population row of L replaced by the trace functional, sparse LU.
    TraceConstrainedSolve,
    /// Shifted inverse iteration towards the kernel of L, sparse LU.
    NullSpace,
    /// Trace-augmented L solved by GMRES, left-preconditioned with the
    /// inverse of the no-jump part rho -> -i (H_eff rho - rho H_eff^dag),
    /// applied through a Schur-form Sylvester solve. Needs the Lindblad form;
    /// falls back to TraceConstrainedSolve when that part is singular.
    PreconditionedKrylov,
};

const char* to_string(SteadyStateMethod method);
SteadyStateMethod steady_state_method_from_string(const std::string& name);

struct SteadyStateOptions {
    SteadyStateMethod method = SteadyStateMethod::PreconditionedKrylov;
    double residual_tol = 1e-10;
    bool hermitize = true;
    /// Relative tolerance on the preconditioned GMRES residual.
    double krylov_tol = 1e-14;
    int krylov_restart = 80;
    int krylov_max_iterations = 4000;
};

struct SteadyStateDiagnostics {
    /// ||L vec(rho)|| / (||L||_F ||vec(rho)||) after post-processing.
    double residual = 0.0;
    /// Largest entry of |rho - rho^dag| / 2 removed by hermitization.
    double hermitian_correction = 0.0;
    /// |tr(rho) - 1| before renormalization.
    double trace_correction = 0.0;
    int iterations = 0;
    SteadyStateMethod method_used = SteadyStateMethod::TraceConstrainedSolve;
};

struct SteadyState {
    DensityMatrix rho;
    SteadyStateDiagnostics diagnostics;
};

SteadyState steady_state(const Superoperator& liouvillian, const SteadyStateOptions& opts = {});

/// Fixed-step RK4 integration of the master equation in matrix form.
DensityMatrix evolve(const Operator& hamiltonian, const std::vector<Operator>& collapse_ops,
                     const DensityMatrix& rho0, double t_final, double dt);

} // namespace nrpb
