#include "nrpb/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/IterativeSolvers>

#include "nrpb/error.hpp"

namespace nrpb {

const char* to_string(SteadyStateMethod method)
{
    switch (method) {
    case SteadyStateMethod::TraceConstrainedSolve: return "trace-constrained";
    case SteadyStateMethod::NullSpace: return "null-space";
    case SteadyStateMethod::PreconditionedKrylov: return "krylov";
    }
    return "unknown";
}

SteadyStateMethod steady_state_method_from_string(const std::string& name)
{
    if (name == "trace-constrained") {
        return SteadyStateMethod::TraceConstrainedSolve;
    }
    if (name == "null-space") {
        return SteadyStateMethod::NullSpace;
    }
    if (name == "krylov") {
        return SteadyStateMethod::PreconditionedKrylov;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown steady-state method '" + name + "'");
}

namespace {

using SparseLu = Eigen::UmfPackLU<SparseCMatrix>;

constexpr double infinity = std::numeric_limits<double>::infinity();

Eigen::Index population_index(int k, int d)
{
    return static_cast<Eigen::Index>(k) * (d + 1);
}

// Row of the population rho_kk whose diagonal entry in L is largest. Only
// population rows are candidates: their sum is the one linear dependency
// among the rows of a trace-preserving L.
Eigen::Index pick_population_row(const SparseCMatrix& l, int d)
{
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (int k = 0; k < d; ++k) {
        const Eigen::Index r = population_index(k, d);
        const double mag = std::abs(l.coeff(r, r));
        if (mag > best_mag) {
            best_mag = mag;
            best = r;
        }
    }
    return best;
}

SparseCMatrix with_trace_row(const SparseCMatrix& l, int d, Eigen::Index row, bool replace)
{
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(l.nonZeros()) + static_cast<std::size_t>(d));
    for (Eigen::Index col = 0; col < l.outerSize(); ++col) {
        for (SparseCMatrix::InnerIterator it(l, col); it; ++it) {
            if (!replace || it.row() != row) {
                triplets.emplace_back(it.row(), it.col(), it.value());
            }
        }
    }
    for (int k = 0; k < d; ++k) {
        triplets.emplace_back(row, population_index(k, d), Complex(1.0));
    }
    SparseCMatrix out(l.rows(), l.cols());
    out.setFromTriplets(triplets.begin(), triplets.end());
    out.makeCompressed();
    return out;
}

CVector solve_trace_constrained(const SparseCMatrix& l, int d)
{
    const Eigen::Index row = pick_population_row(l, d);
    const SparseCMatrix constrained = with_trace_row(l, d, row, true);

    SparseLu lu;
    lu.compute(constrained);
    if (lu.info() != Eigen::Success) {
        throw Error(ErrorCode::NonUniqueSteadyState,
                    "trace-constrained Liouvillian is singular; the kernel of L is "
                    "not one-dimensional");
    }
    CVector rhs = CVector::Zero(l.rows());
    rhs(row) = 1.0;
    CVector x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
        throw Error(ErrorCode::NonUniqueSteadyState,
                    "trace-constrained solve produced non-finite values; the kernel of L "
                    "is not one-dimensional");
    }
    return x;
}

CVector solve_null_space(const SparseCMatrix& l, int d, int& iterations)
{
    const Eigen::Index n = l.rows();
    const double shift = 1e-10 * std::max(1.0, l.norm());
    SparseCMatrix id(n, n);
    id.setIdentity();
    const SparseCMatrix shifted = l - shift * id;

    SparseLu lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) {
        throw NoConvergenceError("shifted Liouvillian factorization failed", infinity);
    }
    CVector x = vectorize(CMatrix::Identity(d, d)) / static_cast<double>(d);
    x.normalize();
    for (iterations = 1; iterations <= 50; ++iterations) {
        CVector next = lu.solve(x);
        if (!next.allFinite()) {
            throw NoConvergenceError("inverse iteration diverged", infinity);
        }
        next.normalize();
        // Remove the arbitrary global phase before comparing iterates.
        const Complex overlap = x.dot(next);
        if (std::abs(overlap) > 0.0) {
            next *= std::conj(overlap) / std::abs(overlap);
        }
        const double change = (next - x).norm();
        x = std::move(next);
        if (change < 1e-13) {
            return x;
        }
    }
    return x;
}

// Inverse of the no-jump generator X -> -i (H_eff X - X H_eff^dag) through
// the complex Schur form H_eff = Q T Q^dag. In the Schur basis the equation
// is T Y - Y T^dag = i Q^dag R Q with T upper triangular, solved column by
// column from the right.
class SylvesterPreconditioner {
public:
    using Scalar = Complex;

    SylvesterPreconditioner() = default;
    template <typename MatrixType>
    explicit SylvesterPreconditioner(const MatrixType&) {}

    template <typename MatrixType>
    SylvesterPreconditioner& analyzePattern(const MatrixType&) { return *this; }
    template <typename MatrixType>
    SylvesterPreconditioner& factorize(const MatrixType&) { return *this; }
    template <typename MatrixType>
    SylvesterPreconditioner& compute(const MatrixType&) { return *this; }

    Eigen::ComputationInfo info() const { return Eigen::Success; }

    /// Returns the smallest |lambda_i - conj(lambda_j)| relative to ||H_eff||;
    /// zero means the no-jump generator is singular.
    double setup(const CMatrix& heff)
    {
        Eigen::ComplexSchur<CMatrix> schur(heff);
        q_ = schur.matrixU();
        t_ = schur.matrixT();
        shifted_ = t_;
        dim_ = static_cast<int>(heff.rows());
        const CVector lambda = t_.diagonal();
        double gap = infinity;
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                gap = std::min(gap, std::abs(lambda(i) - std::conj(lambda(j))));
            }
        }
        const double scale = std::max(1.0, heff.cwiseAbs().maxCoeff());
        return gap / scale;
    }

    template <typename Rhs>
    Rhs solve(const Rhs& b) const
    {
        const Eigen::Map<const CMatrix> r(b.data(), dim_, dim_);
        const CMatrix c = Complex(0.0, 1.0) * (q_.adjoint() * r * q_);
        CMatrix y(dim_, dim_);
        CVector rhs(dim_);
        for (int j = dim_ - 1; j >= 0; --j) {
            rhs = c.col(j);
            if (j + 1 < dim_) {
                // (Y T^dag)_{:,j} picks up Y_{:,k} conj(T_{j,k}) for k > j.
                rhs.noalias() += y.rightCols(dim_ - j - 1) *
                                 t_.row(j).tail(dim_ - j - 1).adjoint();
            }
            shifted_.diagonal() = t_.diagonal().array() - std::conj(t_(j, j));
            y.col(j) = shifted_.triangularView<Eigen::Upper>().solve(rhs);
        }
        const CMatrix x = q_ * y * q_.adjoint();
        return Eigen::Map<const CVector>(x.data(), x.size());
    }

private:
    CMatrix q_;
    CMatrix t_;
    mutable CMatrix shifted_;
    int dim_ = 0;
};

struct KrylovOutcome {
    CVector x;
    int iterations = 0;
    bool singular_generator = false;
};

KrylovOutcome solve_krylov(const SparseCMatrix& l, const Superoperator::LindbladForm& form,
                           const SteadyStateOptions& opts)
{
    const int d = form.hamiltonian.dim();
    KrylovOutcome out;

    // Row of the vacuum population augmented with the trace functional:
    // (L + e_0 tr^T) x = e_0 is nonsingular whenever the kernel of L is 1-D.
    const Eigen::Index row = population_index(0, d);
    const SparseCMatrix augmented = with_trace_row(l, d, row, false);

    Eigen::GMRES<SparseCMatrix, SylvesterPreconditioner> gmres;
    const double gap = gmres.preconditioner().setup(
        effective_hamiltonian(form.hamiltonian, form.collapse_ops));
    if (gap < 1e-12) {
        out.singular_generator = true;
        return out;
    }
    gmres.set_restart(opts.krylov_restart);
    gmres.setMaxIterations(opts.krylov_max_iterations);
    gmres.setTolerance(opts.krylov_tol);
    gmres.compute(augmented);

    CVector rhs = CVector::Zero(l.rows());
    rhs(row) = 1.0;
    // Start from the vacuum: the exact answer for vanishing drive.
    CVector guess = CVector::Zero(l.rows());
    guess(row) = 1.0;
    out.x = gmres.solveWithGuess(rhs, guess);
    out.iterations = static_cast<int>(gmres.iterations());
    if (!out.x.allFinite()) {
        throw NoConvergenceError("GMRES produced non-finite values", infinity);
    }
    return out;
}

double max_abs(const CMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace

SteadyState steady_state(const Superoperator& liouvillian, const SteadyStateOptions& opts)
{
    if (!(opts.residual_tol > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "residual_tol must be positive");
    }
    const int d = liouvillian.hilbert_dim();
    const SparseCMatrix& l = liouvillian.data();

    SteadyStateDiagnostics diag;
    diag.method_used = opts.method;
    CVector x;
    switch (opts.method) {
    case SteadyStateMethod::TraceConstrainedSolve:
        x = solve_trace_constrained(l, d);
        diag.iterations = 1;
        break;
    case SteadyStateMethod::NullSpace:
        x = solve_null_space(l, d, diag.iterations);
        break;
    case SteadyStateMethod::PreconditionedKrylov: {
        const auto* form = liouvillian.lindblad_form();
        if (form == nullptr) {
            throw Error(ErrorCode::InvalidOperands,
                        "Krylov steady-state solver needs a Liouvillian built from H and "
                        "collapse operators");
        }
        KrylovOutcome k = solve_krylov(l, *form, opts);
        if (k.singular_generator) {
            diag.method_used = SteadyStateMethod::TraceConstrainedSolve;
            x = solve_trace_constrained(l, d);
            diag.iterations = 1;
        } else {
            x = std::move(k.x);
            diag.iterations = k.iterations;
        }
        break;
    }
    }

    CMatrix rho = unvectorize(x, d);
    const Complex tr = rho.trace();
    if (!(std::abs(tr) > 0.0) || !std::isfinite(std::abs(tr))) {
        throw NoConvergenceError("steady-state candidate has zero trace", infinity);
    }
    diag.trace_correction = std::abs(tr - Complex(1.0));
    rho /= tr;
    if (opts.hermitize) {
        const CMatrix herm = 0.5 * (rho + rho.adjoint());
        diag.hermitian_correction = max_abs(rho - herm);
        rho = herm;
        rho /= rho.trace();
    }

    const CVector v = vectorize(rho);
    const double l_norm = l.norm();
    const double res_abs = (l * v).norm();
    diag.residual = l_norm == 0.0 ? res_abs : res_abs / (l_norm * v.norm());
    if (!(diag.residual <= opts.residual_tol)) {
        std::ostringstream os;
        os << "steady-state residual " << diag.residual << " above tolerance "
           << opts.residual_tol << " (" << to_string(diag.method_used) << ", "
           << diag.iterations << " iterations)";
        throw NoConvergenceError(os.str(), diag.residual);
    }
    return {DensityMatrix(liouvillian.space(), std::move(rho)), diag};
}

} // namespace nrpb
