#include "nrpb/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "nrpb/error.hpp"

namespace nrpb {

CMatrix effective_hamiltonian(const Operator& h, const std::vector<Operator>& ops)
{
    CMatrix heff = h.data();
    for (const auto& c : ops) {
        heff -= Complex(0.0, 0.5) * (c.data().adjoint() * c.data());
    }
    return heff;
}

namespace {

SparseCMatrix to_sparse(const CMatrix& m)
{
    return m.sparseView(Complex(0.0), 0.0);
}

SparseCMatrix sparse_identity(int n)
{
    SparseCMatrix id(n, n);
    id.setIdentity();
    return id;
}

void require_shared_space(const Operator& h, const std::vector<Operator>& ops)
{
    for (const auto& c : ops) {
        if (!(c.space() == h.space())) {
            throw Error(ErrorCode::InvalidOperands,
                        "collapse operator and Hamiltonian live on different spaces");
        }
    }
}

double max_abs(const CMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(CompositeSpace space, CMatrix data)
    : op_(std::move(space), std::move(data))
{
    const CMatrix& m = op_.data();
    const double herm = max_abs(m - m.adjoint());
    if (herm > hermiticity_tol) {
        std::ostringstream os;
        os << "density matrix is not Hermitian (max |rho - rho^dag| = " << herm << ")";
        throw Error(ErrorCode::InvalidOperands, os.str());
    }
    const double tr_err = std::abs(m.trace() - Complex(1.0));
    if (tr_err > trace_tol) {
        std::ostringstream os;
        os << "density matrix trace deviates from 1 by " << tr_err;
        throw Error(ErrorCode::InvalidOperands, os.str());
    }
    const double lo = min_eigenvalue();
    if (lo < -positivity_tol) {
        std::ostringstream os;
        os << "density matrix has negative eigenvalue " << lo;
        throw Error(ErrorCode::InvalidOperands, os.str());
    }
}

DensityMatrix DensityMatrix::fock_state(const CompositeSpace& space,
                                        const std::vector<int>& occupations)
{
    const int idx = space.index_of(occupations);
    CMatrix m = CMatrix::Zero(space.total_dim(), space.total_dim());
    m(idx, idx) = 1.0;
    return {space, std::move(m)};
}

DensityMatrix DensityMatrix::pure(const CompositeSpace& space, const CVector& psi)
{
    const CVector n = psi.normalized();
    return {space, n * n.adjoint()};
}

double DensityMatrix::min_eigenvalue() const
{
    // Symmetrize so tiny anti-Hermitian noise does not leak into the solver.
    const CMatrix h = 0.5 * (data() + data().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Superoperator

Superoperator::Superoperator(CompositeSpace space, SparseCMatrix data)
    : space_(std::move(space)), data_(std::move(data))
{
    const auto n = static_cast<Eigen::Index>(space_.total_dim()) * space_.total_dim();
    if (data_.rows() != n || data_.cols() != n) {
        throw Error(ErrorCode::InvalidDimension, "superoperator size does not match D^2");
    }
    data_.makeCompressed();
}

Superoperator::Superoperator(SparseCMatrix data, LindbladForm form)
    : Superoperator(form.hamiltonian.space(), std::move(data))
{
    form_ = std::make_shared<const LindbladForm>(std::move(form));
}

double Superoperator::trace_defect() const
{
    const int d = hilbert_dim();
    // Row vector vec(I)^dag times L, accumulated column by column.
    double acc = 0.0;
    for (Eigen::Index col = 0; col < data_.outerSize(); ++col) {
        Complex s(0.0);
        for (SparseCMatrix::InnerIterator it(data_, col); it; ++it) {
            if (it.row() % (d + 1) == 0) {
                s += it.value();
            }
        }
        acc += std::norm(s);
    }
    const double norm = data_.norm();
    return norm == 0.0 ? 0.0 : std::sqrt(acc) / norm;
}

CVector vectorize(const CMatrix& m)
{
    return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvectorize(const CVector& v, int dim)
{
    return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

Superoperator build_liouvillian(const Operator& hamiltonian,
                                const std::vector<Operator>& collapse_ops)
{
    require_shared_space(hamiltonian, collapse_ops);
    const int d = hamiltonian.dim();
    const SparseCMatrix id = sparse_identity(d);
    const SparseCMatrix h = to_sparse(hamiltonian.data());
    const SparseCMatrix ht = to_sparse(hamiltonian.data().transpose());

    SparseCMatrix l = Complex(0.0, -1.0) *
                      (SparseCMatrix(Eigen::kroneckerProduct(id, h)) -
                       SparseCMatrix(Eigen::kroneckerProduct(ht, id)));
    for (const auto& c : collapse_ops) {
        const CMatrix cdc = c.data().adjoint() * c.data();
        const SparseCMatrix cs = to_sparse(c.data());
        const SparseCMatrix cconj = to_sparse(c.data().conjugate());
        l += SparseCMatrix(Eigen::kroneckerProduct(cconj, cs));
        l -= 0.5 * SparseCMatrix(Eigen::kroneckerProduct(id, to_sparse(cdc)));
        l -= 0.5 * SparseCMatrix(Eigen::kroneckerProduct(to_sparse(cdc.transpose()), id));
    }
    l.prune(Complex(0.0), 0.0);
    return {std::move(l), Superoperator::LindbladForm{hamiltonian, collapse_ops}};
}

CMatrix lindblad_rhs(const Operator& hamiltonian, const std::vector<Operator>& collapse_ops,
                     const CMatrix& rho)
{
    require_shared_space(hamiltonian, collapse_ops);
    const CMatrix& h = hamiltonian.data();
    const Complex i(0.0, 1.0);
    CMatrix out = -i * (h * rho - rho * h);
    for (const auto& op : collapse_ops) {
        const CMatrix& c = op.data();
        const CMatrix cdc = c.adjoint() * c;
        out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Time propagation

DensityMatrix evolve(const Operator& hamiltonian, const std::vector<Operator>& collapse_ops,
                     const DensityMatrix& rho0, double t_final, double dt)
{
    if (!(dt > 0.0) || !(t_final >= dt)) {
        throw Error(ErrorCode::InvalidConfig, "evolve needs dt > 0 and t_final >= dt");
    }
    if (!(rho0.space() == hamiltonian.space())) {
        throw Error(ErrorCode::InvalidOperands, "initial state and Hamiltonian spaces differ");
    }
    require_shared_space(hamiltonian, collapse_ops);

    const Complex i(0.0, 1.0);
    const CMatrix heff = effective_hamiltonian(hamiltonian, collapse_ops);
    const CMatrix heff_dag = heff.adjoint();
    std::vector<CMatrix> jumps;
    jumps.reserve(collapse_ops.size());
    for (const auto& c : collapse_ops) {
        jumps.push_back(c.data());
    }
    auto rhs = [&](const CMatrix& r) {
        CMatrix out = -i * (heff * r - r * heff_dag);
        for (const auto& c : jumps) {
            out.noalias() += c * r * c.adjoint();
        }
        return out;
    };

    const auto steps = static_cast<long>(std::llround(t_final / dt));
    const double h = t_final / static_cast<double>(steps);
    CMatrix rho = rho0.data();
    for (long s = 0; s < steps; ++s) {
        const CMatrix k1 = rhs(rho);
        const CMatrix k2 = rhs(rho + 0.5 * h * k1);
        const CMatrix k3 = rhs(rho + 0.5 * h * k2);
        const CMatrix k4 = rhs(rho + h * k3);
        const Complex before = rho.trace();
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const Complex after = rho.trace();
        const double drift = std::abs(after - before);
        if (!std::isfinite(drift) || drift > 1e-6) {
            std::ostringstream os;
            os << "RK4 step " << s << " changed the trace by " << drift
               << "; reduce dt (currently " << h << ")";
            throw Error(ErrorCode::StepTooLarge, os.str());
        }
        if (std::abs(after - Complex(1.0)) > 1e-12) {
            rho /= after;
        }
    }
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace();
    return {rho0.space(), std::move(rho)};
}

} // namespace nrpb
