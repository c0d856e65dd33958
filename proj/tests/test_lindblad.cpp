#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nrpb/error.hpp"
#include "nrpb/lindblad.hpp"
#include "nrpb/model.hpp"
#include "nrpb/observables.hpp"

using namespace nrpb;
using testing::max_abs;

namespace {

Operator driven_cavity_h(int dim, double delta, double omega, double u = 0.0)
{
    const Operator a = annihilation(dim);
    const Operator n = number(dim);
    const Operator id = Operator::identity(a.space());
    return delta * n + u * (n * (n - id)) + Complex(omega) * (a + adjoint(a));
}

std::vector<Operator> decay(int dim, double kappa)
{
    return {std::sqrt(kappa) * annihilation(dim)};
}

CMatrix projector(int dim, int k)
{
    CMatrix p = CMatrix::Zero(dim, dim);
    p(k, k) = 1.0;
    return p;
}

Superoperator reference_liouvillian(const CompositeSpace& s, Drive drive = Drive::Left)
{
    SystemParams p = reference_params();
    p.drive = drive;
    return build_liouvillian(build_hamiltonian(p, s), collapse_operators(p, s));
}

} // namespace

TEST_CASE("vectorize_column_stacking")
{
    CMatrix m(2, 2);
    m << 1, 2, 3, 4;
    const CVector v = vectorize(m);
    CHECK(v(1) == Complex(3.0));
    CHECK(v(2) == Complex(2.0));
    CHECK(unvectorize(v, 2) == m);
}

TEST_CASE("liouvillian_zero_without_dynamics")
{
    const Operator h = Operator::zero(CompositeSpace::single(3));
    const Superoperator l = build_liouvillian(h, {});
    CHECK(l.dim() == 9);
    CHECK(l.data().norm() == 0.0);
}

TEST_CASE("liouvillian_two_level_decay")
{
    const Superoperator l = build_liouvillian(Operator::zero(CompositeSpace::single(2)), decay(2, 1.0));
    CHECK((l.apply(vectorize(projector(2, 0)))).norm() == 0.0);
    const CVector out = l.apply(vectorize(projector(2, 1)));
    CHECK((out - vectorize(projector(2, 0) - projector(2, 1))).norm() < 1e-15);
}

TEST_CASE("liouvillian_matches_matrix_form")
{
    std::mt19937 rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        const CompositeSpace s = CompositeSpace::single(3);
        const Operator h(s, testing::random_hermitian(3, rng));
        const std::vector<Operator> ops{Operator(s, testing::random_matrix(3, rng)),
                                        Operator(s, testing::random_matrix(3, rng))};
        const Superoperator l = build_liouvillian(h, ops);
        const CMatrix rho = testing::random_density(3, rng);

        // Oracle: right-hand side written out term by term.
        const Complex i(0, 1);
        CMatrix direct = -i * (h.data() * rho - rho * h.data());
        for (const auto& c : ops) {
            const CMatrix& cm = c.data();
            const CMatrix cdc = cm.adjoint() * cm;
            direct += cm * rho * cm.adjoint() - 0.5 * (cdc * rho + rho * cdc);
        }
        CHECK((l.apply(vectorize(rho)) - vectorize(direct)).norm() < 1e-12);
        CHECK(max_abs(lindblad_rhs(h, ops, rho) - direct) < 1e-12);

        // Trace of the generated motion vanishes.
        const CVector tr_row = vectorize(CMatrix::Identity(3, 3));
        CHECK(std::abs(tr_row.dot(l.apply(vectorize(rho)))) < 1e-12);
        CHECK(l.trace_defect() < 1e-10);
    }
}

TEST_CASE("liouvillian_trace_preserving_for_model")
{
    const Superoperator l = reference_liouvillian(CompositeSpace({3, 3, 3}));
    CHECK(l.trace_defect() < 1e-10);
}

TEST_CASE("liouvillian_space_mismatch")
{
    try {
        build_liouvillian(Operator::zero(CompositeSpace::single(2)), decay(3, 1.0));
        FAIL("accepted mismatched spaces");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidOperands);
    }
}

TEST_CASE("steady_state_vacuum")
{
    const Superoperator l = build_liouvillian(Operator::zero(CompositeSpace::single(4)), decay(4, 1.0));
    for (auto method : {SteadyStateMethod::TraceConstrainedSolve, SteadyStateMethod::NullSpace,
                        SteadyStateMethod::PreconditionedKrylov}) {
        SteadyStateOptions opts;
        opts.method = method;
        const SteadyState ss = steady_state(l, opts);
        CHECK(max_abs(ss.rho.data() - projector(4, 0)) < 1e-12);
    }
}

TEST_CASE("steady_state_coherent_cavity")
{
    // alpha = -i Omega / (i Delta + kappa / 2) for Delta = 0, kappa = 1, Omega = 0.1.
    const Complex expected = Complex(0, -1) * 0.1 / Complex(0.5, 0.0);
    const Superoperator l = build_liouvillian(driven_cavity_h(8, 0.0, 0.1), decay(8, 1.0));
    for (auto method : {SteadyStateMethod::TraceConstrainedSolve, SteadyStateMethod::NullSpace,
                        SteadyStateMethod::PreconditionedKrylov}) {
        SteadyStateOptions opts;
        opts.method = method;
        const SteadyState ss = steady_state(l, opts);
        const Complex a = expectation(ss.rho, annihilation(8));
        CHECK(std::abs(a - expected) < 1e-6);
        CHECK(std::abs(a - Complex(0, -0.2)) < 1e-6);
        CHECK(std::abs(expectation(ss.rho, number(8)).real() - 0.04) < 1e-6);
        CHECK(ss.diagnostics.residual < 1e-10);
    }
}

TEST_CASE("steady_state_detuned_coherent_cavity")
{
    const double delta = 0.7;
    const Complex expected = Complex(0, -1) * 0.05 / Complex(0.5, delta);
    const Superoperator l = build_liouvillian(driven_cavity_h(8, delta, 0.05), decay(8, 1.0));
    const SteadyState ss = steady_state(l);
    CHECK(std::abs(expectation(ss.rho, annihilation(8)) - expected) < 1e-8);
}

TEST_CASE("steady_state_methods_agree_on_three_modes")
{
    const Superoperator l = reference_liouvillian(CompositeSpace({3, 3, 3}), Drive::Right);
    SteadyStateOptions direct;
    direct.method = SteadyStateMethod::TraceConstrainedSolve;
    SteadyStateOptions null_space;
    null_space.method = SteadyStateMethod::NullSpace;
    const SteadyState k = steady_state(l);
    const SteadyState d = steady_state(l, direct);
    const SteadyState n = steady_state(l, null_space);
    CHECK(k.diagnostics.method_used == SteadyStateMethod::PreconditionedKrylov);
    CHECK(k.diagnostics.iterations > 0);
    CHECK((k.rho.data() - d.rho.data()).norm() < 1e-9);
    CHECK((n.rho.data() - d.rho.data()).norm() < 1e-9);
}

TEST_CASE("steady_state_invariants")
{
    const SteadyState ss = steady_state(reference_liouvillian(CompositeSpace({4, 4, 4})));
    const CMatrix& rho = ss.rho.data();
    CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-10);
    CHECK(max_abs(rho - rho.adjoint()) < 1e-10);
    CHECK(ss.rho.min_eigenvalue() > -1e-8);
    CHECK(ss.diagnostics.residual < 1e-10);
    CHECK(ss.diagnostics.hermitian_correction < 1e-8);
}

TEST_CASE("krylov_falls_back_without_drive")
{
    SystemParams p = reference_params();
    p.omega = 0.0;
    const CompositeSpace s({3, 3, 3});
    const Superoperator l = build_liouvillian(build_hamiltonian(p, s), collapse_operators(p, s));
    const SteadyState ss = steady_state(l);
    CHECK(ss.rho.data()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("steady_state_non_unique_kernel")
{
    // An undamped mode decoupled from everything: every diagonal state is stationary.
    const CompositeSpace s = CompositeSpace::single(3);
    const Superoperator l = build_liouvillian(number(3), {});
    SteadyStateOptions opts;
    opts.method = SteadyStateMethod::TraceConstrainedSolve;
    try {
        steady_state(l, opts);
        FAIL("non-unique kernel accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonUniqueSteadyState);
    }
}

TEST_CASE("steady_state_reports_residual_failure")
{
    const Superoperator l = reference_liouvillian(CompositeSpace({3, 3, 3}));
    SteadyStateOptions opts;
    opts.krylov_max_iterations = 1;
    opts.krylov_tol = 1e-14;
    opts.residual_tol = 1e-14;
    try {
        steady_state(l, opts);
        FAIL("loose solve accepted");
    } catch (const NoConvergenceError& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
        CHECK(e.residual() > 1e-14);
    }
    opts.residual_tol = 0.0;
    CHECK_THROWS_AS(steady_state(l, opts), Error);
}

TEST_CASE("krylov_needs_lindblad_form")
{
    const Superoperator bare(CompositeSpace::single(2), build_liouvillian(Operator::zero(CompositeSpace::single(2)), decay(2, 1.0)).data());
    CHECK(bare.lindblad_form() == nullptr);
    CHECK_THROWS_AS(steady_state(bare), Error);
    SteadyStateOptions opts;
    opts.method = SteadyStateMethod::TraceConstrainedSolve;
    CHECK(steady_state(bare, opts).rho.data()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("evolve_single_photon_decay")
{
    const CompositeSpace s = CompositeSpace::single(3);
    const DensityMatrix rho0 = DensityMatrix::fock_state(s, {1});
    const DensityMatrix rho = evolve(Operator::zero(s), decay(3, 1.0), rho0, 1.0, 1e-3);
    CHECK(std::abs(expectation(rho, number(3)).real() - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("evolve_undriven_system_empties")
{
    SystemParams p = reference_params();
    p.omega = 0.0;
    const CompositeSpace s({3, 3, 3});
    std::mt19937 rng(23);
    const DensityMatrix rho0(s, testing::random_density(27, rng));
    const DensityMatrix rho =
        evolve(build_hamiltonian(p, s), collapse_operators(p, s), rho0, 20.0, 0.01);
    CHECK(rho.data()(0, 0).real() > 1.0 - 1e-6);
}

TEST_CASE("evolve_errors")
{
    const CompositeSpace s = CompositeSpace::single(3);
    const DensityMatrix rho0 = DensityMatrix::fock_state(s, {1});
    CHECK_THROWS_AS(evolve(Operator::zero(s), decay(3, 1.0), rho0, 1.0, 0.0), Error);
    CHECK_THROWS_AS(evolve(Operator::zero(s), decay(3, 1.0), rho0, 1e-4, 1e-3), Error);
    try {
        evolve(Operator::zero(s), decay(3, 1e6), rho0, 1.0, 0.5);
        FAIL("unstable step accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepTooLarge);
    }
}

TEST_CASE("evolve_agrees_with_steady_state_small_truncation")
{
    SystemParams p = reference_params();
    const CompositeSpace s({3, 3, 3});
    const Operator h = build_hamiltonian(p, s);
    const auto ops = collapse_operators(p, s);
    const SteadyState ss = steady_state(build_liouvillian(h, ops));
    const DensityMatrix rho = evolve(h, ops, DensityMatrix::fock_state(s, {0, 0, 0}), 50.0, 0.01);
    CHECK((rho.data() - ss.rho.data()).norm() < 1e-5);
}

TEST_CASE("density_matrix_validation")
{
    const CompositeSpace s = CompositeSpace::single(2);
    CMatrix bad_trace = CMatrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix(s, bad_trace), Error);
    CMatrix non_hermitian = 0.5 * CMatrix::Identity(2, 2);
    non_hermitian(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(s, non_hermitian), Error);
    CMatrix negative = CMatrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(s, negative), Error);

    CVector psi(2);
    psi << 1.0, Complex(0, 1);
    const DensityMatrix pure = DensityMatrix::pure(s, psi);
    CHECK(std::abs(pure.data()(0, 1) - Complex(0, -0.5)) < 1e-15);
}

TEST_CASE("steady_state_method_names")
{
    for (auto m : {SteadyStateMethod::TraceConstrainedSolve, SteadyStateMethod::NullSpace,
                   SteadyStateMethod::PreconditionedKrylov}) {
        CHECK(steady_state_method_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(steady_state_method_from_string("lu"), Error);
}
