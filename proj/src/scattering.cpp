#include "nrpb/scattering.hpp"

#include <cmath>

#include "nrpb/error.hpp"

namespace nrpb {

LinearModel linear_model(const SystemParams& p)
{
    LinearModel m;
    m.omega_a = p.delta_a;
    m.omega_c = p.delta_c;
    m.omega_b = p.delta_b;
    m.j_ab = p.j_ab;
    m.j_bc = p.j_bc;
    m.j_ac = p.j_ac;
    m.theta = p.theta;
    m.kappa_a = p.kappa_a;
    m.kappa_c = p.kappa_c;
    m.kappa_b = p.kappa_b;
    return m;
}

Matrix3c drift_matrix(const LinearModel& m)
{
    const Complex i(0.0, 1.0);
    const Complex jac_minus = m.j_ac * std::polar(1.0, -m.theta);
    const Complex jac_plus = m.j_ac * std::polar(1.0, m.theta);
    Matrix3c d;
    d << m.omega_a - i * (m.kappa_a / 2.0), jac_minus, m.j_ab,
         jac_plus, m.omega_c - i * (m.kappa_c / 2.0), m.j_bc,
         m.j_ab, m.j_bc, m.omega_b - i * (m.kappa_b / 2.0);
    return d;
}

SMatrix scattering_matrix(const LinearModel& m, double omega, InputCoupling coupling)
{
    if (m.kappa_a < 0.0 || m.kappa_c < 0.0 || m.kappa_b < 0.0) {
        throw Error(ErrorCode::InvalidRate, "loss rates must be non-negative");
    }
    const Matrix3c shifted = drift_matrix(m) - omega * Matrix3c::Identity();
    Eigen::FullPivLU<Matrix3c> lu(shifted);
    // Threshold relative to the largest entry of M - omega.
    lu.setThreshold(1e-14);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::ResonanceSingularity,
                    "M - omega I is singular at omega = " + std::to_string(omega));
    }
    const Eigen::Vector3d gamma(m.kappa_a, m.kappa_c, m.kappa_b);
    const Eigen::Vector3cd sqrt_gamma = gamma.cwiseSqrt().cast<Complex>();
    const Eigen::Vector3cd right = coupling == InputCoupling::SqrtGamma
                                       ? sqrt_gamma
                                       : Eigen::Vector3cd(gamma.cast<Complex>());
    const Matrix3c inv = lu.inverse();
    SMatrix s;
    s.omega = omega;
    s.data = Complex(0.0, -1.0) * (sqrt_gamma.asDiagonal() * inv * right.asDiagonal());
    s.data -= Matrix3c::Identity();
    return s;
}

namespace {

void require_closed_form(const LinearModel& m)
{
    if (m.j_ab != m.j_bc) {
        throw Error(ErrorCode::UnsupportedAsymmetry, "closed form assumes J_ab == J_bc");
    }
    if (m.omega_a != m.omega_c || m.omega_a != m.omega_b) {
        throw Error(ErrorCode::UnsupportedAsymmetry,
                    "closed form assumes degenerate cavity frequencies");
    }
}

} // namespace

Complex closed_form_denominator(const LinearModel& m, double delta)
{
    require_closed_form(m);
    const Complex i(0.0, 1.0);
    const double j2 = m.j_ab * m.j_ab;
    const Complex xa = delta + i * (m.kappa_a / 2.0);
    const Complex xb = delta + i * (m.kappa_b / 2.0);
    const Complex xc = delta + i * (m.kappa_c / 2.0);
    return 2.0 * std::cos(m.theta) * j2 * m.j_ac + m.j_ac * m.j_ac * xb + j2 * xc -
           xa * (-j2 + xb * xc);
}

ClosedFormTransmission transmission_closed_form(const LinearModel& m, double delta)
{
    const Complex den = closed_form_denominator(m, delta);
    if (std::abs(den) == 0.0) {
        throw Error(ErrorCode::SingularDenominator,
                    "closed-form denominator vanishes at delta = " + std::to_string(delta));
    }
    const Complex i(0.0, 1.0);
    const double j2 = m.j_ab * m.j_ab;
    const Complex xb = delta + i * (m.kappa_b / 2.0);
    const Complex prefactor = -i * std::sqrt(m.kappa_a * m.kappa_c);
    const Complex fwd = prefactor * (j2 + std::polar(1.0, m.theta) * m.j_ac * xb) / den;
    const Complex bwd = prefactor * (j2 + std::polar(1.0, -m.theta) * m.j_ac * xb) / den;
    return {std::norm(fwd), std::norm(bwd)};
}

Matrix3c single_excitation_block(const Operator& h)
{
    const CompositeSpace& space = h.space();
    if (space.num_modes() != 3) {
        throw Error(ErrorCode::InvalidSpace, "single-excitation block needs a 3-mode space");
    }
    std::array<int, 3> index{};
    for (int p = 0; p < 3; ++p) {
        std::vector<int> occ(3, 0);
        occ[static_cast<std::size_t>(port_to_mode[static_cast<std::size_t>(p)])] = 1;
        index[static_cast<std::size_t>(p)] = space.index_of(occ);
    }
    Matrix3c block;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            block(r, c) = h(index[static_cast<std::size_t>(r)], index[static_cast<std::size_t>(c)]);
        }
    }
    return block;
}

} // namespace nrpb
