#pragma once

#include <array>
#include <utility>

#include <Eigen/Dense>

#include "nrpb/fock.hpp"
#include "nrpb/model.hpp"

namespace nrpb {

using Matrix3c = Eigen::Matrix3cd;

/// Ports of the linear network, ordered (a, c, b).
namespace port {
inline constexpr int a = 0;
inline constexpr int c = 1;
inline constexpr int b = 2;
} // namespace port

/// Composite-space mode slot (a, b, c ordering) of each port.
inline constexpr std::array<int, 3> port_to_mode{mode::a, mode::c, mode::b};

/// Linearized three-cavity network (no Kerr term, no drive).
struct LinearModel {
    double omega_a = 0.0;
    double omega_c = 0.0;
    double omega_b = 0.0;
    double j_ab = 0.0;
    double j_bc = 0.0;
    double j_ac = 0.0;
    double theta = 0.0;
    double kappa_a = 1.0;
    double kappa_c = 1.0;
    double kappa_b = 0.0;
};

/// Rotating-frame linear model of `params`: bare frequencies are the
/// detunings, so probe frequency 0 is the drive and delta = -Delta.
LinearModel linear_model(const SystemParams& params);

struct SMatrix {
    double omega = 0.0;
    Matrix3c data;  ///< S(i, j): output at port i per unit input at port j

    /// |S(c, a)|^2
    double t_fwd() const { return std::norm(data(port::c, port::a)); }
    /// |S(a, c)|^2
    double t_bwd() const { return std::norm(data(port::a, port::c)); }
};

/// Matrix multiplying the input field on the right of (M - omega)^-1.
/// Only SqrtGamma is consistent with the input-output relation; Gamma
/// reproduces the formula as printed and is kept for comparison.
enum class InputCoupling { SqrtGamma, Gamma };

/// Drift matrix M of du/dt = -i M u + sqrt(Gamma) u_in, port order (a, c, b).
Matrix3c drift_matrix(const LinearModel& model);

/// S(omega) = -i sqrt(Gamma) (M - omega)^-1 K - I with K = sqrt(Gamma) or Gamma.
SMatrix scattering_matrix(const LinearModel& model, double omega,
                          InputCoupling coupling = InputCoupling::SqrtGamma);

struct ClosedFormTransmission {
    double t_fwd = 0.0;
    double t_bwd = 0.0;
};

/// Closed-form T_{a->c}, T_{c->a} for degenerate cavities and J_ab = J_bc,
/// at probe detuning delta = omega - omega_0.
ClosedFormTransmission transmission_closed_form(const LinearModel& model, double delta);

/// Denominator D(delta) shared by both closed-form transmissions.
Complex closed_form_denominator(const LinearModel& model, double delta);

/// Block of `h` on the single-excitation states |100>, |001>, |010>
/// (a, c, b port order); `h` must live on a 3-mode space.
Matrix3c single_excitation_block(const Operator& h);

} // namespace nrpb
