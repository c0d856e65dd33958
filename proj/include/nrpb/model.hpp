#pragma once

#include <string>
#include <vector>

#include "nrpb/fock.hpp"

namespace nrpb {

/// Which cavity receives the coherent drive.
enum class Drive { Left, Right };

/// Direction of complete transmission selected by the optimal condition.
enum class Direction { Forward, Backward };

const char* to_string(Drive drive);
Drive drive_from_string(const std::string& name);

/// Mode slots in the (a, b, c) composite ordering.
namespace mode {
inline constexpr int a = 0;
inline constexpr int b = 1;
inline constexpr int c = 2;
} // namespace mode

/// Physical parameters of the rotating-frame model, in units of the port
/// loss rate.
struct SystemParams {
    double delta_a = 0.0;
    double delta_c = 0.0;
    double delta_b = 0.0;
    double u_a = 0.0;
    double u_c = 0.0;
    double j_ab = 0.0;
    double j_bc = 0.0;
    double j_ac = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    Drive drive = Drive::Left;
    double kappa_a = 1.0;
    double kappa_c = 1.0;
    double kappa_b = 0.0;

    /// Set all three detunings to a common value.
    void set_detuning(double delta) { delta_a = delta_c = delta_b = delta; }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// The reference working point: kappa_a = kappa_c = 1,
/// J_ab = J_bc = J_ac = sqrt(2)/2, Omega = 0.1, U_a = U_c = 5, theta = -pi/4,
/// Delta = 0.5, kappa_b = 1, driven from the left.
SystemParams reference_params();

/// Throws InvalidRate / InvalidConfig on hard violations; returns human
/// readable warnings (e.g. drive outside the weak-drive regime).
std::vector<std::string> validate(const SystemParams& params);

struct OptimalCondition {
    double delta = 0.0;      ///< probe detuning, delta = omega - omega_0
    double j_ac = 0.0;       ///< |J_ac|
    double j = 0.0;          ///< common J_ab = J_bc
    double kappa_b = 0.0;
    Direction direction = Direction::Forward;
    bool sign_folded = false;  ///< signed J_ac was negative; phase shifted by pi
    double theta = 0.0;        ///< phase to pair with |J_ac|, wrapped to (-pi, pi]
};

Operator build_hamiltonian(const SystemParams& params, const CompositeSpace& space);

/// sqrt(kappa) * mode operator for a, c and b (b omitted when kappa_b == 0).
std::vector<Operator> collapse_operators(const SystemParams& params,
                                         const CompositeSpace& space);

/// Parameter set that makes the linear network fully transmitting in the
/// requested direction for ports with equal loss `kappa`.
OptimalCondition optimal_condition(Direction direction, double theta, double kappa);

/// Copy of `base` moved onto the optimal working point: detunings set to
/// -cond.delta, couplings, phase and kappa_b replaced.
SystemParams apply(const OptimalCondition& cond, SystemParams base);

struct PhaseMatchingResidual {
    double amplitude = 0.0;
    double phase = 0.0;
};

/// Distance from the two-channel destructive-interference condition
/// J_ac |delta + i kappa_b/2| = J^2, phi -/+ theta = pi (mod 2 pi).
PhaseMatchingResidual phase_matching_residual(const SystemParams& params, double delta);

/// Wrap an angle into (-pi, pi].
double wrap_phase(double angle);

} // namespace nrpb
