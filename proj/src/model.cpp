#include "nrpb/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nrpb/error.hpp"

namespace nrpb {

using std::numbers::pi;

const char* to_string(Drive drive)
{
    return drive == Drive::Left ? "left" : "right";
}

Drive drive_from_string(const std::string& name)
{
    if (name == "left" || name == "Left" || name == "a") {
        return Drive::Left;
    }
    if (name == "right" || name == "Right" || name == "c") {
        return Drive::Right;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown drive '" + name + "'");
}

SystemParams reference_params()
{
    SystemParams p;
    p.set_detuning(0.5);
    p.u_a = p.u_c = 5.0;
    p.j_ab = p.j_bc = p.j_ac = std::sqrt(2.0) / 2.0;
    p.theta = -pi / 4.0;
    p.omega = 0.1;
    p.kappa_a = p.kappa_c = p.kappa_b = 1.0;
    p.drive = Drive::Left;
    return p;
}

std::vector<std::string> validate(const SystemParams& p)
{
    if (!(p.kappa_a > 0.0) || !(p.kappa_c > 0.0)) {
        throw Error(ErrorCode::InvalidRate, "kappa_a and kappa_c must be positive");
    }
    if (p.kappa_b < 0.0) {
        throw Error(ErrorCode::InvalidRate, "kappa_b must be non-negative");
    }
    if (p.j_ab < 0.0 || p.j_bc < 0.0 || p.j_ac < 0.0) {
        throw Error(ErrorCode::InvalidConfig, "coupling strengths must be non-negative");
    }
    if (p.omega < 0.0) {
        throw Error(ErrorCode::InvalidConfig, "drive amplitude must be non-negative");
    }
    const double values[] = {p.delta_a, p.delta_b, p.delta_c, p.u_a, p.u_c,
                             p.j_ab,    p.j_bc,    p.j_ac,    p.theta, p.omega,
                             p.kappa_a, p.kappa_b, p.kappa_c};
    if (!std::all_of(std::begin(values), std::end(values),
                     [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorCode::InvalidConfig, "parameters must be finite");
    }

    std::vector<std::string> warnings;
    const double weak_limit = 0.5 * std::min(p.kappa_a, p.kappa_c);
    if (p.omega > weak_limit) {
        std::ostringstream os;
        os << "omega = " << p.omega << " exceeds the weak-drive threshold " << weak_limit;
        warnings.push_back(os.str());
    }
    return warnings;
}

namespace {

void require_three_modes(const CompositeSpace& space)
{
    if (space.num_modes() != 3) {
        throw Error(ErrorCode::InvalidSpace,
                    "three-cavity model needs a 3-mode space, got " +
                        std::to_string(space.num_modes()));
    }
}

} // namespace

Operator build_hamiltonian(const SystemParams& p, const CompositeSpace& space)
{
    require_three_modes(space);
    const Operator a = embed(annihilation(space.mode_dim(mode::a)), mode::a, space);
    const Operator b = embed(annihilation(space.mode_dim(mode::b)), mode::b, space);
    const Operator c = embed(annihilation(space.mode_dim(mode::c)), mode::c, space);
    const Operator na = embed(number(space.mode_dim(mode::a)), mode::a, space);
    const Operator nb = embed(number(space.mode_dim(mode::b)), mode::b, space);
    const Operator nc = embed(number(space.mode_dim(mode::c)), mode::c, space);
    const Operator id = Operator::identity(space);

    // a^dag a^dag a a == n (n - 1), built from the diagonal so it is exact.
    Operator h = p.delta_a * na + p.delta_c * nc + p.delta_b * nb
               + p.u_a * (na * (na - id)) + p.u_c * (nc * (nc - id));

    const Complex phase = std::polar(1.0, p.theta);
    const Operator hopping = (p.j_ac * phase) * (a * adjoint(c))
                           + Complex(p.j_ab) * (a * adjoint(b))
                           + Complex(p.j_bc) * (c * adjoint(b));
    h += hopping;
    h += adjoint(hopping);

    const Operator& d = p.drive == Drive::Left ? a : c;
    h += Complex(p.omega) * (d + adjoint(d));
    return h;
}

std::vector<Operator> collapse_operators(const SystemParams& p, const CompositeSpace& space)
{
    require_three_modes(space);
    if (p.kappa_a < 0.0 || p.kappa_c < 0.0 || p.kappa_b < 0.0) {
        throw Error(ErrorCode::InvalidRate, "loss rates must be non-negative");
    }
    std::vector<Operator> ops;
    auto add = [&](double kappa, int slot) {
        if (kappa == 0.0) {
            return;
        }
        ops.push_back(std::sqrt(kappa) *
                      embed(annihilation(space.mode_dim(slot)), slot, space));
    };
    add(p.kappa_a, mode::a);
    add(p.kappa_c, mode::c);
    add(p.kappa_b, mode::b);
    return ops;
}

double wrap_phase(double angle)
{
    double w = std::remainder(angle, 2.0 * pi);
    if (w <= -pi) {
        w += 2.0 * pi;
    }
    return w;
}

OptimalCondition optimal_condition(Direction direction, double theta, double kappa)
{
    if (!(kappa > 0.0)) {
        throw Error(ErrorCode::InvalidRate, "optimal condition needs kappa > 0");
    }
    const double s = std::sin(theta);
    // sin(k pi) evaluates to ~1e-16, not zero.
    if (std::abs(s) < 1e-12) {
        throw Error(ErrorCode::DegeneratePhase,
                    "optimal condition undefined for sin(theta) = 0");
    }
    const double sign = direction == Direction::Forward ? 1.0 : -1.0;
    const double delta = sign * kappa / (2.0 * std::tan(theta));
    const double j_ac_signed = -sign * kappa / (2.0 * s);

    OptimalCondition cond;
    cond.direction = direction;
    cond.delta = delta;
    cond.j_ac = std::abs(j_ac_signed);
    cond.j = cond.j_ac;
    cond.kappa_b = kappa;
    cond.sign_folded = j_ac_signed < 0.0;
    cond.theta = wrap_phase(cond.sign_folded ? theta + pi : theta);
    return cond;
}

SystemParams apply(const OptimalCondition& cond, SystemParams base)
{
    base.set_detuning(-cond.delta);
    base.j_ac = cond.j_ac;
    base.j_ab = base.j_bc = cond.j;
    base.theta = cond.theta;
    base.kappa_b = cond.kappa_b;
    return base;
}

PhaseMatchingResidual phase_matching_residual(const SystemParams& p, double delta)
{
    if (p.j_ab != p.j_bc) {
        throw Error(ErrorCode::UnsupportedAsymmetry,
                    "phase-matching condition assumes J_ab == J_bc");
    }
    const Complex lag(delta, p.kappa_b / 2.0);
    const double j = p.j_ab;
    const double phi = std::arg(lag);

    PhaseMatchingResidual r;
    r.amplitude = p.j_ac * std::abs(lag) - j * j;
    const double minus_branch = std::abs(wrap_phase(phi - p.theta - pi));
    const double plus_branch = std::abs(wrap_phase(phi + p.theta - pi));
    r.phase = std::min(minus_branch, plus_branch);
    return r;
}

} // namespace nrpb
