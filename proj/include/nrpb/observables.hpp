#pragma once

#include <optional>
#include <vector>

#include "nrpb/fock.hpp"
#include "nrpb/error.hpp"
#include "nrpb/lindblad.hpp"
#include "nrpb/model.hpp"

namespace nrpb {

/// Below this mean occupation g^(n) is reported as an error instead of 0/0.
inline constexpr double default_population_floor = 1e-12;

Complex expectation(const DensityMatrix& rho, const Operator& op);

/// Drive-to-output transmission for the direction the state was driven in:
/// kappa_a kappa_c <c^dag c> / Omega^2 for a left drive, <a^dag a> for right.
double transmission(const DensityMatrix& rho, const SystemParams& params);

/// Mean occupation of one mode of a composite state.
double mean_occupation(const DensityMatrix& rho, int mode_index);

/// Equal-time <o^dag^n o^n> / <o^dag o>^n for n >= 2.
double correlation_g_n(const DensityMatrix& rho, int mode_index, int order,
                       double population_floor = default_population_floor);

DensityMatrix partial_trace(const DensityMatrix& rho, int keep);

/// Diagonal of the reduced state of one mode, P_0 ... P_{dim-1}.
std::vector<double> photon_distribution(const DensityMatrix& rho, int mode_index);

/// e^{-mean} mean^m / m! for m = 0 ... m_max.
std::vector<double> poisson_reference(double mean, int m_max);

double isolation(double t_fwd, double t_bwd);

/// |(g2_fwd - g2_bwd) / (g2_fwd + g2_bwd)|
double nonreciprocal_ratio(double g2_fwd, double g2_bwd);

/// Everything reported for one working point, both drive directions.
/// "fwd" is a left drive read out at c, "bwd" a right drive read out at a.
struct PointResult {
    double t_fwd = 0.0;
    double t_bwd = 0.0;
    double g2_fwd = 0.0;
    double g2_bwd = 0.0;
    double g3_fwd = 0.0;
    double g3_bwd = 0.0;
    double isolation = 0.0;
    double ratio = 0.0;
    std::vector<double> p_m_fwd;  ///< distribution of c under a left drive
    std::vector<double> p_m_bwd;  ///< distribution of a under a right drive
    double mean_n_a_fwd = 0.0;
    double mean_n_b_fwd = 0.0;
    double mean_n_c_fwd = 0.0;
    double mean_n_a_bwd = 0.0;
    double mean_n_b_bwd = 0.0;
    double mean_n_c_bwd = 0.0;
};

/// Per-direction quantities extracted from one steady state.
/// g2 / g3 are empty when the output mode is below the population floor;
/// `correlation_error` then holds the reason.
struct DirectionalObservables {
    double transmission = 0.0;
    std::optional<double> g2;
    std::optional<double> g3;
    std::optional<Error> correlation_error;
    std::vector<double> p_m;
    double mean_n_a = 0.0;
    double mean_n_b = 0.0;
    double mean_n_c = 0.0;
};

/// Reads the output mode implied by `params.drive` (c for left, a for right).
DirectionalObservables directional_observables(const DensityMatrix& rho,
                                               const SystemParams& params,
                                               double population_floor = default_population_floor);

/// Throws the stored correlation error if either direction lacks g2 / g3.
PointResult combine(const DirectionalObservables& fwd, const DirectionalObservables& bwd);

} // namespace nrpb
