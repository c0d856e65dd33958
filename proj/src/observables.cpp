#include "nrpb/observables.hpp"

#include <cmath>
#include <sstream>

#include "nrpb/error.hpp"

namespace nrpb {

namespace {

void require_mode(const DensityMatrix& rho, int mode_index)
{
    if (mode_index < 0 || mode_index >= rho.space().num_modes()) {
        throw Error(ErrorCode::InvalidEmbedding,
                    "mode index " + std::to_string(mode_index) + " out of range");
    }
}

// Sum_m P_m m (m-1) ... (m-order+1)
double factorial_moment(const std::vector<double>& p, int order)
{
    double acc = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        double falling = 1.0;
        for (int k = 0; k < order; ++k) {
            falling *= static_cast<double>(m) - k;
        }
        acc += p[m] * falling;
    }
    return acc;
}

} // namespace

Complex expectation(const DensityMatrix& rho, const Operator& op)
{
    if (!(rho.space() == op.space())) {
        throw Error(ErrorCode::InvalidOperands, "expectation: state and operator spaces differ");
    }
    // tr(rho A) without forming the product.
    return (rho.data().transpose().cwiseProduct(op.data())).sum();
}

double transmission(const DensityMatrix& rho, const SystemParams& params)
{
    if (!(params.omega > 0.0)) {
        throw Error(ErrorCode::UndefinedTransmission,
                    "transmission is undefined for zero drive amplitude");
    }
    const int out = params.drive == Drive::Left ? mode::c : mode::a;
    return params.kappa_a * params.kappa_c / (params.omega * params.omega) *
           mean_occupation(rho, out);
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep)
{
    require_mode(rho, keep);
    const auto& dims = rho.space().mode_dims();
    int before = 1;
    int after = 1;
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
        if (k < keep) {
            before *= dims[k];
        } else if (k > keep) {
            after *= dims[k];
        }
    }
    const int dk = dims[keep];
    const CMatrix& m = rho.data();
    CMatrix red = CMatrix::Zero(dk, dk);
    for (int o = 0; o < before; ++o) {
        for (int n = 0; n < after; ++n) {
            for (int j = 0; j < dk; ++j) {
                const int col = (o * dk + j) * after + n;
                for (int i = 0; i < dk; ++i) {
                    red(i, j) += m((o * dk + i) * after + n, col);
                }
            }
        }
    }
    // Summation order can leave ulp-level asymmetry.
    red = 0.5 * (red + red.adjoint()).eval();
    red /= red.trace();
    return {CompositeSpace::single(dk), std::move(red)};
}

std::vector<double> photon_distribution(const DensityMatrix& rho, int mode_index)
{
    const DensityMatrix red = partial_trace(rho, mode_index);
    std::vector<double> p(static_cast<std::size_t>(red.dim()));
    for (int m = 0; m < red.dim(); ++m) {
        p[static_cast<std::size_t>(m)] = red.data()(m, m).real();
    }
    return p;
}

double mean_occupation(const DensityMatrix& rho, int mode_index)
{
    return factorial_moment(photon_distribution(rho, mode_index), 1);
}

double correlation_g_n(const DensityMatrix& rho, int mode_index, int order,
                       double population_floor)
{
    if (order < 2) {
        throw Error(ErrorCode::InvalidConfig, "correlation order must be >= 2");
    }
    const std::vector<double> p = photon_distribution(rho, mode_index);
    const double mean = factorial_moment(p, 1);
    if (!(mean >= population_floor)) {
        std::ostringstream os;
        os << "mean occupation " << mean << " of mode " << mode_index
           << " below population floor " << population_floor;
        throw Error(ErrorCode::InsufficientPopulation, os.str());
    }
    return factorial_moment(p, order) / std::pow(mean, order);
}

std::vector<double> poisson_reference(double mean, int m_max)
{
    if (mean < 0.0 || m_max < 0) {
        throw Error(ErrorCode::InvalidConfig, "Poisson reference needs mean >= 0 and m_max >= 0");
    }
    std::vector<double> p(static_cast<std::size_t>(m_max) + 1);
    double term = std::exp(-mean);
    for (int m = 0; m <= m_max; ++m) {
        p[static_cast<std::size_t>(m)] = term;
        term *= mean / (m + 1);
    }
    return p;
}

double isolation(double t_fwd, double t_bwd)
{
    return std::abs(t_fwd - t_bwd);
}

double nonreciprocal_ratio(double g2_fwd, double g2_bwd)
{
    const double sum = g2_fwd + g2_bwd;
    if (sum == 0.0) {
        throw Error(ErrorCode::UndefinedRatio,
                    "nonreciprocal ratio undefined when both correlations vanish");
    }
    return std::abs((g2_fwd - g2_bwd) / sum);
}

DirectionalObservables directional_observables(const DensityMatrix& rho,
                                               const SystemParams& params,
                                               double population_floor)
{
    const int out = params.drive == Drive::Left ? mode::c : mode::a;
    DirectionalObservables o;
    o.transmission = transmission(rho, params);
    o.p_m = photon_distribution(rho, out);
    o.mean_n_a = mean_occupation(rho, mode::a);
    o.mean_n_b = mean_occupation(rho, mode::b);
    o.mean_n_c = mean_occupation(rho, mode::c);
    try {
        o.g2 = correlation_g_n(rho, out, 2, population_floor);
        o.g3 = correlation_g_n(rho, out, 3, population_floor);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientPopulation) {
            throw;
        }
        o.g2.reset();
        o.g3.reset();
        o.correlation_error = e;
    }
    return o;
}

PointResult combine(const DirectionalObservables& fwd, const DirectionalObservables& bwd)
{
    for (const auto* d : {&fwd, &bwd}) {
        if (d->correlation_error) {
            throw *d->correlation_error;
        }
    }
    PointResult r;
    r.t_fwd = fwd.transmission;
    r.t_bwd = bwd.transmission;
    r.g2_fwd = *fwd.g2;
    r.g2_bwd = *bwd.g2;
    r.g3_fwd = *fwd.g3;
    r.g3_bwd = *bwd.g3;
    r.isolation = isolation(r.t_fwd, r.t_bwd);
    r.ratio = nonreciprocal_ratio(r.g2_fwd, r.g2_bwd);
    r.p_m_fwd = fwd.p_m;
    r.p_m_bwd = bwd.p_m;
    r.mean_n_a_fwd = fwd.mean_n_a;
    r.mean_n_b_fwd = fwd.mean_n_b;
    r.mean_n_c_fwd = fwd.mean_n_c;
    r.mean_n_a_bwd = bwd.mean_n_a;
    r.mean_n_b_bwd = bwd.mean_n_b;
    r.mean_n_c_bwd = bwd.mean_n_c;
    return r;
}

} // namespace nrpb
