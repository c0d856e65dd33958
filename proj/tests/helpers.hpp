#pragma once

#include <random>

#include "nrpb/fock.hpp"

namespace testing {

inline double max_abs(const nrpb::CMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline nrpb::CMatrix random_matrix(int n, std::mt19937& rng)
{
    std::normal_distribution<double> g;
    nrpb::CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = {g(rng), g(rng)};
        }
    }
    return m;
}

inline nrpb::CMatrix random_hermitian(int n, std::mt19937& rng)
{
    const nrpb::CMatrix m = random_matrix(n, rng);
    return 0.5 * (m + m.adjoint());
}

// Random full-rank density matrix.
inline nrpb::CMatrix random_density(int n, std::mt19937& rng)
{
    const nrpb::CMatrix m = random_matrix(n, rng);
    nrpb::CMatrix rho = m * m.adjoint();
    return rho / rho.trace();
}

} // namespace testing
