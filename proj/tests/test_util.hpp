#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "pscat/fock.hpp"

namespace pscat::test {

// Random full-rank density matrix (Ginibre construction), seeded.
inline fock::DensityMatrix random_density(int n_max, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int d = n_max + 1;
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = fock::Cplx(gauss(rng), gauss(rng));
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return fock::DensityMatrix(std::move(rho));
}

inline fock::PureState random_pure(int n_max, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd c(n_max + 1);
    for (int i = 0; i <= n_max; ++i) c(i) = fock::Cplx(gauss(rng), gauss(rng));
    return fock::PureState(std::move(c));
}

inline fock::DensityMatrix fock_projector(int n, int n_max) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
    c(n) = 1.0;
    return fock::DensityMatrix::from_pure(fock::PureState(std::move(c)));
}

}  // namespace pscat::test
