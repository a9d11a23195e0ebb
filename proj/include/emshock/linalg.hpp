#pragma once

#include <Eigen/Dense>
#include <vector>

#include "emshock/rng.hpp"

namespace emshock {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Lower Cholesky factor of a symmetric positive-definite matrix.
// Asymmetry above the tolerance throws NotSymmetric; within tolerance the
// input is symmetrized as (M + M')/2 before factorization so Gibbs
// round-off cannot produce spurious failures. A pivot <= 0 throws
// NotPositiveDefinite.
Matrix cholesky(const Matrix& m, double symmetry_tol = 1e-10);

Matrix kronecker(const Matrix& a, const Matrix& b);

// Linear-interpolation quantiles between order statistics (the common
// statistical-package default). probs must lie in [0,1].
std::vector<double> quantiles(std::vector<double> values,
                              const std::vector<double>& probs);
double quantile(std::vector<double> values, double prob);

// Draw from the matrix-normal law MN(mean, row_cov, col_cov):
// mean + L_r * Z * L_c' with Z iid standard normal.
Matrix sample_matrix_normal(const Matrix& mean, const Matrix& row_cov,
                            const Matrix& col_cov, RngStream& rng);

// Inverse-Wishart draw with E[X] = scale / (dof - dim - 1) for
// dof > dim + 1. Requires dof > dim - 1.
Matrix sample_inverse_wishart(const Matrix& scale, double dof, RngStream& rng);

// Multivariate normal with given mean and *precision* matrix:
// mean + chol(P)^-T z. Used for the Minnesota-prior coefficient block.
Vector sample_normal_precision(const Vector& mean, const Matrix& precision,
                               RngStream& rng);

// Companion matrix of a VAR: coefficient blocks a[0..p-1] each n x n,
// stacked over an identity shift register.
Matrix companion_matrix(const std::vector<Matrix>& lag_coefficients);

// Largest eigenvalue modulus by power iteration with an m-step growth
// estimate; handles complex dominant pairs through the window ratio.
double spectral_radius(const Matrix& m, int iterations = 2000);

}  // namespace emshock
