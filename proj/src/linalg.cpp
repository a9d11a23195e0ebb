#include "emshock/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "emshock/errors.hpp"

namespace emshock {

Matrix cholesky(const Matrix& m, double symmetry_tol) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::NotSymmetric, "matrix is not square");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > symmetry_tol * scale)
    throw Error(ErrorKind::NotSymmetric,
                "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  const Matrix s = 0.5 * (m + m.transpose());

  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = s(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0))
      throw Error(ErrorKind::NotPositiveDefinite,
                  "pivot " + std::to_string(j) + " is not positive");
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double off =
          s(i, j) - (l.row(i).head(j) * l.row(j).head(j).transpose())(0, 0);
      l(i, j) = off / l(j, j);
    }
  }
  return l;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<double> quantiles(std::vector<double> values,
                              const std::vector<double>& probs) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) {
    p = std::clamp(p, 0.0, 1.0);
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, n - 1);
    out.push_back(values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]));
  }
  return out;
}

double quantile(std::vector<double> values, double prob) {
  return quantiles(std::move(values), {prob})[0];
}

Matrix sample_matrix_normal(const Matrix& mean, const Matrix& row_cov,
                            const Matrix& col_cov, RngStream& rng) {
  const Matrix lr = cholesky(row_cov);
  const Matrix lc = cholesky(col_cov);
  Matrix z(mean.rows(), mean.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.normal();
  return mean + lr * z * lc.transpose();
}

Matrix sample_inverse_wishart(const Matrix& scale, double dof, RngStream& rng) {
  const Eigen::Index p = scale.rows();
  if (!(dof > static_cast<double>(p) - 1.0))
    throw Error(ErrorKind::InvalidDegreesOfFreedom,
                "dof must exceed dim - 1");
  // X ~ Wishart(scale^-1, dof) via Bartlett, then the draw is X^-1.
  const Matrix l_scale = cholesky(scale);
  Matrix a = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // chol(scale^-1) = L^-T, so the Wishart factor is L^-T A.
  const Matrix c = l_scale.transpose()
                       .triangularView<Eigen::Upper>()
                       .solve(Matrix::Identity(p, p));
  const Matrix f = c * a;
  const Matrix w = f * f.transpose();
  Matrix inv = w.llt().solve(Matrix::Identity(p, p));
  return 0.5 * (inv + inv.transpose());
}

Vector sample_normal_precision(const Vector& mean, const Matrix& precision,
                               RngStream& rng) {
  const Matrix l = cholesky(precision);
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + l.transpose().triangularView<Eigen::Upper>().solve(z);
}

Matrix companion_matrix(const std::vector<Matrix>& lag_coefficients) {
  const int p = static_cast<int>(lag_coefficients.size());
  const Eigen::Index n = p > 0 ? lag_coefficients[0].rows() : 0;
  Matrix c = Matrix::Zero(n * p, n * p);
  for (int j = 0; j < p; ++j) c.block(0, j * n, n, n) = lag_coefficients[j];
  if (p > 1)
    c.block(n, 0, n * (p - 1), n * (p - 1)) =
        Matrix::Identity(n * (p - 1), n * (p - 1));
  return c;
}

double spectral_radius(const Matrix& m, int iterations) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Vector v = Vector::Ones(n).normalized();
  double estimate = 0.0;
  const int window = 8;
  for (int it = 0; it < iterations; ++it) {
    Vector w = m * v;
    const double norm = w.norm();
    if (norm < 1e-300) return 0.0;  // nilpotent dynamics collapse to zero
    v = w / norm;
    if (it >= iterations - window || it % window == window - 1) {
      Vector w2 = v;
      double growth = 1.0;
      for (int k = 0; k < window; ++k) {
        w2 = m * w2;
        const double g = w2.norm();
        if (g < 1e-300) return 0.0;
        growth *= g;
        w2 /= g;
      }
      estimate = std::pow(growth, 1.0 / window);
    }
  }
  return estimate;
}

}  // namespace emshock
