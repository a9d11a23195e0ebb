#include <doctest.h>

#include <cmath>

#include "emshock/errors.hpp"
#include "emshock/linalg.hpp"

using namespace emshock;

TEST_CASE("cholesky identity") {
  const Matrix l = cholesky(Matrix::Identity(3, 3));
  CHECK((l - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cholesky 2x2 hand case reproduces input") {
  Matrix m(2, 2);
  m << 4, 2, 2, 3;
  const Matrix l = cholesky(m);
  CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(l(0, 1) == 0.0);
  CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(((l * l.transpose()) - m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cholesky rejects indefinite and asymmetric input") {
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_WITH_AS(static_cast<void>(cholesky(indefinite)),
                       doctest::Contains("pivot"), Error);
  Matrix asymmetric(2, 2);
  asymmetric << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(static_cast<void>(cholesky(asymmetric)), Error);
  try {
    static_cast<void>(cholesky(asymmetric));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSymmetric);
  }
}

TEST_CASE("cholesky round trip on random factors") {
  RngStream rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rep % 4;
    Matrix l = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      l(i, i) = 0.3 + std::abs(rng.normal());
      for (int j = 0; j < i; ++j) l(i, j) = rng.normal();
    }
    const Matrix back = cholesky(l * l.transpose());
    CHECK((back - l).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("kronecker identities and hand expansion") {
  CHECK((kronecker(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) -
         Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const Matrix k = kronecker(a, b);
  REQUIRE(k.rows() == 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK((k.block(2 * i, 2 * j, 2, 2) - a(i, j) * b).cwiseAbs().maxCoeff() ==
            0.0);

  Matrix scalar(1, 1);
  scalar << 2.5;
  CHECK((kronecker(a, scalar) - 2.5 * a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kronecker mixed product on random blocks") {
  RngStream rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix a(2, 2), b(2, 2), c(2, 2), d(2, 2);
    for (Matrix* m : {&a, &b, &c, &d})
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) (*m)(i, j) = rng.normal();
    const Matrix lhs = kronecker(a, b) * kronecker(c, d);
    const Matrix rhs = kronecker(a * c, b * d);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("quantiles interpolation rules") {
  CHECK(quantile({1, 2, 3}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({5, 1, 9, 3}, 0.0) == 1.0);
  CHECK(quantile({5, 1, 9, 3}, 1.0) == 9.0);
  CHECK_THROWS_AS(static_cast<void>(quantile({}, 0.5)), Error);

  RngStream rng(11);
  std::vector<double> values;
  for (int i = 0; i < 37; ++i) values.push_back(rng.normal());
  const auto qs = quantiles(values, {0.05, 0.16, 0.5, 0.84, 0.95});
  for (std::size_t i = 1; i < qs.size(); ++i) CHECK(qs[i] >= qs[i - 1]);
}

TEST_CASE("matrix normal degenerate scale returns the mean") {
  RngStream rng(5);
  Matrix mean(2, 3);
  mean << 1, 2, 3, 4, 5, 6;
  const Matrix draw = sample_matrix_normal(mean, 1e-30 * Matrix::Identity(2, 2),
                                           1e-30 * Matrix::Identity(3, 3), rng);
  CHECK((draw - mean).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("matrix normal determinism and Monte Carlo mean") {
  RngStream a(99), b(99);
  const Matrix mean = Matrix::Zero(2, 2);
  const Matrix cov = Matrix::Identity(2, 2);
  const Matrix d1 = sample_matrix_normal(mean, cov, cov, a);
  const Matrix d2 = sample_matrix_normal(mean, cov, cov, b);
  CHECK((d1 - d2).cwiseAbs().maxCoeff() == 0.0);

  RngStream rng(123);
  Matrix sum = Matrix::Zero(2, 2);
  const int n_draws = 100000;
  for (int i = 0; i < n_draws; ++i)
    sum += sample_matrix_normal(mean, cov, cov, rng);
  CHECK((sum / n_draws).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("inverse wishart scalar case matches the inverse gamma oracle") {
  // IW_1(s, nu) is s over a chi-squared with nu dof; its mean is s/(nu-2).
  RngStream rng(2024);
  Matrix scale(1, 1);
  scale << 3.0;
  const double dof = 7.0;
  const int n_draws = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const double draw = sample_inverse_wishart(scale, dof, rng)(0, 0);
    CHECK(draw > 0.0);
    sum += draw;
    sum_sq += draw * draw;
  }
  const double mc_mean = sum / n_draws;
  const double mc_sd = std::sqrt((sum_sq / n_draws - mc_mean * mc_mean) / n_draws);
  const double expected = 3.0 / (dof - 2.0);
  CHECK(std::abs(mc_mean - expected) < 3.0 * mc_sd);
}

TEST_CASE("inverse wishart support and dof validation") {
  RngStream rng(8);
  Matrix scale(3, 3);
  scale << 2, 0.3, 0, 0.3, 1.5, 0.2, 0, 0.2, 1.0;
  const Matrix draw = sample_inverse_wishart(scale, 6.0, rng);
  CHECK((draw - draw.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_NOTHROW(static_cast<void>(cholesky(draw)));

  CHECK_THROWS_AS(static_cast<void>(sample_inverse_wishart(scale, 1.5, rng)), Error);

  // Pure function of (parameters, seed, position).
  RngStream a(400), b(400);
  CHECK((sample_inverse_wishart(scale, 6.0, a) -
         sample_inverse_wishart(scale, 6.0, b))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("companion matrix and spectral radius") {
  CHECK(spectral_radius(Matrix::Zero(4, 4)) == 0.0);

  Matrix phi(1, 1);
  phi << 0.5;
  CHECK(spectral_radius(companion_matrix({phi})) == doctest::Approx(0.5).epsilon(1e-9));
  phi << 1.05;
  CHECK(spectral_radius(companion_matrix({phi})) ==
        doctest::Approx(1.05).epsilon(1e-9));

  // Scalar AR(2): largest root of x^2 - 0.5x - 0.3.
  Matrix p1(1, 1), p2(1, 1);
  p1 << 0.5;
  p2 << 0.3;
  const double expected = (0.5 + std::sqrt(0.25 + 1.2)) / 2.0;
  CHECK(spectral_radius(companion_matrix({p1, p2})) ==
        doctest::Approx(expected).epsilon(1e-6));
}
