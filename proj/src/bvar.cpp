#include "emshock/bvar.hpp"

#include <cmath>
#include <sstream>

#include "emshock/csv.hpp"
#include "emshock/errors.hpp"

namespace emshock {

void VarSpec::validate() const {
  if (variables.empty())
    throw Error(ErrorKind::ConfigInvalid, "no variables in VAR spec");
  if (lags < 1) throw Error(ErrorKind::ConfigInvalid, "lags must be >= 1");
  if (gibbs.iterations <= gibbs.burn_in)
    throw Error(ErrorKind::ConfigInvalid, "iterations must exceed burn-in");
  const auto positive = [](double v) { return v > 0.0; };
  if (const auto* nw = std::get_if<NormalWishartPrior>(&prior)) {
    if (!positive(nw->overall_tightness) || !positive(nw->lag_decay))
      throw Error(ErrorKind::ConfigInvalid, "prior tightness must be positive");
  } else {
    const auto& mn = std::get<MinnesotaPrior>(prior);
    if (!positive(mn.overall_tightness) || !positive(mn.lag_decay))
      throw Error(ErrorKind::ConfigInvalid, "prior tightness must be positive");
  }
}

namespace {

// Data matrix (T x n) for one country in spec variable order; the shock
// series fills its named slot identically across countries.
Matrix country_data(const MacroPanel& panel, const VarSpec& spec, int country) {
  const auto t_total = static_cast<Eigen::Index>(panel.n_months());
  Matrix z(t_total, spec.n_variables());
  for (int v = 0; v < spec.n_variables(); ++v) {
    const std::string& name = spec.variables[static_cast<std::size_t>(v)];
    if (name == panel.shock_name) {
      for (Eigen::Index t = 0; t < t_total; ++t)
        z(t, v) = panel.shock[static_cast<std::size_t>(t)];
    } else {
      const int idx = panel.variable_index(name);
      if (idx < 0)
        throw Error(ErrorKind::SchemaMismatch,
                    "variable '" + name + "' not in panel");
      for (Eigen::Index t = 0; t < t_total; ++t)
        z(t, v) = panel.values[static_cast<std::size_t>(country)](idx, t);
    }
  }
  if (!z.allFinite())
    throw Error(ErrorKind::InteriorMissing,
                "incomplete data for country " +
                    panel.countries[static_cast<std::size_t>(country)] +
                    " over the estimation window");
  return z;
}

}  // namespace

DesignMatrices build_design(const MacroPanel& panel, const VarSpec& spec,
                            bool pooled,
                            const std::vector<std::string>& country_filter) {
  spec.validate();

  std::vector<int> countries;
  if (country_filter.empty()) {
    for (std::size_t c = 0; c < panel.countries.size(); ++c)
      countries.push_back(static_cast<int>(c));
  } else {
    for (const auto& id : country_filter) {
      const int c = panel.country_index(id);
      if (c < 0)
        throw Error(ErrorKind::SchemaMismatch, "unknown country '" + id + "'");
      countries.push_back(c);
    }
  }
  if (!pooled && countries.size() != 1)
    throw Error(ErrorKind::ConfigInvalid,
                "single-country design requires exactly one country");
  if (pooled && countries.size() < 2)
    throw Error(ErrorKind::ConfigInvalid, "pooled design requires >= 2 countries");

  const int n = spec.n_variables();
  const int p = spec.lags;
  const int m = spec.n_regressors();
  const int t_total = static_cast<int>(panel.n_months());
  if (t_total <= n * p + 1)
    throw Error(ErrorKind::InsufficientObservations,
                "T = " + std::to_string(t_total) + " <= n*p + 1 = " +
                    std::to_string(n * p + 1));
  const int t_eff = t_total - p;

  DesignMatrices design;
  design.n_countries = static_cast<int>(countries.size());
  design.t_effective = t_eff;
  design.y.resize(static_cast<Eigen::Index>(countries.size()) * t_eff, n);
  design.x.resize(static_cast<Eigen::Index>(countries.size()) * t_eff, m);

  Eigen::Index row = 0;
  for (int c : countries) {
    const Matrix z = country_data(panel, spec, c);
    for (int t = p; t < t_total; ++t, ++row) {
      design.y.row(row) = z.row(t);
      int col = 0;
      if (spec.include_constant) design.x(row, col++) = 1.0;
      for (int lag = 1; lag <= p; ++lag)
        for (int v = 0; v < n; ++v) design.x(row, col++) = z(t - lag, v);
    }
  }
  return design;
}

std::vector<double> ar_residual_sds(const Matrix& y, int lags) {
  const Eigen::Index t_total = y.rows();
  const Eigen::Index t_eff = t_total - lags;
  std::vector<double> sds;
  if (t_eff <= lags + 1)
    throw Error(ErrorKind::InsufficientObservations,
                "too few observations for AR scale estimates");
  for (Eigen::Index v = 0; v < y.cols(); ++v) {
    Matrix x(t_eff, lags + 1);
    Vector dep(t_eff);
    for (Eigen::Index t = 0; t < t_eff; ++t) {
      dep(t) = y(t + lags, v);
      x(t, 0) = 1.0;
      for (int l = 1; l <= lags; ++l) x(t, l) = y(t + lags - l, v);
    }
    const Vector beta = (x.transpose() * x).ldlt().solve(x.transpose() * dep);
    const double ssr = (dep - x * beta).squaredNorm();
    const double dof = static_cast<double>(t_eff - lags - 1);
    sds.push_back(std::sqrt(std::max(ssr / std::max(dof, 1.0), 1e-12)));
  }
  return sds;
}

namespace {

// AR scale estimates from the design itself: regress each equation on the
// constant and its own lag columns, so pooled country blocks never leak
// across boundaries.
std::vector<double> design_scale_estimates(const DesignMatrices& design,
                                           const VarSpec& spec) {
  const int n = spec.n_variables();
  const int p = spec.lags;
  const Eigen::Index rows = design.y.rows();
  std::vector<double> sds;
  for (int v = 0; v < n; ++v) {
    Matrix x(rows, p + 1);
    x.col(0).setOnes();
    for (int l = 1; l <= p; ++l) {
      const int src = (spec.include_constant ? 1 : 0) + (l - 1) * n + v;
      x.col(l) = design.x.col(src);
    }
    const Vector beta =
        (x.transpose() * x).ldlt().solve(x.transpose() * design.y.col(v));
    const double ssr = (design.y.col(v) - x * beta).squaredNorm();
    const double dof = std::max<double>(static_cast<double>(rows) - p - 1, 1.0);
    sds.push_back(std::sqrt(std::max(ssr / dof, 1e-12)));
  }
  return sds;
}

struct GibbsState {
  Matrix coefficients;
  Matrix sigma;
};

int count_convergence_flags(const PosteriorDraws& draws) {
  if (draws.size() < 4) return 0;
  const std::size_t half = draws.size() / 2;
  const Eigen::Index m = draws.coefficients.front().rows();
  const Eigen::Index n = draws.coefficients.front().cols();
  int flags = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double m1 = 0, m2 = 0, all = 0, ss = 0;
      for (std::size_t d = 0; d < draws.size(); ++d) {
        const double v = draws.coefficients[d](i, j);
        all += v;
        ss += v * v;
        (d < half ? m1 : m2) += v;
      }
      m1 /= static_cast<double>(half);
      m2 /= static_cast<double>(draws.size() - half);
      all /= static_cast<double>(draws.size());
      const double sd =
          std::sqrt(std::max(ss / static_cast<double>(draws.size()) - all * all, 0.0));
      if (std::abs(m1 - m2) > 0.1 * sd && sd > 0.0) ++flags;
    }
  }
  return flags;
}

PosteriorDraws run_normal_wishart(const DesignMatrices& design,
                                  const VarSpec& spec,
                                  const NormalWishartPrior& prior,
                                  RngStream& rng) {
  const int n = spec.n_variables();
  const int p = spec.lags;
  const int m = spec.n_regressors();
  const double t_rows = static_cast<double>(design.y.rows());
  const int const_off = spec.include_constant ? 1 : 0;

  std::vector<double> sigma_scales(static_cast<std::size_t>(n), 1.0);
  if (design.y.rows() > 0) sigma_scales = design_scale_estimates(design, spec);

  // Random-walk prior mean, Kronecker row covariance, IW scale at the AR
  // residual variances with dof n + 2.
  Matrix b0 = Matrix::Zero(m, n);
  for (int i = 0; i < n; ++i) b0(const_off + i, i) = 1.0;
  Vector phi0_diag(m);
  if (spec.include_constant) phi0_diag(0) = prior.constant_variance;
  for (int lag = 1; lag <= p; ++lag)
    for (int v = 0; v < n; ++v) {
      const double base =
          prior.overall_tightness / std::pow(static_cast<double>(lag), prior.lag_decay);
      phi0_diag(const_off + (lag - 1) * n + v) =
          base * base / (sigma_scales[static_cast<std::size_t>(v)] *
                         sigma_scales[static_cast<std::size_t>(v)]);
    }
  const Vector phi0_inv = phi0_diag.cwiseInverse();
  const double nu0 = n + 2;
  Matrix s0 = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    s0(i, i) = sigma_scales[static_cast<std::size_t>(i)] *
               sigma_scales[static_cast<std::size_t>(i)];

  const Matrix xtx = design.x.transpose() * design.x;
  const Matrix xty = design.x.transpose() * design.y;
  Matrix phi_post_inv = xtx;
  phi_post_inv.diagonal() += phi0_inv;
  const Matrix phi_post =
      phi_post_inv.llt().solve(Matrix::Identity(m, m));
  const Matrix b_post =
      phi_post * (phi0_inv.asDiagonal() * b0 + xty);
  const Matrix phi_post_sym = 0.5 * (phi_post + phi_post.transpose());

  // OLS start; falls back to the prior mean when the data block is empty.
  GibbsState state;
  state.coefficients = b0;
  state.sigma = s0;
  if (design.y.rows() > m) {
    state.coefficients = xtx.ldlt().solve(xty);
    const Matrix resid = design.y - design.x * state.coefficients;
    state.sigma = resid.transpose() * resid / std::max(t_rows - m, 1.0);
    state.sigma = 0.5 * (state.sigma + state.sigma.transpose());
    state.sigma.diagonal().array() += 1e-10;
  }

  PosteriorDraws out;
  out.spec = spec;
  out.coefficients.reserve(
      static_cast<std::size_t>(spec.gibbs.iterations - spec.gibbs.burn_in));
  out.covariances.reserve(out.coefficients.capacity());

  for (int it = 0; it < spec.gibbs.iterations; ++it) {
    try {
      state.coefficients =
          sample_matrix_normal(b_post, phi_post_sym, state.sigma, rng);
      const Matrix resid = design.y - design.x * state.coefficients;
      const Matrix dev = state.coefficients - b0;
      const Matrix s_cond = s0 + resid.transpose() * resid +
                            dev.transpose() * phi0_inv.asDiagonal() * dev;
      state.sigma =
          sample_inverse_wishart(0.5 * (s_cond + s_cond.transpose()),
                                 nu0 + t_rows + m, rng);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  std::string(e.what()) + " (Gibbs iteration " +
                      std::to_string(it) + ")");
    }
    if (it >= spec.gibbs.burn_in) {
      out.coefficients.push_back(state.coefficients);
      out.covariances.push_back(state.sigma);
    }
  }
  out.convergence_flags = count_convergence_flags(out);
  return out;
}

PosteriorDraws run_minnesota(const DesignMatrices& design, const VarSpec& spec,
                             RngStream& rng) {
  const int n = spec.n_variables();
  const int m = spec.n_regressors();
  const double t_rows = static_cast<double>(design.y.rows());

  std::vector<double> sigma_scales(static_cast<std::size_t>(n), 1.0);
  if (design.y.rows() > 0) sigma_scales = design_scale_estimates(design, spec);

  const PriorMoments moments = minnesota_prior_moments(spec, sigma_scales);
  // vec(B) stacked equation by equation; variances floored so lambda2 = 0
  // (hard exclusion) keeps a finite precision.
  Vector beta0(m * n), omega0_inv(m * n);
  for (int eq = 0; eq < n; ++eq)
    for (int r = 0; r < m; ++r) {
      beta0(eq * m + r) = moments.mean(r, eq);
      omega0_inv(eq * m + r) = 1.0 / std::max(moments.variance(r, eq), 1e-12);
    }

  const double nu0 = n + 2;
  Matrix s0 = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    s0(i, i) = sigma_scales[static_cast<std::size_t>(i)] *
               sigma_scales[static_cast<std::size_t>(i)];

  const Matrix xtx = design.x.transpose() * design.x;
  const Matrix xty = design.x.transpose() * design.y;

  GibbsState state;
  state.coefficients = moments.mean;
  state.sigma = s0;
  if (design.y.rows() > m) {
    state.coefficients = xtx.ldlt().solve(xty);
    const Matrix resid = design.y - design.x * state.coefficients;
    state.sigma = resid.transpose() * resid / std::max(t_rows - m, 1.0);
    state.sigma = 0.5 * (state.sigma + state.sigma.transpose());
    state.sigma.diagonal().array() += 1e-10;
  }

  PosteriorDraws out;
  out.spec = spec;

  Vector z(m * n);
  for (int it = 0; it < spec.gibbs.iterations; ++it) {
    try {
      const Matrix sigma_inv =
          state.sigma.llt().solve(Matrix::Identity(n, n));
      Matrix precision = kronecker(0.5 * (sigma_inv + sigma_inv.transpose()), xtx);
      precision.diagonal() += omega0_inv;
      const Matrix rhs_mat = xty * sigma_inv;  // m x n
      Vector rhs(m * n);
      for (int eq = 0; eq < n; ++eq) rhs.segment(eq * m, m) = rhs_mat.col(eq);
      rhs += omega0_inv.asDiagonal() * beta0;

      // One factorization serves both the mean solve and the draw.
      const Eigen::LLT<Matrix> llt(precision);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::NotPositiveDefinite,
                    "coefficient conditional precision");
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
      const Vector beta =
          llt.solve(rhs) + llt.matrixU().solve(z);
      for (int eq = 0; eq < n; ++eq)
        state.coefficients.col(eq) = beta.segment(eq * m, m);

      const Matrix resid = design.y - design.x * state.coefficients;
      const Matrix s_cond = s0 + resid.transpose() * resid;
      state.sigma = sample_inverse_wishart(
          0.5 * (s_cond + s_cond.transpose()), nu0 + t_rows, rng);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  std::string(e.what()) + " (Gibbs iteration " +
                      std::to_string(it) + ")");
    }
    if (it >= spec.gibbs.burn_in) {
      out.coefficients.push_back(state.coefficients);
      out.covariances.push_back(state.sigma);
    }
  }
  out.convergence_flags = count_convergence_flags(out);
  return out;
}

}  // namespace

PosteriorDraws estimate(const DesignMatrices& design, const VarSpec& spec,
                        RngStream& rng) {
  spec.validate();
  if (design.x.cols() != spec.n_regressors() ||
      design.y.cols() != spec.n_variables())
    throw Error(ErrorKind::ConfigInvalid, "design does not match spec");
  if (const auto* nw = std::get_if<NormalWishartPrior>(&spec.prior))
    return run_normal_wishart(design, spec, *nw, rng);
  return run_minnesota(design, spec, rng);
}

PosteriorDraws estimate(const DesignMatrices& design, const VarSpec& spec) {
  RngStream rng(spec.seed);
  return estimate(design, spec, rng);
}

PriorMoments minnesota_prior_moments(
    const VarSpec& spec, const std::vector<double>& scale_estimates) {
  const auto* mn = std::get_if<MinnesotaPrior>(&spec.prior);
  const MinnesotaPrior prior = mn ? *mn : MinnesotaPrior{};
  const int n = spec.n_variables();
  const int p = spec.lags;
  const int m = spec.n_regressors();
  const int const_off = spec.include_constant ? 1 : 0;
  if (static_cast<int>(scale_estimates.size()) != n)
    throw Error(ErrorKind::ConfigInvalid, "scale estimate count mismatch");
  for (double s : scale_estimates)
    if (!(s > 0.0))
      throw Error(ErrorKind::ConfigInvalid, "scale estimates must be positive");

  PriorMoments out;
  out.mean = Matrix::Zero(m, n);
  out.variance = Matrix::Zero(m, n);
  for (int eq = 0; eq < n; ++eq) {
    if (spec.include_constant) out.variance(0, eq) = prior.constant_variance;
    for (int lag = 1; lag <= p; ++lag)
      for (int v = 0; v < n; ++v) {
        const int row = const_off + (lag - 1) * n + v;
        const double decay = std::pow(static_cast<double>(lag), prior.lag_decay);
        if (v == eq) {
          if (lag == 1) out.mean(row, eq) = prior.ar_coefficient;
          const double sd = prior.overall_tightness / decay;
          out.variance(row, eq) = sd * sd;
        } else {
          const double sd = prior.overall_tightness * prior.cross_weight *
                            scale_estimates[static_cast<std::size_t>(eq)] /
                            (decay * scale_estimates[static_cast<std::size_t>(v)]);
          out.variance(row, eq) = sd * sd;
        }
      }
  }
  return out;
}

std::vector<Matrix> lag_matrices(const Matrix& coefficients, int n_variables,
                                 int lags, bool include_constant) {
  const int const_off = include_constant ? 1 : 0;
  if (coefficients.rows() != const_off + n_variables * lags ||
      coefficients.cols() != n_variables)
    throw Error(ErrorKind::ConfigInvalid, "coefficient matrix shape mismatch");
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(lags));
  for (int lag = 1; lag <= lags; ++lag)
    blocks.push_back(coefficients
                         .block(const_off + (lag - 1) * n_variables, 0,
                                n_variables, n_variables)
                         .transpose());
  return blocks;
}

double stability(const Matrix& coefficients, int n_variables, int lags,
                 bool include_constant) {
  const auto blocks =
      lag_matrices(coefficients, n_variables, lags, include_constant);
  return spectral_radius(companion_matrix(blocks));
}

void save_draws(const PosteriorDraws& draws, const std::filesystem::path& path) {
  const Eigen::Index m = draws.size() ? draws.coefficients.front().rows() : 0;
  const Eigen::Index n = draws.size() ? draws.coefficients.front().cols() : 0;
  std::vector<std::string> header{"draw"};
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      header.push_back("coef_" + std::to_string(r) + "_" + std::to_string(c));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      header.push_back("sigma_" + std::to_string(r) + "_" + std::to_string(c));
  CsvWriter writer(path, header);
  for (std::size_t d = 0; d < draws.size(); ++d) {
    writer.field(static_cast<double>(d));
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        writer.field(draws.coefficients[d](r, c));
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        writer.field(draws.covariances[d](r, c));
    writer.end_row();
  }
}

PosteriorDraws load_draws(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  Eigen::Index m = 0, n = 0;
  for (const auto& name : table.header) {
    if (name.rfind("coef_", 0) == 0) {
      std::istringstream ss(name.substr(5));
      Eigen::Index r, c;
      char sep;
      ss >> r >> sep >> c;
      m = std::max(m, r + 1);
      n = std::max(n, c + 1);
    }
  }
  if (m == 0 || n == 0)
    throw Error(ErrorKind::SchemaMismatch, "no coefficient columns in checkpoint");
  PosteriorDraws draws;
  for (const auto& row : table.rows) {
    Matrix coef(m, n), sigma(n, n);
    std::size_t idx = 1;
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        coef(r, c) = parse_double(row[idx++], path.string());
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        sigma(r, c) = parse_double(row[idx++], path.string());
    draws.coefficients.push_back(std::move(coef));
    draws.covariances.push_back(std::move(sigma));
  }
  return draws;
}

}  // namespace emshock
