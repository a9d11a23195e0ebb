#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "emshock/linalg.hpp"
#include "emshock/macro_panel.hpp"

namespace emshock {

// Conjugate prior: coefficients matrix-normal given the innovation
// covariance, covariance inverse-Wishart. Prior mean is a random walk on
// the own first lag.
struct NormalWishartPrior {
  double overall_tightness = 0.1;  // lambda1
  double lag_decay = 1.0;          // lambda3
  double constant_variance = 1e6;  // unshrunk constant term
};

// Independent shrinkage prior toward univariate persistence.
struct MinnesotaPrior {
  double ar_coefficient = 0.8;     // delta, own first lag
  double overall_tightness = 0.1;  // lambda1
  double cross_weight = 0.5;       // lambda2
  double lag_decay = 1.0;          // lambda3
  double constant_variance = 1e6;
};

struct GibbsSettings {
  int iterations = 12000;
  int burn_in = 2000;
};

struct VarSpec {
  std::vector<std::string> variables;  // shock series ordered first
  int lags = 2;
  bool include_constant = true;
  std::variant<NormalWishartPrior, MinnesotaPrior> prior = NormalWishartPrior{};
  GibbsSettings gibbs;
  std::uint64_t seed = 1;

  void validate() const;
  int n_variables() const { return static_cast<int>(variables.size()); }
  int n_regressors() const {
    return n_variables() * lags + (include_constant ? 1 : 0);
  }
};

// Stacked regression form. Coefficient matrices are m x n with the constant
// in row 0 (when present) followed by the lag blocks, so (A^j)' occupies
// rows 1+(j-1)n .. jn.
struct DesignMatrices {
  Matrix y;  // (N*T_eff) x n
  Matrix x;  // (N*T_eff) x m
  int n_countries = 1;
  int t_effective = 0;
};

DesignMatrices build_design(const MacroPanel& panel, const VarSpec& spec,
                            bool pooled,
                            const std::vector<std::string>& country_filter = {});

struct PosteriorDraws {
  std::vector<Matrix> coefficients;  // each m x n
  std::vector<Matrix> covariances;   // each n x n, symmetric pd
  VarSpec spec;
  int convergence_flags = 0;  // split-half divergences above 0.1 posterior sd

  std::size_t size() const { return coefficients.size(); }
};

// Gibbs sampler alternating the coefficient and covariance conditionals of
// the chosen prior; initialized at OLS, retains iterations - burn_in draws.
PosteriorDraws estimate(const DesignMatrices& design, const VarSpec& spec,
                        RngStream& rng);
PosteriorDraws estimate(const DesignMatrices& design, const VarSpec& spec);

// Per-coefficient Minnesota prior mean and variance arranged like the
// coefficient matrix. scale_estimates holds the univariate AR residual
// standard deviation of each variable.
struct PriorMoments {
  Matrix mean;      // m x n
  Matrix variance;  // m x n, elementwise
};

PriorMoments minnesota_prior_moments(const VarSpec& spec,
                                     const std::vector<double>& scale_estimates);

// Residual standard deviations from univariate AR(p) regressions with
// constant; used to scale both priors.
std::vector<double> ar_residual_sds(const Matrix& y, int lags);

// Extracts the lag blocks A^1..A^p from a coefficient draw.
std::vector<Matrix> lag_matrices(const Matrix& coefficients, int n_variables,
                                 int lags, bool include_constant);

// Spectral radius of the companion matrix of one coefficient draw.
double stability(const Matrix& coefficients, int n_variables, int lags,
                 bool include_constant = true);

// Checkpoint: draw index, flattened coefficients, flattened covariance.
void save_draws(const PosteriorDraws& draws, const std::filesystem::path& path);
PosteriorDraws load_draws(const std::filesystem::path& path);

}  // namespace emshock
