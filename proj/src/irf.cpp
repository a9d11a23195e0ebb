#include "emshock/irf.hpp"

#include <algorithm>
#include <cmath>

#include "emshock/csv.hpp"
#include "emshock/errors.hpp"

namespace emshock {

void IrfSpec::validate(const VarSpec& var_spec) const {
  if (horizon < 1) throw Error(ErrorKind::ConfigInvalid, "horizon must be >= 1");
  if (shock_index != 0)
    throw Error(ErrorKind::ConfigInvalid,
                "the shock series must be ordered first (index 0)");
  bool found = false;
  for (const auto& v : var_spec.variables) found = found || v == target_variable;
  if (!found)
    throw Error(ErrorKind::ConfigInvalid,
                "normalization target '" + target_variable + "' not in system");
}

Matrix impact_matrix(const Matrix& sigma) { return cholesky(sigma); }

IrfResult compute_irf(const PosteriorDraws& draws, const IrfSpec& spec) {
  const VarSpec& var_spec = draws.spec;
  spec.validate(var_spec);
  const int n = var_spec.n_variables();
  const int p = var_spec.lags;
  int target = 0;
  for (int v = 0; v < n; ++v)
    if (var_spec.variables[static_cast<std::size_t>(v)] == spec.target_variable)
      target = v;

  IrfResult result;
  result.variables = var_spec.variables;
  result.horizon = spec.horizon;
  result.responses.reserve(draws.size());

  for (std::size_t d = 0; d < draws.size(); ++d) {
    const auto lag_blocks = lag_matrices(draws.coefficients[d], n, p,
                                         var_spec.include_constant);
    const Matrix impact = impact_matrix(draws.covariances[d]);

    Matrix phi(spec.horizon + 1, n);
    phi.row(0) = impact.col(spec.shock_index).transpose();
    for (int h = 1; h <= spec.horizon; ++h) {
      Vector acc = Vector::Zero(n);
      for (int j = 1; j <= std::min(h, p); ++j)
        acc += lag_blocks[static_cast<std::size_t>(j - 1)] *
               phi.row(h - j).transpose();
      phi.row(h) = acc.transpose();
    }

    const double raw_impact = phi(0, target);
    if (std::abs(raw_impact) < 1e-12) {
      ++result.dropped_degenerate;
      continue;
    }
    // Ratio first, then the target scale: the normalized target impact is
    // then bitwise equal to target_response.
    phi = (phi / raw_impact) * spec.target_response;

    // Coarse power iteration is enough for the explosive-draw count.
    const Matrix companion = companion_matrix(lag_blocks);
    if (spectral_radius(companion, 240) > 1.0) ++result.explosive_draws;
    result.responses.push_back(std::move(phi));
  }

  if (result.responses.empty())
    throw Error(ErrorKind::DegenerateNormalization,
                "all draws degenerate at the normalization target");

  result.summary.assign(static_cast<std::size_t>(spec.horizon) + 1,
                        std::vector<IrfSummaryCell>(static_cast<std::size_t>(n)));
  std::vector<double> cell(result.responses.size());
  for (int h = 0; h <= spec.horizon; ++h)
    for (int v = 0; v < n; ++v) {
      for (std::size_t d = 0; d < result.responses.size(); ++d)
        cell[d] = result.responses[d](h, v);
      const auto q = quantiles(cell, {0.05, 0.16, 0.5, 0.84, 0.95});
      auto& s = result.summary[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)];
      s.p05 = q[0];
      s.p16 = q[1];
      s.median = q[2];
      s.p84 = q[3];
      s.p95 = q[4];
    }
  return result;
}

PairedIrf subsample_compare(const MacroPanel& panel,
                            const std::vector<std::string>& first_partition,
                            const std::vector<std::string>& second_partition,
                            const VarSpec& var_spec, const IrfSpec& irf_spec) {
  if (first_partition.empty() || second_partition.empty())
    throw Error(ErrorKind::ConfigInvalid, "both partitions must be nonempty");
  const auto run = [&](const std::vector<std::string>& ids) {
    const bool pooled = ids.size() > 1;
    const DesignMatrices design = build_design(panel, var_spec, pooled, ids);
    RngStream rng(var_spec.seed);
    return compute_irf(estimate(design, var_spec, rng), irf_spec);
  };
  return {run(first_partition), run(second_partition)};
}

IrfResult share_decomposition_run(const MacroPanel& panel, const VarSpec& var_spec,
                                  const IrfSpec& irf_spec,
                                  const std::vector<std::string>& share_variables) {
  for (const auto& name : share_variables)
    if (panel.variable_index(name) < 0 && name != panel.shock_name)
      throw Error(ErrorKind::SchemaMismatch,
                  "share variable '" + name + "' missing from panel");
  const bool pooled = panel.countries.size() > 1;
  const DesignMatrices design = build_design(panel, var_spec, pooled);
  RngStream rng(var_spec.seed);
  return compute_irf(estimate(design, var_spec, rng), irf_spec);
}

void write_irf_csv(const IrfResult& result, const std::filesystem::path& path) {
  CsvWriter writer(path, {"variable", "horizon", "median", "p16", "p84", "p05", "p95"});
  for (std::size_t v = 0; v < result.variables.size(); ++v)
    for (int h = 0; h <= result.horizon; ++h) {
      const auto& s = result.summary[static_cast<std::size_t>(h)][v];
      writer.field(result.variables[v]);
      writer.field(static_cast<double>(h));
      writer.field(s.median);
      writer.field(s.p16);
      writer.field(s.p84);
      writer.field(s.p05);
      writer.field(s.p95);
      writer.end_row();
    }
}

}  // namespace emshock
