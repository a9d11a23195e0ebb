#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emshock/bvar.hpp"

namespace emshock {

struct IrfSpec {
  int horizon = 36;
  int shock_index = 0;  // position of the shock innovation, must be 0
  std::string target_variable;
  double target_response = 0.50;  // impact normalization

  void validate(const VarSpec& var_spec) const;
};

// Summary bands: pointwise equal-tailed quantiles at 5/16/50/84/95.
struct IrfSummaryCell {
  double median = 0, p16 = 0, p84 = 0, p05 = 0, p95 = 0;
};

struct IrfResult {
  std::vector<std::string> variables;
  int horizon = 0;
  // responses[draw](h, variable), normalized per draw at impact
  std::vector<Matrix> responses;
  // summary[h][variable]
  std::vector<std::vector<IrfSummaryCell>> summary;
  int dropped_degenerate = 0;  // draws with |target impact| < 1e-12
  int explosive_draws = 0;     // spectral radius > 1, retained but counted
};

// Impact of the orthogonalized innovations under the recursive ordering.
Matrix impact_matrix(const Matrix& sigma);

IrfResult compute_irf(const PosteriorDraws& draws, const IrfSpec& spec);

struct PairedIrf {
  IrfResult first;
  IrfResult second;
};

// Independent estimations on two country partitions, aligned horizons.
PairedIrf subsample_compare(const MacroPanel& panel,
                            const std::vector<std::string>& first_partition,
                            const std::vector<std::string>& second_partition,
                            const VarSpec& var_spec, const IrfSpec& irf_spec);

// Standard pipeline over an expenditure-share variable set; errors with
// SchemaMismatch when a share variable is absent from the panel.
IrfResult share_decomposition_run(const MacroPanel& panel, const VarSpec& var_spec,
                                  const IrfSpec& irf_spec,
                                  const std::vector<std::string>& share_variables);

// CSV columns: variable,horizon,median,p16,p84,p05,p95.
void write_irf_csv(const IrfResult& result, const std::filesystem::path& path);

}  // namespace emshock
