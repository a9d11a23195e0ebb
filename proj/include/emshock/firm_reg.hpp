#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emshock/dates.hpp"
#include "emshock/firm_panel.hpp"
#include "emshock/linalg.hpp"

namespace emshock {

struct QuarterlySeries {
  Quarter start;
  std::vector<double> values;

  double at(Quarter q) const;  // NaN outside the range
  Quarter end() const { return start.plus(static_cast<int>(values.size()) - 1); }
};

enum class InteractionType {
  Standardized,        // z_{t-1} * shock_t
  IndicatorAboveMean,  // 1[z_{t-1} > 0] * shock_t
  IndicatorAboveOneSd  // 1[z_{t-1} > 1] * shock_t
};

enum class TimeEffects { SectorTime, SectorSeason };
enum class Clustering { Firm, FirmAndTime };

struct RegressionSpec {
  int horizon = 0;  // dependent: log k_{t+j} - log k_{t-1}
  InteractionType interaction = InteractionType::Standardized;
  bool include_level_shock = false;  // collinear with sector-time effects
  TimeEffects time_effects = TimeEffects::SectorTime;
  bool control_lag_asset_growth = false;
  bool control_lag_mismatch = false;
  bool control_lag_leverage = false;
  bool aggregate_controls = false;  // 4 lags of inflation, log GDP, log FX
  Clustering clustering = Clustering::FirmAndTime;

  void validate() const;
};

// Quarterly macro series for the specification with aggregate controls.
struct AggregateSeries {
  Quarter start;
  std::vector<double> inflation;
  std::vector<double> log_gdp;
  std::vector<double> log_fx;
};

struct RegressionResult {
  std::vector<std::string> names;
  Vector coefficients;
  Vector std_errors;
  Matrix vcov;
  long n_obs = 0;
  double r2_within = 0.0;
  int dropped_singletons = 0;
  int absorption_iterations = 0;
  bool vcov_floored = false;
  std::vector<std::string> warnings;
  int horizon = 0;

  double coefficient(const std::string& name) const;
  double std_error(const std::string& name) const;
};

// Alternating within-group demeaning over all fixed-effect sets, iterated
// to max |update| < 1e-8. Singleton groups are dropped first (iterated
// across dimensions) and reported. Columns with variation that is fully
// absorbed throw NoVariationLeft.
struct AbsorptionResult {
  Matrix data;
  std::vector<std::size_t> kept_rows;
  int dropped_singletons = 0;
  int iterations = 0;
};

AbsorptionResult absorb_fixed_effects(const Matrix& data,
                                      const std::vector<std::vector<int>>& fe_sets);

struct ClusteredVcov {
  Matrix vcov;
  bool floored = false;
  std::vector<std::string> warnings;
};

// One-way: sandwich with cluster-summed scores and small-sample factor
// G/(G-1)*(N-1)/(N-K). Two-way: V_first + V_second - V_intersection, each
// with its own factor; a negative diagonal from the difference is floored
// at the one-way maximum and flagged.
ClusteredVcov clustered_vcov(const Matrix& x, const Vector& residuals,
                             const std::vector<std::vector<int>>& cluster_sets);

RegressionResult estimate_spec(const FirmPanel& panel,
                               const QuarterlySeries& shock,
                               const RegressionSpec& spec,
                               const std::optional<AggregateSeries>& aggregates =
                                   std::nullopt);

std::vector<RegressionResult> local_projection(
    const FirmPanel& panel, const QuarterlySeries& shock, RegressionSpec spec,
    int max_horizon,
    const std::optional<AggregateSeries>& aggregates = std::nullopt);

// CSV columns: spec_id,horizon,coef_name,estimate,se,stars,n_obs,r2.
void write_regression_csv(const std::vector<std::pair<std::string, RegressionResult>>& results,
                          const std::filesystem::path& path);

// Plain-text table in the four-column cumulative-controls layout.
std::string format_regression_table(
    const std::vector<RegressionResult>& columns, const std::string& title);

std::string significance_stars(double estimate, double se);

}  // namespace emshock
