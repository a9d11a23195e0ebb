#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "emshock/dates.hpp"

namespace emshock {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

enum class LeverageDefinition { Total, Short, Long, Bank };

LeverageDefinition parse_leverage_definition(const std::string& name);

// One firm-quarter observation. Raw balance-sheet fields come from the CSV;
// derived fields are filled by build_firm_regressors / standardize_leverage
// and stay NaN where undefined (rows are flagged, never dropped silently).
struct FirmObservation {
  std::string firm;
  std::string sector;
  Quarter quarter;

  double capital = kMissing;
  double assets = kMissing;
  double liab_total = kMissing;
  double liab_short = kMissing;
  double liab_long = kMissing;
  double liab_bank = kMissing;
  double fc_liab = kMissing;
  double fc_assets = kMissing;

  double leverage = kMissing;           // chosen liabilities / assets
  double mismatch = kMissing;           // (fc_liab - fc_assets) / assets
  double lag_leverage = kMissing;       // l_{t-1}
  double lag_asset_growth = kMissing;   // dlog assets_{t-1}
  double lag_mismatch = kMissing;
  double z_current = kMissing;          // (l_t - mean_i) / sd_i
  double z_lag = kMissing;              // (l_{t-1} - mean_i) / sd_i
  std::vector<double> dlogk;            // log k_{t+j} - log k_{t-1}, j = 0..J
};

struct FirmPanel {
  std::vector<FirmObservation> rows;    // sorted by (firm, quarter)
  int horizons = 0;                     // J in dlogk
  std::vector<std::string> short_history_firms;  // < 3 obs, excluded from z
};

// CSV columns: firm_id,sector,quarter,capital,assets,liab_total,liab_short,
// liab_long,liab_bank,fc_liab,fc_assets.
FirmPanel load_firm_panel(const std::filesystem::path& path);

// Adds growth horizons, the chosen leverage ratio, currency mismatch and
// the lagged controls. Cumulative growth log k_{t+j} - log k_{t-1} is
// defined only when the firm is observed at every quarter from t-1 to t+j
// with positive capital at both endpoints; interior gaps break the chain.
void build_firm_regressors(FirmPanel& panel, LeverageDefinition definition,
                           int horizons);

// Firm-by-firm standardization of leverage with the sample (n-1) standard
// deviation. Firms with fewer than 3 observations are flagged and excluded;
// a firm with constant leverage throws ZeroVariance.
void standardize_leverage(FirmPanel& panel);

struct WinsorizeOptions {
  double lower_percentile = 0.0;
  double upper_percentile = 1.0;
};

// Optional trimming of the growth columns; off by default.
void winsorize_growth(FirmPanel& panel, const WinsorizeOptions& options);

}  // namespace emshock
