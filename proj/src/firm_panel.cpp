#include "emshock/firm_panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "emshock/csv.hpp"
#include "emshock/errors.hpp"
#include "emshock/linalg.hpp"

namespace emshock {

LeverageDefinition parse_leverage_definition(const std::string& name) {
  if (name == "total") return LeverageDefinition::Total;
  if (name == "short") return LeverageDefinition::Short;
  if (name == "long") return LeverageDefinition::Long;
  if (name == "bank") return LeverageDefinition::Bank;
  throw Error(ErrorKind::ConfigInvalid, "unknown leverage definition '" + name + "'");
}

FirmPanel load_firm_panel(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const int c_firm = table.require_column("firm_id");
  const int c_sector = table.require_column("sector");
  const int c_quarter = table.require_column("quarter");
  const int c_capital = table.require_column("capital");
  const int c_assets = table.require_column("assets");
  const int c_lt = table.require_column("liab_total");
  const int c_ls = table.require_column("liab_short");
  const int c_ll = table.require_column("liab_long");
  const int c_lb = table.require_column("liab_bank");
  const int c_fcl = table.require_column("fc_liab");
  const int c_fca = table.require_column("fc_assets");

  FirmPanel panel;
  panel.rows.reserve(table.rows.size());
  std::map<std::pair<std::string, int>, bool> seen;
  for (const auto& row : table.rows) {
    FirmObservation obs;
    obs.firm = row[c_firm];
    obs.sector = row[c_sector];
    obs.quarter = parse_quarter(row[c_quarter]);
    if (!seen.emplace(std::make_pair(obs.firm, obs.quarter.index), true).second)
      throw Error(ErrorKind::SchemaMismatch,
                  "duplicated (firm, quarter): " + obs.firm + " " +
                      obs.quarter.str());
    obs.capital = parse_double(row[c_capital], path.string());
    obs.assets = parse_double(row[c_assets], path.string());
    obs.liab_total = parse_double(row[c_lt], path.string());
    obs.liab_short = parse_double(row[c_ls], path.string());
    obs.liab_long = parse_double(row[c_ll], path.string());
    obs.liab_bank = parse_double(row[c_lb], path.string());
    obs.fc_liab = parse_double(row[c_fcl], path.string());
    obs.fc_assets = parse_double(row[c_fca], path.string());
    panel.rows.push_back(std::move(obs));
  }
  std::sort(panel.rows.begin(), panel.rows.end(),
            [](const FirmObservation& a, const FirmObservation& b) {
              if (a.firm != b.firm) return a.firm < b.firm;
              return a.quarter < b.quarter;
            });
  return panel;
}

namespace {

double chosen_liabilities(const FirmObservation& obs, LeverageDefinition def) {
  switch (def) {
    case LeverageDefinition::Total: return obs.liab_total;
    case LeverageDefinition::Short: return obs.liab_short;
    case LeverageDefinition::Long: return obs.liab_long;
    case LeverageDefinition::Bank: return obs.liab_bank;
  }
  return kMissing;
}

}  // namespace

void build_firm_regressors(FirmPanel& panel, LeverageDefinition definition,
                           int horizons) {
  panel.horizons = horizons;
  auto& rows = panel.rows;

  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].firm == rows[begin].firm) ++end;

    std::map<int, std::size_t> by_quarter;
    for (std::size_t i = begin; i < end; ++i)
      by_quarter[rows[i].quarter.index] = i;
    const auto at = [&](Quarter q) -> int {
      const auto it = by_quarter.find(q.index);
      return it == by_quarter.end() ? -1 : static_cast<int>(it->second);
    };

    for (std::size_t i = begin; i < end; ++i) {
      auto& obs = rows[i];
      const double liab = chosen_liabilities(obs, definition);
      obs.leverage = (obs.assets > 0.0 && std::isfinite(liab))
                         ? liab / obs.assets
                         : kMissing;
      obs.mismatch = (obs.assets > 0.0 && std::isfinite(obs.fc_liab) &&
                      std::isfinite(obs.fc_assets))
                         ? (obs.fc_liab - obs.fc_assets) / obs.assets
                         : kMissing;
    }

    for (std::size_t i = begin; i < end; ++i) {
      auto& obs = rows[i];
      const int prev = at(obs.quarter.plus(-1));
      const int prev2 = at(obs.quarter.plus(-2));
      obs.lag_leverage = prev >= 0 ? rows[prev].leverage : kMissing;
      obs.lag_mismatch = prev >= 0 ? rows[prev].mismatch : kMissing;
      if (prev >= 0 && prev2 >= 0 && rows[prev].assets > 0.0 &&
          rows[prev2].assets > 0.0)
        obs.lag_asset_growth =
            std::log(rows[prev].assets) - std::log(rows[prev2].assets);
      else
        obs.lag_asset_growth = kMissing;

      obs.dlogk.assign(static_cast<std::size_t>(horizons) + 1, kMissing);
      if (prev >= 0 && rows[prev].capital > 0.0) {
        const double base = std::log(rows[prev].capital);
        for (int j = 0; j <= horizons; ++j) {
          // No gap-bridging: the chain breaks at the first missing quarter.
          const int target = at(obs.quarter.plus(j));
          if (target < 0) break;
          if (rows[target].capital > 0.0)
            obs.dlogk[static_cast<std::size_t>(j)] =
                std::log(rows[target].capital) - base;
        }
      }
    }
    begin = end;
  }
}

void standardize_leverage(FirmPanel& panel) {
  auto& rows = panel.rows;
  panel.short_history_firms.clear();

  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].firm == rows[begin].firm) ++end;

    std::vector<double> lev;
    for (std::size_t i = begin; i < end; ++i)
      if (std::isfinite(rows[i].leverage)) lev.push_back(rows[i].leverage);

    if (lev.size() < 3) {
      panel.short_history_firms.push_back(rows[begin].firm);
      for (std::size_t i = begin; i < end; ++i) {
        rows[i].z_current = kMissing;
        rows[i].z_lag = kMissing;
      }
      begin = end;
      continue;
    }

    double mean = 0.0;
    for (double v : lev) mean += v;
    mean /= static_cast<double>(lev.size());
    double ss = 0.0;
    for (double v : lev) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(lev.size() - 1));
    if (!(sd > 0.0))
      throw Error(ErrorKind::ZeroVariance,
                  "firm '" + rows[begin].firm + "' has constant leverage");

    for (std::size_t i = begin; i < end; ++i) {
      rows[i].z_current = std::isfinite(rows[i].leverage)
                              ? (rows[i].leverage - mean) / sd
                              : kMissing;
      rows[i].z_lag = std::isfinite(rows[i].lag_leverage)
                          ? (rows[i].lag_leverage - mean) / sd
                          : kMissing;
    }
    begin = end;
  }
}

void winsorize_growth(FirmPanel& panel, const WinsorizeOptions& options) {
  if (options.lower_percentile <= 0.0 && options.upper_percentile >= 1.0) return;
  for (int j = 0; j <= panel.horizons; ++j) {
    std::vector<double> values;
    for (const auto& r : panel.rows)
      if (std::isfinite(r.dlogk[static_cast<std::size_t>(j)]))
        values.push_back(r.dlogk[static_cast<std::size_t>(j)]);
    if (values.empty()) continue;
    const auto bounds =
        quantiles(values, {options.lower_percentile, options.upper_percentile});
    for (auto& r : panel.rows) {
      double& v = r.dlogk[static_cast<std::size_t>(j)];
      if (std::isfinite(v)) v = std::clamp(v, bounds[0], bounds[1]);
    }
  }
}

}  // namespace emshock
