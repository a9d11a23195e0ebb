#pragma once

#include <filesystem>

#include "emshock/firm_panel.hpp"
#include "emshock/macro_panel.hpp"
#include "emshock/rng.hpp"

namespace emshock {

// Synthetic fixtures standing in for the proprietary inputs: a multi-country
// monthly macro panel driven by a common exogenous shock, and a firm-quarter
// balance-sheet panel whose investment loads on leverage x shock.

struct SynthMacroOptions {
  std::vector<std::string> countries = {"BRA", "CHL", "IDN", "MEX",
                                        "PER", "ZAF", "TUR"};
  std::vector<std::string> variables = {"us10y", "embi", "mpr",  "cpi",
                                        "ner",   "gdp",  "inv",  "tot"};
  Month start = Month(2004, 1);
  int n_months = 180;
  double shock_loading = 0.5;  // impact on the first variable
  std::uint64_t seed = 20180101;
};

void write_synthetic_macro_csv(const std::filesystem::path& path,
                               const SynthMacroOptions& options);

struct SynthFirmOptions {
  int n_firms = 120;
  int n_sectors = 6;
  Quarter start = Quarter(2004, 1);
  int n_quarters = 60;
  double interaction_beta = -0.4;  // loading of z_{t-1} * shock on growth
  double noise_sd = 0.02;
  std::uint64_t seed = 7;
};

void write_synthetic_firm_csv(const std::filesystem::path& firm_path,
                              const std::filesystem::path& shock_path,
                              const SynthFirmOptions& options);

}  // namespace emshock
