#include "emshock/synth.hpp"

#include <cmath>

#include "emshock/csv.hpp"
#include "emshock/errors.hpp"

namespace emshock {

void write_synthetic_macro_csv(const std::filesystem::path& path,
                               const SynthMacroOptions& options) {
  const int n = static_cast<int>(options.variables.size());
  RngStream rng(options.seed);

  // Common exogenous shock series, sparse like announcement months.
  std::vector<double> shock(static_cast<std::size_t>(options.n_months), 0.0);
  for (auto& s : shock)
    if (rng.uniform() < 0.65) s = 0.08 * rng.normal();

  CsvWriter writer(path, {"country", "date", "variable", "value"});
  const auto emit = [&](const std::string& country, Month m,
                        const std::string& variable, double value) {
    writer.field(country);
    writer.field(m.str());
    writer.field(variable);
    writer.field(value);
    writer.end_row();
  };

  for (int t = 0; t < options.n_months; ++t)
    emit("US", options.start.plus(t), "shock",
         shock[static_cast<std::size_t>(t)]);

  // Stable AR(2) dynamics with a shared shock loading that decays down the
  // variable ordering; countries differ only through their innovations.
  for (const auto& country : options.countries) {
    std::vector<double> prev(static_cast<std::size_t>(n), 0.0);
    std::vector<double> prev2(static_cast<std::size_t>(n), 0.0);
    for (int t = 0; t < options.n_months; ++t) {
      for (int v = 0; v < n; ++v) {
        const double loading =
            options.shock_loading / (1.0 + 0.6 * static_cast<double>(v));
        double value = 0.55 * prev[static_cast<std::size_t>(v)] +
                       0.15 * prev2[static_cast<std::size_t>(v)] +
                       loading * shock[static_cast<std::size_t>(t)] +
                       0.05 * rng.normal();
        if (v > 0)
          value += 0.1 * prev[static_cast<std::size_t>(v - 1)];
        prev2[static_cast<std::size_t>(v)] = prev[static_cast<std::size_t>(v)];
        prev[static_cast<std::size_t>(v)] = value;
        emit(country, options.start.plus(t),
             options.variables[static_cast<std::size_t>(v)], value);
      }
    }
  }
}

void write_synthetic_firm_csv(const std::filesystem::path& firm_path,
                              const std::filesystem::path& shock_path,
                              const SynthFirmOptions& options) {
  RngStream rng(options.seed);

  std::vector<double> shock(static_cast<std::size_t>(options.n_quarters));
  for (auto& s : shock) s = 0.1 * rng.normal();

  {
    CsvWriter writer(shock_path, {"date", "value"});
    for (int q = 0; q < options.n_quarters; ++q) {
      writer.field(options.start.plus(q).last_month().str());
      writer.field(shock[static_cast<std::size_t>(q)]);
      writer.end_row();
    }
  }

  CsvWriter writer(firm_path,
                   {"firm_id", "sector", "quarter", "capital", "assets",
                    "liab_total", "liab_short", "liab_long", "liab_bank",
                    "fc_liab", "fc_assets"});

  for (int f = 0; f < options.n_firms; ++f) {
    const std::string firm = "F" + std::to_string(1000 + f);
    const std::string sector =
        "S" + std::to_string(f % options.n_sectors);
    const double firm_effect = 0.01 * rng.normal();
    const double lev_mean = 0.3 + 0.3 * rng.uniform();
    const double lev_sd = 0.05 + 0.05 * rng.uniform();

    double capital = 50.0 + 150.0 * rng.uniform();
    std::vector<double> leverage(static_cast<std::size_t>(options.n_quarters));
    double lev_state = lev_mean;
    for (int q = 0; q < options.n_quarters; ++q) {
      lev_state = lev_mean + 0.8 * (lev_state - lev_mean) +
                  lev_sd * std::sqrt(1.0 - 0.64) * rng.normal();
      leverage[static_cast<std::size_t>(q)] = std::max(0.02, lev_state);
    }
    const double z_denominator = lev_sd;  // population-scale proxy

    for (int q = 0; q < options.n_quarters; ++q) {
      if (q > 0) {
        const double z_lag =
            (leverage[static_cast<std::size_t>(q - 1)] - lev_mean) / z_denominator;
        const double growth = firm_effect +
                              options.interaction_beta * z_lag *
                                  shock[static_cast<std::size_t>(q)] +
                              options.noise_sd * rng.normal();
        capital *= std::exp(growth);
      }
      const double assets = capital * (1.4 + 0.2 * rng.uniform());
      const double liab_total = leverage[static_cast<std::size_t>(q)] * assets;
      const double short_share = 0.35 + 0.3 * rng.uniform();
      const double fc_liab = 0.2 * liab_total * rng.uniform();
      const double fc_assets = 0.15 * assets * rng.uniform();

      writer.field(firm);
      writer.field(sector);
      writer.field(options.start.plus(q).str());
      writer.field(capital);
      writer.field(assets);
      writer.field(liab_total);
      writer.field(liab_total * short_share);
      writer.field(liab_total * (1.0 - short_share));
      writer.field(liab_total * 0.4);
      writer.field(fc_liab);
      writer.field(fc_assets);
      writer.end_row();
    }
  }
}

}  // namespace emshock
