#include <doctest.h>

#include <cmath>

#include "emshock/errors.hpp"
#include "emshock/firm_panel.hpp"
#include "emshock/rng.hpp"

using namespace emshock;

namespace {

FirmObservation obs(const std::string& firm, Quarter q, double capital,
                    double assets, double liab) {
  FirmObservation o;
  o.firm = firm;
  o.sector = "S0";
  o.quarter = q;
  o.capital = capital;
  o.assets = assets;
  o.liab_total = liab;
  o.liab_short = 0.5 * liab;
  o.liab_long = 0.5 * liab;
  o.liab_bank = 0.3 * liab;
  o.fc_liab = 0.0;
  o.fc_assets = 0.0;
  return o;
}

}  // namespace

TEST_CASE("growth, leverage and mismatch definitions") {
  FirmPanel panel;
  const Quarter q0(2010, 1);
  panel.rows = {obs("A", q0, 100, 100, 48.1), obs("A", q0.plus(1), 110, 100, 50)};
  build_firm_regressors(panel, LeverageDefinition::Total, 0);

  CHECK(panel.rows[1].dlogk[0] == doctest::Approx(std::log(1.1)).epsilon(1e-12));
  CHECK(panel.rows[0].leverage == doctest::Approx(0.481).epsilon(1e-12));
  CHECK(panel.rows[0].mismatch == 0.0);
  CHECK(std::isnan(panel.rows[0].dlogk[0]));  // no prior quarter
}

TEST_CASE("interior gaps break the growth chain; exits drop later horizons") {
  FirmPanel panel;
  const Quarter q0(2010, 1);
  // Quarters 0,1,2,3,4 present, then exit; horizons up to 4 requested.
  for (int i = 0; i <= 4; ++i)
    panel.rows.push_back(obs("A", q0.plus(i), 100 * std::pow(1.05, i), 100, 50));
  build_firm_regressors(panel, LeverageDefinition::Total, 4);

  // Row at quarter 1: t-1 = quarter 0, horizons j reach quarter 1+j <= 4.
  const auto& row1 = panel.rows[1];
  for (int j = 0; j <= 3; ++j) CHECK(std::isfinite(row1.dlogk[static_cast<std::size_t>(j)]));
  CHECK(std::isnan(row1.dlogk[4]));  // quarter 5 unobserved

  FirmPanel gapped;
  for (int i = 0; i <= 4; ++i) {
    if (i == 2) continue;
    gapped.rows.push_back(obs("B", q0.plus(i), 100, 100, 50));
  }
  build_firm_regressors(gapped, LeverageDefinition::Total, 4);
  const auto& grow = gapped.rows[1];  // quarter 1, t-1 = quarter 0
  CHECK(std::isfinite(grow.dlogk[0]));
  CHECK(std::isnan(grow.dlogk[1]));  // quarter 2 missing breaks the chain
  CHECK(std::isnan(grow.dlogk[2]));  // no bridging over the gap
}

TEST_CASE("alternative leverage definitions select the liability column") {
  FirmPanel panel;
  panel.rows = {obs("A", Quarter(2010, 1), 100, 200, 80)};
  build_firm_regressors(panel, LeverageDefinition::Short, 0);
  CHECK(panel.rows[0].leverage == doctest::Approx(40.0 / 200.0));
  build_firm_regressors(panel, LeverageDefinition::Bank, 0);
  CHECK(panel.rows[0].leverage == doctest::Approx(24.0 / 200.0));
}

TEST_CASE("standardization by firm mean and sample sd") {
  FirmPanel panel;
  const Quarter q0(2010, 1);
  panel.rows = {obs("A", q0, 100, 100, 20), obs("A", q0.plus(1), 100, 100, 40),
                obs("A", q0.plus(2), 100, 100, 60)};
  build_firm_regressors(panel, LeverageDefinition::Total, 0);
  standardize_leverage(panel);

  CHECK(panel.rows[0].z_current == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(panel.rows[1].z_current == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(panel.rows[2].z_current == doctest::Approx(1.0).epsilon(1e-12));
  // z_lag shifts the standardized value one quarter forward.
  CHECK(std::isnan(panel.rows[0].z_lag));
  CHECK(panel.rows[1].z_lag == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(panel.rows[2].z_lag == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("standardized leverage has firm mean 0 and sd 1") {
  FirmPanel panel;
  const Quarter q0(2005, 1);
  RngStream rng(17);
  for (int f = 0; f < 5; ++f)
    for (int t = 0; t < 12; ++t) {
      auto o = obs("F" + std::to_string(f), q0.plus(t), 100, 100,
                   40 + 10 * rng.normal());
      panel.rows.push_back(o);
    }
  build_firm_regressors(panel, LeverageDefinition::Total, 0);
  standardize_leverage(panel);

  for (int f = 0; f < 5; ++f) {
    double sum = 0, ss = 0;
    int n = 0;
    for (const auto& r : panel.rows)
      if (r.firm == "F" + std::to_string(f)) {
        sum += r.z_current;
        ss += r.z_current * r.z_current;
        ++n;
      }
    const double mean = sum / n;
    const double sd = std::sqrt((ss - n * mean * mean) / (n - 1));
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(sd - 1.0) < 1e-10);
  }
}

TEST_CASE("constant leverage throws, short histories are flagged") {
  FirmPanel flat;
  const Quarter q0(2010, 1);
  flat.rows = {obs("A", q0, 100, 100, 50), obs("A", q0.plus(1), 100, 100, 50),
               obs("A", q0.plus(2), 100, 100, 50)};
  build_firm_regressors(flat, LeverageDefinition::Total, 0);
  try {
    standardize_leverage(flat);
    FAIL("expected ZeroVariance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroVariance);
  }

  FirmPanel shortp;
  shortp.rows = {obs("B", q0, 100, 100, 40), obs("B", q0.plus(1), 100, 100, 60)};
  build_firm_regressors(shortp, LeverageDefinition::Total, 0);
  standardize_leverage(shortp);
  REQUIRE(shortp.short_history_firms.size() == 1);
  CHECK(shortp.short_history_firms[0] == "B");
  CHECK(std::isnan(shortp.rows[0].z_current));
}

TEST_CASE("winsorization clamps the growth tails") {
  FirmPanel panel;
  const Quarter q0(2010, 1);
  double capital = 100;
  for (int t = 0; t < 40; ++t) {
    capital *= (t == 20 ? 3.0 : 1.01);
    panel.rows.push_back(obs("A", q0.plus(t), capital, 100, 50));
  }
  build_firm_regressors(panel, LeverageDefinition::Total, 0);
  double max_before = 0;
  for (const auto& r : panel.rows)
    if (std::isfinite(r.dlogk[0])) max_before = std::max(max_before, r.dlogk[0]);
  winsorize_growth(panel, {0.05, 0.95});
  double max_after = 0;
  for (const auto& r : panel.rows)
    if (std::isfinite(r.dlogk[0])) max_after = std::max(max_after, r.dlogk[0]);
  CHECK(max_after < max_before);
}
