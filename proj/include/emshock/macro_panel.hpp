#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "emshock/dates.hpp"
#include "emshock/linalg.hpp"

namespace emshock {

// Country x variable x month panel plus the exogenous shock series that is
// common to every country block.
struct MacroPanel {
  std::vector<std::string> countries;
  std::vector<std::string> variables;
  std::vector<Month> months;              // strictly increasing, monthly
  std::vector<Matrix> values;             // per country: variable x month
  std::vector<double> shock;              // month-indexed, no gaps
  std::string shock_name = "shock";
  std::vector<std::string> coverage_notes;

  int country_index(const std::string& id) const;
  int variable_index(const std::string& name) const;
  int month_index(Month m) const;
  std::size_t n_months() const { return months.size(); }
};

struct MacroSchema {
  Month sample_start;
  Month sample_end;
  std::vector<std::string> variables;  // non-shock variables expected
  std::string shock_name = "shock";
};

// CSV columns: country,date,variable,value (header required, ISO dates).
// Rows whose variable equals schema.shock_name feed the shock series; their
// country field is ignored but conflicting duplicates are rejected.
MacroPanel load_macro_panel(const std::filesystem::path& path,
                            const MacroSchema& schema);

// Log-linear interpolation of a positive quarterly level series to monthly
// frequency. Output is anchored at quarter-end months: element 0 is the
// last month of the first quarter, length 3*(Q-1)+1.
std::vector<double> interpolate_quarterly_to_monthly(
    const std::vector<double>& quarterly);

enum class AggregationMethod { Median, Mean };

struct DatedValue {
  Month month;
  double value = 0.0;
};

// Collapses dated events onto a monthly window; months without events get 0.
std::vector<double> aggregate_shocks_monthly(
    const std::vector<DatedValue>& events, Month start, Month end,
    AggregationMethod method = AggregationMethod::Median);

struct QuarterDatedValue {
  Quarter quarter;
  double value = 0.0;
};

std::vector<double> aggregate_shocks_quarterly(
    const std::vector<QuarterDatedValue>& events, Quarter start, Quarter end,
    AggregationMethod method = AggregationMethod::Mean);

// Federal-funds-futures surprise around one announcement: the raw contract
// price difference across the event window.
struct ShockEvent {
  std::string timestamp;
  double value_before = std::numeric_limits<double>::quiet_NaN();
  double value_after = std::numeric_limits<double>::quiet_NaN();
};

struct FffOptions {
  // Convert to a rate surprise (100 - price) and scale by the days
  // remaining in the contract month.
  bool rate_conversion = false;
  double days_in_month = 30.0;
  double day_of_event = 0.0;
};

double compute_fff_surprise(const ShockEvent& event,
                            const FffOptions& options = {});

std::vector<ShockEvent> load_shock_events(const std::filesystem::path& path);

// One surprise per event, dated by the announcement month (ISO timestamp
// prefix). Feed through the aggregation ops to get a usable series.
std::vector<DatedValue> fff_surprise_series(const std::vector<ShockEvent>& events,
                                            const FffOptions& options = {});

}  // namespace emshock
