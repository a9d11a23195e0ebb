#include "emshock/macro_panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "emshock/csv.hpp"
#include "emshock/errors.hpp"

namespace emshock {

int MacroPanel::country_index(const std::string& id) const {
  for (std::size_t i = 0; i < countries.size(); ++i)
    if (countries[i] == id) return static_cast<int>(i);
  return -1;
}

int MacroPanel::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == name) return static_cast<int>(i);
  return -1;
}

int MacroPanel::month_index(Month m) const {
  if (months.empty() || m < months.front() || m > months.back()) return -1;
  return m.index - months.front().index;
}

MacroPanel load_macro_panel(const std::filesystem::path& path,
                            const MacroSchema& schema) {
  const CsvTable table = read_csv(path);
  const int c_country = table.require_column("country");
  const int c_date = table.require_column("date");
  const int c_variable = table.require_column("variable");
  const int c_value = table.require_column("value");

  if (schema.sample_end < schema.sample_start)
    throw Error(ErrorKind::SchemaMismatch, "sample window is empty");

  MacroPanel panel;
  panel.shock_name = schema.shock_name;
  panel.variables = schema.variables;
  for (Month m = schema.sample_start; m <= schema.sample_end; m = m.plus(1))
    panel.months.push_back(m);
  const std::size_t t_total = panel.months.size();
  panel.shock.assign(t_total, std::numeric_limits<double>::quiet_NaN());

  std::set<std::string> seen_countries;
  std::map<std::tuple<std::string, int, std::string>, std::string> seen_keys;

  struct Cell {
    int country, variable, month;
    double value;
  };
  std::vector<Cell> cells;

  for (const auto& row : table.rows) {
    const std::string& country = row[c_country];
    const Month m = parse_month(row[c_date]);
    const std::string& variable = row[c_variable];
    const double value = parse_double(row[c_value], path.string());

    if (m < schema.sample_start || m > schema.sample_end) continue;
    const auto [it, inserted] =
        seen_keys.emplace(std::make_tuple(country, m.index, variable), row[c_date]);
    if (!inserted) {
      // Same month from two different dates means sub-monthly sampling.
      if (it->second != row[c_date])
        throw Error(ErrorKind::NonMonthlyDates,
                    "dates " + it->second + " and " + row[c_date] +
                        " collide in month " + m.str());
      throw Error(ErrorKind::SchemaMismatch,
                  "duplicated (country,date,variable) row: " + country + "," +
                      m.str() + "," + variable);
    }

    if (variable == schema.shock_name) {
      const int t = m.index - schema.sample_start.index;
      if (!std::isnan(panel.shock[t]) && panel.shock[t] != value)
        throw Error(ErrorKind::SchemaMismatch,
                    "conflicting shock values at " + m.str());
      panel.shock[t] = value;
      continue;
    }

    if (panel.variable_index(variable) < 0) continue;  // not requested
    if (seen_countries.insert(country).second)
      panel.countries.push_back(country);
    cells.push_back({panel.country_index(country),
                     panel.variable_index(variable),
                     m.index - schema.sample_start.index, value});
  }

  if (panel.countries.empty())
    throw Error(ErrorKind::SchemaMismatch, "no country rows in window");

  const auto nv = static_cast<Eigen::Index>(panel.variables.size());
  panel.values.assign(
      panel.countries.size(),
      Matrix::Constant(nv, static_cast<Eigen::Index>(t_total),
                       std::numeric_limits<double>::quiet_NaN()));
  for (const auto& cell : cells)
    panel.values[cell.country](cell.variable, cell.month) = cell.value;

  // Interior gaps are estimation poison; edge gaps are only reported.
  for (std::size_t c = 0; c < panel.countries.size(); ++c) {
    for (Eigen::Index v = 0; v < nv; ++v) {
      int first = -1, last = -1;
      for (std::size_t t = 0; t < t_total; ++t) {
        if (!std::isnan(panel.values[c](v, static_cast<Eigen::Index>(t)))) {
          if (first < 0) first = static_cast<int>(t);
          last = static_cast<int>(t);
        }
      }
      if (first < 0)
        throw Error(ErrorKind::SchemaMismatch,
                    "variable '" + panel.variables[v] + "' absent for " +
                        panel.countries[c]);
      for (int t = first; t <= last; ++t)
        if (std::isnan(panel.values[c](v, t)))
          throw Error(ErrorKind::InteriorMissing,
                      panel.countries[c] + "/" + panel.variables[v] + " at " +
                          panel.months[static_cast<std::size_t>(t)].str());
      if (first > 0 || last + 1 < static_cast<int>(t_total))
        panel.coverage_notes.push_back(
            panel.countries[c] + "/" + panel.variables[v] + " covers " +
            panel.months[static_cast<std::size_t>(first)].str() + ".." +
            panel.months[static_cast<std::size_t>(last)].str());
    }
  }

  for (std::size_t t = 0; t < t_total; ++t)
    if (std::isnan(panel.shock[t]))
      throw Error(ErrorKind::InteriorMissing,
                  "shock series missing at " + panel.months[t].str());

  return panel;
}

std::vector<double> interpolate_quarterly_to_monthly(
    const std::vector<double>& quarterly) {
  if (quarterly.empty()) throw Error(ErrorKind::EmptyInput, "no quarters");
  for (double q : quarterly)
    if (!(q > 0.0))
      throw Error(ErrorKind::NonPositiveLevel,
                  "log interpolation requires positive levels");
  std::vector<double> monthly;
  monthly.reserve(3 * (quarterly.size() - 1) + 1);
  monthly.push_back(quarterly[0]);
  for (std::size_t q = 0; q + 1 < quarterly.size(); ++q) {
    const double step = std::log(quarterly[q + 1] / quarterly[q]) / 3.0;
    for (int k = 1; k <= 3; ++k)
      monthly.push_back(quarterly[q] * std::exp(step * k));
    monthly.back() = quarterly[q + 1];  // anchor exactly
  }
  return monthly;
}

namespace {

double collapse(std::vector<double>& bucket, AggregationMethod method) {
  if (bucket.empty()) return 0.0;
  if (method == AggregationMethod::Mean) {
    double sum = 0.0;
    for (double v : bucket) sum += v;
    return sum / static_cast<double>(bucket.size());
  }
  std::sort(bucket.begin(), bucket.end());
  const std::size_t n = bucket.size();
  return n % 2 ? bucket[n / 2] : 0.5 * (bucket[n / 2 - 1] + bucket[n / 2]);
}

}  // namespace

std::vector<double> aggregate_shocks_monthly(
    const std::vector<DatedValue>& events, Month start, Month end,
    AggregationMethod method) {
  const std::size_t t_total = static_cast<std::size_t>(end.index - start.index + 1);
  std::vector<std::vector<double>> buckets(t_total);
  for (const auto& e : events) {
    if (e.month < start || e.month > end) continue;
    buckets[static_cast<std::size_t>(e.month.index - start.index)].push_back(e.value);
  }
  std::vector<double> out(t_total);
  for (std::size_t t = 0; t < t_total; ++t) out[t] = collapse(buckets[t], method);
  return out;
}

std::vector<double> aggregate_shocks_quarterly(
    const std::vector<QuarterDatedValue>& events, Quarter start, Quarter end,
    AggregationMethod method) {
  const std::size_t t_total = static_cast<std::size_t>(end.index - start.index + 1);
  std::vector<std::vector<double>> buckets(t_total);
  for (const auto& e : events) {
    if (e.quarter < start || e.quarter > end) continue;
    buckets[static_cast<std::size_t>(e.quarter.index - start.index)].push_back(e.value);
  }
  std::vector<double> out(t_total);
  for (std::size_t t = 0; t < t_total; ++t) out[t] = collapse(buckets[t], method);
  return out;
}

double compute_fff_surprise(const ShockEvent& event, const FffOptions& options) {
  if (std::isnan(event.value_before))
    throw Error(ErrorKind::MissingTick, "missing pre-announcement tick");
  if (std::isnan(event.value_after))
    throw Error(ErrorKind::MissingTick, "missing post-announcement tick");
  const double raw = event.value_after - event.value_before;
  if (!options.rate_conversion) return raw;
  const double remaining = options.days_in_month - options.day_of_event;
  if (!(remaining > 0.0))
    throw Error(ErrorKind::SchemaMismatch, "event past contract expiry");
  // Price approximates 100 - implied rate, so the rate surprise flips sign.
  return -raw * options.days_in_month / remaining;
}

std::vector<ShockEvent> load_shock_events(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const int c_ts = table.require_column("timestamp");
  const int c_before = table.require_column("value_before");
  const int c_after = table.require_column("value_after");
  std::vector<ShockEvent> events;
  events.reserve(table.rows.size());
  for (const auto& row : table.rows)
    events.push_back({row[c_ts], parse_double(row[c_before], path.string()),
                      parse_double(row[c_after], path.string())});
  return events;
}

namespace {

int days_in_month(int year, int month) {
  static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 &&
      (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)))
    return 29;
  return days[month - 1];
}

}  // namespace

std::vector<DatedValue> fff_surprise_series(const std::vector<ShockEvent>& events,
                                            const FffOptions& options) {
  std::vector<DatedValue> out;
  out.reserve(events.size());
  for (const auto& event : events) {
    const std::string prefix =
        event.timestamp.size() >= 10 ? event.timestamp.substr(0, 10)
                                     : event.timestamp.substr(0, 7);
    const Month m = parse_month(prefix);
    FffOptions per_event = options;
    if (options.rate_conversion && prefix.size() == 10) {
      per_event.days_in_month = days_in_month(m.year(), m.month());
      per_event.day_of_event =
          std::min(static_cast<double>(std::stoi(prefix.substr(8, 2)) - 1),
                   per_event.days_in_month - 1.0);
    }
    out.push_back({m, compute_fff_surprise(event, per_event)});
  }
  return out;
}

}  // namespace emshock
