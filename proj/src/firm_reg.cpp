#include "emshock/firm_reg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "emshock/csv.hpp"
#include "emshock/errors.hpp"

namespace emshock {

double QuarterlySeries::at(Quarter q) const {
  const int offset = q.index - start.index;
  if (offset < 0 || offset >= static_cast<int>(values.size())) return kMissing;
  return values[static_cast<std::size_t>(offset)];
}

void RegressionSpec::validate() const {
  if (horizon < 0) throw Error(ErrorKind::ConfigInvalid, "horizon must be >= 0");
  if (include_level_shock && time_effects == TimeEffects::SectorTime)
    throw Error(ErrorKind::ConfigInvalid,
                "the shock level is collinear with sector-time effects; use "
                "sector-season effects");
}

double RegressionResult::coefficient(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return coefficients(static_cast<Eigen::Index>(i));
  throw Error(ErrorKind::ConfigInvalid, "no coefficient named '" + name + "'");
}

double RegressionResult::std_error(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return std_errors(static_cast<Eigen::Index>(i));
  throw Error(ErrorKind::ConfigInvalid, "no coefficient named '" + name + "'");
}

AbsorptionResult absorb_fixed_effects(
    const Matrix& data, const std::vector<std::vector<int>>& fe_sets) {
  const auto n_rows = static_cast<std::size_t>(data.rows());
  for (const auto& fe : fe_sets)
    if (fe.size() != n_rows)
      throw Error(ErrorKind::ConfigInvalid, "fixed-effect labels missing on rows");

  // Dropping singletons in one dimension can create new ones in another.
  std::vector<bool> keep(n_rows, true);
  int dropped = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& fe : fe_sets) {
      std::map<int, int> count;
      for (std::size_t i = 0; i < n_rows; ++i)
        if (keep[i]) ++count[fe[i]];
      for (std::size_t i = 0; i < n_rows; ++i)
        if (keep[i] && count[fe[i]] == 1) {
          keep[i] = false;
          ++dropped;
          changed = true;
        }
    }
  }

  AbsorptionResult result;
  result.dropped_singletons = dropped;
  for (std::size_t i = 0; i < n_rows; ++i)
    if (keep[i]) result.kept_rows.push_back(i);
  const auto kept = static_cast<Eigen::Index>(result.kept_rows.size());
  if (kept == 0)
    throw Error(ErrorKind::InsufficientObservations,
                "all rows dropped as singletons");

  result.data.resize(kept, data.cols());
  std::vector<std::vector<int>> labels(fe_sets.size(), std::vector<int>(result.kept_rows.size()));
  for (Eigen::Index i = 0; i < kept; ++i) {
    result.data.row(i) = data.row(static_cast<Eigen::Index>(result.kept_rows[static_cast<std::size_t>(i)]));
    for (std::size_t s = 0; s < fe_sets.size(); ++s)
      labels[s][static_cast<std::size_t>(i)] =
          fe_sets[s][result.kept_rows[static_cast<std::size_t>(i)]];
  }

  const Eigen::RowVectorXd pre_ss = result.data.colwise().squaredNorm();

  // Group index maps for fast demeaning.
  std::vector<std::vector<std::vector<Eigen::Index>>> groups(fe_sets.size());
  for (std::size_t s = 0; s < fe_sets.size(); ++s) {
    std::map<int, int> dense;
    for (int label : labels[s])
      dense.emplace(label, static_cast<int>(dense.size()));
    groups[s].resize(dense.size());
    for (std::size_t i = 0; i < labels[s].size(); ++i)
      groups[s][static_cast<std::size_t>(dense[labels[s][i]])].push_back(
          static_cast<Eigen::Index>(i));
  }

  const int max_iterations = 10000;
  int it = 0;
  for (; it < max_iterations; ++it) {
    double max_update = 0.0;
    for (const auto& dimension : groups) {
      for (const auto& members : dimension) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(result.data.cols());
        for (Eigen::Index r : members) mean += result.data.row(r);
        mean /= static_cast<double>(members.size());
        max_update = std::max(max_update, mean.cwiseAbs().maxCoeff());
        for (Eigen::Index r : members) result.data.row(r) -= mean;
      }
    }
    if (max_update < 1e-8) break;
  }
  result.iterations = it + 1;

  for (Eigen::Index c = 0; c < result.data.cols(); ++c) {
    const double post = result.data.col(c).squaredNorm();
    if (pre_ss(c) > 1e-16 && post <= 1e-20 * pre_ss(c))
      throw Error(ErrorKind::NoVariationLeft,
                  "column " + std::to_string(c) + " fully absorbed");
  }
  return result;
}

namespace {

Matrix cluster_meat(const Matrix& x, const Vector& residuals,
                    const std::vector<int>& labels) {
  std::map<int, Eigen::RowVectorXd> scores;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    auto [it, inserted] = scores.try_emplace(
        labels[static_cast<std::size_t>(i)], Eigen::RowVectorXd::Zero(x.cols()));
    it->second += residuals(i) * x.row(i);
  }
  Matrix meat = Matrix::Zero(x.cols(), x.cols());
  for (const auto& [label, s] : scores) meat += s.transpose() * s;
  return meat;
}

double small_sample_factor(std::size_t n_clusters, Eigen::Index n, Eigen::Index k) {
  const double g = static_cast<double>(n_clusters);
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return g / (g - 1.0) * (nn - 1.0) / (nn - kk);
}

std::size_t count_clusters(const std::vector<int>& labels) {
  return std::set<int>(labels.begin(), labels.end()).size();
}

}  // namespace

ClusteredVcov clustered_vcov(const Matrix& x, const Vector& residuals,
                             const std::vector<std::vector<int>>& cluster_sets) {
  if (cluster_sets.empty() || cluster_sets.size() > 2)
    throw Error(ErrorKind::ConfigInvalid, "one or two cluster dimensions required");
  for (const auto& labels : cluster_sets)
    if (labels.size() != static_cast<std::size_t>(x.rows()))
      throw Error(ErrorKind::ConfigInvalid, "cluster labels missing on rows");

  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  const Matrix bread = (x.transpose() * x).ldlt().solve(Matrix::Identity(k, k));

  ClusteredVcov out;
  const auto one_way = [&](const std::vector<int>& labels) {
    const std::size_t g = count_clusters(labels);
    if (g <= 1)
      throw Error(ErrorKind::ConfigInvalid, "need at least two clusters");
    if (g < static_cast<std::size_t>(k))
      out.warnings.push_back("FewerClustersThanRegressors: " +
                             std::to_string(g) + " clusters for " +
                             std::to_string(k) + " regressors");
    const Matrix meat = cluster_meat(x, residuals, labels);
    return Matrix(small_sample_factor(g, n, k) * bread * meat * bread);
  };

  if (cluster_sets.size() == 1) {
    out.vcov = one_way(cluster_sets[0]);
    return out;
  }

  const Matrix v_first = one_way(cluster_sets[0]);
  const Matrix v_second = one_way(cluster_sets[1]);

  // Intersection labels: dense ids for observed pairs.
  std::map<std::pair<int, int>, int> pair_ids;
  std::vector<int> pair_labels(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < pair_labels.size(); ++i) {
    const auto key = std::make_pair(cluster_sets[0][i], cluster_sets[1][i]);
    pair_labels[i] =
        pair_ids.emplace(key, static_cast<int>(pair_ids.size())).first->second;
  }
  const Matrix v_pair = one_way(pair_labels);

  out.vcov = v_first + v_second - v_pair;
  for (Eigen::Index i = 0; i < k; ++i)
    if (out.vcov(i, i) < 0.0) {
      out.vcov(i, i) = std::max(v_first(i, i), v_second(i, i));
      out.floored = true;
    }
  return out;
}

namespace {

struct AssembledData {
  Matrix columns;  // [y | X]
  std::vector<std::string> names;
  std::vector<std::vector<int>> fe_sets;  // firm, sector-time or sector-season
  std::vector<int> firm_labels;
  std::vector<int> time_labels;
};

AssembledData assemble(const FirmPanel& panel, const QuarterlySeries& shock,
                       const RegressionSpec& spec,
                       const std::optional<AggregateSeries>& aggregates) {
  spec.validate();
  if (spec.aggregate_controls && !aggregates)
    throw Error(ErrorKind::ConfigInvalid,
                "aggregate controls requested without aggregate series");
  if (spec.horizon > panel.horizons)
    throw Error(ErrorKind::ConfigInvalid,
                "horizon " + std::to_string(spec.horizon) +
                    " beyond built regressors (J = " +
                    std::to_string(panel.horizons) + ")");

  std::vector<std::string> names;
  names.push_back("interaction");
  if (spec.include_level_shock) names.push_back("shock");
  if (spec.control_lag_asset_growth) names.push_back("lag_asset_growth");
  if (spec.control_lag_mismatch) names.push_back("lag_mismatch");
  if (spec.control_lag_leverage) names.push_back("lag_leverage");
  if (spec.aggregate_controls)
    for (const char* base : {"inflation", "log_gdp", "log_fx"})
      for (int lag = 1; lag <= 4; ++lag)
        names.push_back(std::string(base) + "_l" + std::to_string(lag));

  const auto aggregate_at = [&](const std::vector<double>& series,
                                Quarter q) -> double {
    const int offset = q.index - aggregates->start.index;
    if (offset < 0 || offset >= static_cast<int>(series.size())) return kMissing;
    return series[static_cast<std::size_t>(offset)];
  };

  std::map<std::string, int> firm_ids;
  std::map<std::pair<std::string, int>, int> group_ids;

  AssembledData data;
  data.names = names;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<int> firm_l, group_l, time_l;

  for (const auto& obs : panel.rows) {
    const double y = obs.dlogk[static_cast<std::size_t>(spec.horizon)];
    const double eps = shock.at(obs.quarter);
    if (!std::isfinite(y) || !std::isfinite(eps)) continue;

    double interaction = kMissing;
    if (std::isfinite(obs.z_lag)) {
      switch (spec.interaction) {
        case InteractionType::Standardized:
          interaction = obs.z_lag * eps;
          break;
        case InteractionType::IndicatorAboveMean:
          interaction = (obs.z_lag > 0.0 ? 1.0 : 0.0) * eps;
          break;
        case InteractionType::IndicatorAboveOneSd:
          interaction = (obs.z_lag > 1.0 ? 1.0 : 0.0) * eps;
          break;
      }
    }

    Eigen::RowVectorXd row(1 + static_cast<Eigen::Index>(names.size()));
    Eigen::Index c = 0;
    row(c++) = y;
    row(c++) = interaction;
    if (spec.include_level_shock) row(c++) = eps;
    if (spec.control_lag_asset_growth) row(c++) = obs.lag_asset_growth;
    if (spec.control_lag_mismatch) row(c++) = obs.lag_mismatch;
    if (spec.control_lag_leverage) row(c++) = obs.lag_leverage;
    if (spec.aggregate_controls) {
      for (const auto* series :
           {&aggregates->inflation, &aggregates->log_gdp, &aggregates->log_fx})
        for (int lag = 1; lag <= 4; ++lag)
          row(c++) = aggregate_at(*series, obs.quarter.plus(-lag));
    }
    if (!row.allFinite()) continue;

    const int firm =
        firm_ids.emplace(obs.firm, static_cast<int>(firm_ids.size())).first->second;
    const int time_key = spec.time_effects == TimeEffects::SectorTime
                             ? obs.quarter.index
                             : obs.quarter.quarter();
    const int group = group_ids
                          .emplace(std::make_pair(obs.sector, time_key),
                                   static_cast<int>(group_ids.size()))
                          .first->second;
    rows.push_back(row);
    firm_l.push_back(firm);
    group_l.push_back(group);
    time_l.push_back(obs.quarter.index);
  }

  if (rows.empty())
    throw Error(ErrorKind::InsufficientObservations, "no usable rows");

  data.columns.resize(static_cast<Eigen::Index>(rows.size()),
                      1 + static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    data.columns.row(static_cast<Eigen::Index>(i)) = rows[i];
  data.fe_sets = {firm_l, group_l};
  data.firm_labels = std::move(firm_l);
  data.time_labels = std::move(time_l);
  return data;
}

}  // namespace

RegressionResult estimate_spec(const FirmPanel& panel,
                               const QuarterlySeries& shock,
                               const RegressionSpec& spec,
                               const std::optional<AggregateSeries>& aggregates) {
  AssembledData data = assemble(panel, shock, spec, aggregates);
  const AbsorptionResult absorbed =
      absorb_fixed_effects(data.columns, data.fe_sets);

  const Eigen::Index k = static_cast<Eigen::Index>(data.names.size());
  const Eigen::Index n = absorbed.data.rows();
  const Vector y = absorbed.data.col(0);
  const Matrix x = absorbed.data.rightCols(k);

  const Matrix xtx = x.transpose() * x;
  Eigen::FullPivLU<Matrix> lu(xtx);
  lu.setThreshold(1e-10);
  if (lu.rank() < k)
    throw Error(ErrorKind::RankDeficient,
                "design rank " + std::to_string(lu.rank()) + " < " +
                    std::to_string(k));
  const Vector beta = xtx.ldlt().solve(x.transpose() * y);
  const Vector residuals = y - x * beta;

  std::vector<std::vector<int>> clusters;
  std::vector<int> firm_kept, time_kept;
  for (std::size_t i : absorbed.kept_rows) {
    firm_kept.push_back(data.firm_labels[i]);
    time_kept.push_back(data.time_labels[i]);
  }
  clusters.push_back(firm_kept);
  if (spec.clustering == Clustering::FirmAndTime) clusters.push_back(time_kept);
  ClusteredVcov vc = clustered_vcov(x, residuals, clusters);

  RegressionResult result;
  result.names = data.names;
  result.coefficients = beta;
  result.vcov = vc.vcov;
  result.std_errors = vc.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
  result.n_obs = static_cast<long>(n);
  const double mean_y = y.mean();
  const double tss = (y.array() - mean_y).matrix().squaredNorm();
  result.r2_within = tss > 0.0 ? 1.0 - residuals.squaredNorm() / tss : 0.0;
  result.dropped_singletons = absorbed.dropped_singletons;
  result.absorption_iterations = absorbed.iterations;
  result.vcov_floored = vc.floored;
  result.warnings = std::move(vc.warnings);
  result.horizon = spec.horizon;
  return result;
}

std::vector<RegressionResult> local_projection(
    const FirmPanel& panel, const QuarterlySeries& shock, RegressionSpec spec,
    int max_horizon, const std::optional<AggregateSeries>& aggregates) {
  std::vector<RegressionResult> results;
  results.reserve(static_cast<std::size_t>(max_horizon) + 1);
  for (int j = 0; j <= max_horizon; ++j) {
    spec.horizon = j;
    results.push_back(estimate_spec(panel, shock, spec, aggregates));
  }
  return results;
}

std::string significance_stars(double estimate, double se) {
  if (!(se > 0.0)) return "";
  const double z = std::abs(estimate / se);
  if (z > 2.575829303549) return "***";  // p < 0.01
  if (z > 1.959963984540) return "**";   // p < 0.05
  if (z > 1.644853626951) return "*";    // p < 0.10
  return "";
}

void write_regression_csv(
    const std::vector<std::pair<std::string, RegressionResult>>& results,
    const std::filesystem::path& path) {
  CsvWriter writer(path, {"spec_id", "horizon", "coef_name", "estimate", "se",
                          "stars", "n_obs", "r2"});
  for (const auto& [spec_id, result] : results)
    for (std::size_t i = 0; i < result.names.size(); ++i) {
      const double est = result.coefficients(static_cast<Eigen::Index>(i));
      const double se = result.std_errors(static_cast<Eigen::Index>(i));
      writer.field(spec_id);
      writer.field(static_cast<double>(result.horizon));
      writer.field(result.names[i]);
      writer.field(est);
      writer.field(se);
      writer.field(significance_stars(est, se));
      writer.field(static_cast<double>(result.n_obs));
      writer.field(result.r2_within);
      writer.end_row();
    }
}

std::string format_regression_table(const std::vector<RegressionResult>& columns,
                                    const std::string& title) {
  std::ostringstream out;
  out << title << "\n";
  std::set<std::string> all_names;
  for (const auto& col : columns)
    for (const auto& name : col.names) all_names.insert(name);

  const auto cell = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };

  out << std::string(24, ' ');
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << "  (" << c + 1 << ")          ";
  out << "\n";
  for (const std::string& name :
       std::vector<std::string>{"interaction", "shock", "lag_asset_growth",
                                "lag_mismatch", "lag_leverage"}) {
    if (!all_names.count(name)) continue;
    std::string line1 = name;
    line1.resize(24, ' ');
    std::string line2(24, ' ');
    for (const auto& col : columns) {
      bool has = false;
      for (const auto& n : col.names) has = has || n == name;
      if (has) {
        const double est = col.coefficient(name);
        const double se = col.std_error(name);
        std::string c1 = cell(est) + significance_stars(est, se);
        c1.resize(15, ' ');
        std::string c2 = "(" + cell(se) + ")";
        c2.resize(15, ' ');
        line1 += c1;
        line2 += c2;
      } else {
        line1 += std::string(15, ' ');
        line2 += std::string(15, ' ');
      }
    }
    out << line1 << "\n" << line2 << "\n";
  }
  std::string nline = "Observations";
  nline.resize(24, ' ');
  std::string rline = "R2 (within)";
  rline.resize(24, ' ');
  for (const auto& col : columns) {
    std::string n = std::to_string(col.n_obs);
    n.resize(15, ' ');
    nline += n;
    std::string r = cell(col.r2_within);
    r.resize(15, ' ');
    rline += r;
  }
  out << nline << "\n" << rline << "\n";
  return out.str();
}

}  // namespace emshock
