#include "emshock/entre.hpp"

#include <cmath>

#include "emshock/csv.hpp"
#include "emshock/errors.hpp"

namespace emshock {

void EntrepreneurParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::ConfigInvalid, "alpha must lie in (0,1)");
  if (!(beta_disc > 0.0 && beta_disc <= 1.0))
    throw Error(ErrorKind::ConfigInvalid, "discount factor must lie in (0,1]");
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorKind::ConfigInvalid, "theta must lie in (0,1)");
  if (!(k0 > 0.0)) throw Error(ErrorKind::ConfigInvalid, "k0 must be positive");
  if (!(1.0 + r1 > 0.0) || !(1.0 + r0 > 0.0))
    throw Error(ErrorKind::ConfigInvalid, "gross rates must be positive");
}

double EntrepreneurParams::initial_resources() const {
  return std::pow(k0, alpha) - b0 * (1.0 + r0);
}

double EntrepreneurSolution::utility(double beta_disc) const {
  return std::log(c0) + beta_disc * std::log(c1);
}

EntrepreneurSolution solve_unconstrained(const EntrepreneurParams& params) {
  params.validate();
  const double gross = 1.0 + params.r1;
  const double w0 = params.initial_resources();

  const double k1 = std::pow(gross / params.alpha, 1.0 / (params.alpha - 1.0));
  const double output = std::pow(k1, params.alpha);

  // Bond Euler 1/c0 = beta*(1+r1)/c1 is linear in b1 given k1.
  const double b1 = (output + params.beta_disc * gross * (k1 - w0)) /
                    (gross * (1.0 + params.beta_disc));
  const double c0 = w0 + b1 - k1;
  const double c1 = output - b1 * gross;
  if (!(c0 > 0.0) || !(c1 > 0.0))
    throw Error(ErrorKind::InfeasibleConsumption,
                "no positive consumption at the unconstrained optimum");
  if (!(b1 < params.theta * k1))
    throw Error(ErrorKind::ConstraintViolated,
                "unconstrained debt exceeds theta*k1");

  EntrepreneurSolution s;
  s.c0 = c0;
  s.c1 = c1;
  s.k1 = k1;
  s.b1 = b1;
  s.mu = 0.0;
  s.regime = Regime::Unconstrained;
  return s;
}

double constrained_euler_residual(const EntrepreneurParams& params, double k1) {
  const double gross = 1.0 + params.r1;
  const double w0 = params.initial_resources();
  const double c0 = w0 - k1 * (1.0 - params.theta);
  const double c1 = std::pow(k1, params.alpha) - params.theta * k1 * gross;
  const double mu = 1.0 / c0 - params.beta_disc * gross / c1;
  return params.alpha * std::pow(k1, params.alpha - 1.0) - gross -
         mu * c1 * (1.0 - params.theta) / params.beta_disc;
}

EntrepreneurSolution solve_constrained(const EntrepreneurParams& params) {
  params.validate();
  const double gross = 1.0 + params.r1;
  const double w0 = params.initial_resources();
  if (!(w0 > 0.0))
    throw Error(ErrorKind::InfeasibleConsumption,
                "initial resources exhausted by inherited debt");

  // Feasibility: c0 > 0 left of w0/(1-theta), c1 > 0 left of the point
  // where output only covers debt service.
  const double bound_c0 = w0 / (1.0 - params.theta);
  const double bound_c1 =
      std::pow(params.theta * gross, 1.0 / (params.alpha - 1.0));
  const double upper = std::min(bound_c0, bound_c1);

  // F has poles at both consumption edges; scan log-spaced candidates for a
  // sign change before bisecting.
  const int n_scan = 64;
  const double lo_frac = 1e-9, hi_frac = 1.0 - 1e-9;
  double lo = upper * lo_frac;
  double f_lo = constrained_euler_residual(params, lo);
  double hi = 0.0;
  bool bracketed = false;
  for (int i = 1; i <= n_scan; ++i) {
    const double frac =
        lo_frac * std::pow(hi_frac / lo_frac, static_cast<double>(i) / n_scan);
    const double k = upper * frac;
    const double f = constrained_euler_residual(params, k);
    if (std::isfinite(f_lo) && std::isfinite(f) &&
        ((f_lo > 0.0) != (f > 0.0))) {
      hi = k;
      bracketed = true;
      break;
    }
    lo = k;
    f_lo = f;
  }
  if (!bracketed)
    throw Error(ErrorKind::NoBracket,
                "no sign change of the Euler residual on the feasible interval");

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = constrained_euler_residual(params, mid);
    if (std::abs(f_mid) < 1e-10 && (hi - lo) < 1e-13 * upper) {
      lo = hi = mid;
      break;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double k1 = 0.5 * (lo + hi);

  EntrepreneurSolution s;
  s.k1 = k1;
  s.b1 = params.theta * k1;
  s.c0 = w0 - k1 * (1.0 - params.theta);
  s.c1 = std::pow(k1, params.alpha) - s.b1 * gross;
  s.mu = 1.0 / s.c0 - params.beta_disc * gross / s.c1;
  s.regime = Regime::Constrained;
  if (!(s.c0 > 0.0) || !(s.c1 > 0.0))
    throw Error(ErrorKind::InfeasibleConsumption,
                "no positive consumption at the constrained root");
  if (!(s.mu > 0.0))
    throw Error(ErrorKind::NegativeMultiplier,
                "bond-Euler multiplier is not positive; regime inconsistent");
  return s;
}

EntrepreneurSolution solve(const EntrepreneurParams& params) {
  params.validate();
  if (!(params.initial_resources() > 0.0))
    throw Error(ErrorKind::InfeasibleConsumption,
                "initial resources exhausted by inherited debt");
  try {
    return solve_unconstrained(params);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ConstraintViolated) throw;
    return solve_constrained(params);
  }
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "r1") return SweepAxis::Rate;
  if (name == "theta") return SweepAxis::Theta;
  if (name == "b0") return SweepAxis::InitialDebt;
  throw Error(ErrorKind::ConfigInvalid, "unknown sweep axis '" + name + "'");
}

SweepResult sweep(const EntrepreneurParams& params, SweepAxis axis,
                  const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw Error(ErrorKind::ConfigInvalid, "sweep grid must be sorted");

  SweepResult result;
  result.axis = axis;
  for (double value : grid) {
    EntrepreneurParams point = params;
    switch (axis) {
      case SweepAxis::Rate: point.r1 = value; break;
      case SweepAxis::Theta: point.theta = value; break;
      case SweepAxis::InitialDebt: point.b0 = value; break;
    }
    SweepPoint sp;
    sp.axis_value = value;
    try {
      sp.solution = solve(point);
    } catch (const Error& e) {
      sp.failed = true;
      sp.failure = e.what();
    }
    result.points.push_back(std::move(sp));
  }
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    const auto& a = result.points[i - 1];
    const auto& b = result.points[i];
    if (!a.failed && !b.failed && a.solution.regime != b.solution.regime)
      result.kinks.push_back(0.5 * (a.axis_value + b.axis_value));
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
  CsvWriter writer(path, {"axis_value", "k1", "b1", "c0", "c1", "mu", "regime"});
  for (const auto& p : result.points) {
    writer.field(p.axis_value);
    if (p.failed) {
      for (int i = 0; i < 5; ++i) writer.field(std::string("NA"));
      writer.field(std::string("failed"));
    } else {
      writer.field(p.solution.k1);
      writer.field(p.solution.b1);
      writer.field(p.solution.c0);
      writer.field(p.solution.c1);
      writer.field(p.solution.mu);
      writer.field(std::string(p.solution.regime == Regime::Unconstrained
                                   ? "unconstrained"
                                   : "constrained"));
    }
    writer.end_row();
  }
}

namespace {

double solved_k1(const EntrepreneurParams& params, Regime expected) {
  const EntrepreneurSolution s = solve(params);
  if (s.regime != expected)
    throw Error(ErrorKind::RegimeMismatch,
                "regime flipped under perturbation; shrink the step");
  return s.k1;
}

}  // namespace

PropositionReport verify_propositions(const EntrepreneurParams& unconstrained_side,
                                      const EntrepreneurParams& constrained_side,
                                      double relative_step) {
  const EntrepreneurSolution su = solve(unconstrained_side);
  const EntrepreneurSolution sc = solve(constrained_side);
  if (su.regime != Regime::Unconstrained || sc.regime != Regime::Constrained)
    throw Error(ErrorKind::RegimeMismatch,
                "parameter pair does not straddle the kink");

  PropositionReport report;
  const auto rate_derivative = [&](const EntrepreneurParams& base, Regime regime) {
    const double gross = 1.0 + base.r1;
    const double h = relative_step * gross;
    EntrepreneurParams up = base, down = base;
    up.r1 += h;
    down.r1 -= h;
    return (solved_k1(up, regime) - solved_k1(down, regime)) / (2.0 * h);
  };

  report.dk_dr_unconstrained =
      rate_derivative(unconstrained_side, Regime::Unconstrained);
  report.dk_dr_constrained = rate_derivative(constrained_side, Regime::Constrained);
  report.dk_dr_closed_form =
      1.0 / (unconstrained_side.alpha * (unconstrained_side.alpha - 1.0) *
             std::pow(su.k1, unconstrained_side.alpha - 2.0));

  {
    const double h = relative_step * constrained_side.theta;
    EntrepreneurParams up = constrained_side, down = constrained_side;
    up.theta += h;
    down.theta -= h;
    report.dk_dtheta_constrained =
        (solved_k1(up, Regime::Constrained) - solved_k1(down, Regime::Constrained)) /
        (2.0 * h);
  }

  report.derivatives_negative =
      report.dk_dr_unconstrained < 0.0 && report.dk_dr_constrained < 0.0;
  report.unconstrained_larger =
      std::abs(report.dk_dr_unconstrained) > std::abs(report.dk_dr_constrained);
  report.closed_form_matches =
      std::abs(report.dk_dr_unconstrained - report.dk_dr_closed_form) <=
      1e-6 * std::abs(report.dk_dr_closed_form);
  report.theta_derivative_positive = report.dk_dtheta_constrained > 0.0;
  return report;
}

}  // namespace emshock
