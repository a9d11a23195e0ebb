#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace emshock {

// Two-period entrepreneur with log utility, production k^alpha, full capital
// depreciation and the leverage constraint b1 <= theta * k1.
struct EntrepreneurParams {
  double alpha = 0.3;      // production curvature, in (0,1)
  double beta_disc = 0.95; // discount factor
  double theta = 0.5;      // leverage-constraint fraction, in (0,1)
  double k0 = 1.0;         // initial capital
  double b0 = 0.0;         // initial debt
  double r0 = 0.05;        // initial interest rate
  double r1 = 0.05;        // period-1 interest rate

  void validate() const;
  // Resources available in period 0 before new borrowing.
  double initial_resources() const;
};

enum class Regime { Unconstrained, Constrained };

struct EntrepreneurSolution {
  double c0 = 0, c1 = 0, k1 = 0, b1 = 0, mu = 0;
  Regime regime = Regime::Unconstrained;

  double utility(double beta_disc) const;
};

// Closed form k1* = ((1+r1)/alpha)^(1/(alpha-1)); debt from the bond Euler
// equation, which is linear in b1 given k1*. Throws ConstraintViolated when
// the candidate breaches b1 < theta*k1, signalling the constrained solver.
EntrepreneurSolution solve_unconstrained(const EntrepreneurParams& params);

// Binding constraint b1 = theta*k1; k1 is the root of the implicit function
//   F(k1) = alpha k1^(a-1) - (1+r1) - mu(k1) * c1(k1) * (1-theta) / beta
// bracketed by a 64-point log-spaced scan inside the interval where both
// consumptions stay positive, then bisected to |F| < 1e-10. The multiplier
// is recovered from the bond Euler equation and must be positive.
EntrepreneurSolution solve_constrained(const EntrepreneurParams& params);

// Regime dispatch via complementary slackness: the unconstrained candidate
// is accepted when feasible, otherwise the constraint binds.
EntrepreneurSolution solve(const EntrepreneurParams& params);

// Value of the implicit function at a candidate k1 (exposed for tests).
double constrained_euler_residual(const EntrepreneurParams& params, double k1);

enum class SweepAxis { Rate, Theta, InitialDebt };

SweepAxis parse_sweep_axis(const std::string& name);

struct SweepPoint {
  double axis_value = 0;
  EntrepreneurSolution solution;
  bool failed = false;
  std::string failure;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::Rate;
  std::vector<SweepPoint> points;
  // Regime switches reported at the midpoint of the adjacent grid values.
  std::vector<double> kinks;
};

SweepResult sweep(const EntrepreneurParams& params, SweepAxis axis,
                  const std::vector<double>& grid);

// CSV columns: axis_value,k1,b1,c0,c1,mu,regime.
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);

struct PropositionReport {
  double dk_dr_unconstrained = 0;
  double dk_dr_constrained = 0;
  double dk_dr_closed_form = 0;  // 1 / (alpha*(alpha-1)*k^(alpha-2))
  double dk_dtheta_constrained = 0;
  bool derivatives_negative = false;
  bool unconstrained_larger = false;
  bool closed_form_matches = false;  // 1e-6 relative
  bool theta_derivative_positive = false;
  bool all_pass() const {
    return derivatives_negative && unconstrained_larger &&
           closed_form_matches && theta_derivative_positive;
  }
};

// Central-difference check of both propositions on a parameter pair that is
// identical except in b0 and straddles the regime kink.
PropositionReport verify_propositions(const EntrepreneurParams& unconstrained_side,
                                      const EntrepreneurParams& constrained_side,
                                      double relative_step = 1e-5);

}  // namespace emshock
