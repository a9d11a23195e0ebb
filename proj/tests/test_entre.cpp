#include <doctest.h>

#include <cmath>

#include "emshock/entre.hpp"
#include "emshock/errors.hpp"
#include "emshock/rng.hpp"

using namespace emshock;

namespace {

// Brute-force utility maximizer over a (k1, b1) grid with b1 <= theta*k1.
struct GridBest {
  double utility = -1e300;
  double k1 = 0, b1 = 0;
};

GridBest grid_oracle(const EntrepreneurParams& p, int nk = 400, int nb = 400) {
  const double gross = 1.0 + p.r1;
  const double w0 = std::pow(p.k0, p.alpha) - p.b0 * (1.0 + p.r0);
  GridBest best;
  const double k_hi = 0.999 * w0 / (1.0 - p.theta);
  for (int i = 1; i <= nk; ++i) {
    const double k1 = k_hi * i / nk;
    const double b_lo = k1 - w0;  // c0 > 0 boundary
    const double b_hi = std::min(p.theta * k1, std::pow(k1, p.alpha) / gross);
    if (!(b_hi > b_lo)) continue;
    for (int j = 1; j < nb; ++j) {
      const double b1 = b_lo + (b_hi - b_lo) * j / nb;
      const double c0 = w0 + b1 - k1;
      const double c1 = std::pow(k1, p.alpha) - b1 * gross;
      if (!(c0 > 0.0) || !(c1 > 0.0)) continue;
      const double u = std::log(c0) + p.beta_disc * std::log(c1);
      if (u > best.utility) {
        best.utility = u;
        best.k1 = k1;
        best.b1 = b1;
      }
    }
  }
  return best;
}

void check_solution_invariants(const EntrepreneurParams& p,
                               const EntrepreneurSolution& s) {
  const double gross = 1.0 + p.r1;
  const double w0 = std::pow(p.k0, p.alpha) - p.b0 * (1.0 + p.r0);
  // Budget constraints.
  CHECK(std::abs(s.c0 + s.k1 - (w0 + s.b1)) < 1e-10);
  CHECK(std::abs(s.c1 - (std::pow(s.k1, p.alpha) - s.b1 * gross)) < 1e-10);
  CHECK(s.c0 > 0.0);
  CHECK(s.c1 > 0.0);
  CHECK(s.k1 > 0.0);
  // Complementary slackness.
  CHECK(std::abs(s.mu * (p.theta * s.k1 - s.b1)) < 1e-10);
  // Euler equations for capital and debt.
  const double lhs = 1.0 / s.c0;
  const double capital_rhs = p.beta_disc / s.c1 * p.alpha *
                                 std::pow(s.k1, p.alpha - 1.0) +
                             s.mu * p.theta;
  const double bond_rhs = p.beta_disc / s.c1 * gross + s.mu;
  CHECK(std::abs(lhs - capital_rhs) < 1e-8);
  CHECK(std::abs(lhs - bond_rhs) < 1e-8);
}

}  // namespace

TEST_CASE("unconstrained closed form") {
  EntrepreneurParams p;
  p.alpha = 0.5;
  p.r1 = 1.0;  // gross rate 2
  p.b0 = -2.0; // wealthy enough to stay unconstrained
  const auto s = solve_unconstrained(p);
  CHECK(s.k1 == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(s.mu == 0.0);
  check_solution_invariants(p, s);

  // Independent check through the marginal-product equality.
  EntrepreneurParams q;
  q.alpha = 0.3;
  q.r1 = 0.02;
  q.b0 = -2.0;
  const auto sq = solve_unconstrained(q);
  CHECK(q.alpha * std::pow(sq.k1, q.alpha - 1.0) ==
        doctest::Approx(1.02).epsilon(1e-12));
  CHECK(sq.k1 == doctest::Approx(0.174096).epsilon(1e-4));
}

TEST_CASE("unconstrained capital ignores initial conditions") {
  EntrepreneurParams a;
  a.alpha = 0.4;
  a.r1 = 0.1;
  a.b0 = -1.0;
  a.k0 = 1.0;
  EntrepreneurParams b = a;
  b.b0 = -3.0;
  b.k0 = 2.0;
  CHECK(solve_unconstrained(a).k1 == solve_unconstrained(b).k1);
}

TEST_CASE("constrained solution against the grid oracle") {
  EntrepreneurParams p;
  p.alpha = 0.3;
  p.beta_disc = 0.95;
  p.theta = 0.5;
  p.k0 = 1.0;
  p.r0 = p.r1 = 0.05;
  p.b0 = 0.6;

  const auto s = solve(p);
  REQUIRE(s.regime == Regime::Constrained);
  check_solution_invariants(p, s);
  CHECK(s.mu > 0.0);
  // The wedge: marginal product of capital above the gross rate.
  CHECK(p.alpha * std::pow(s.k1, p.alpha - 1.0) - (1.0 + p.r1) > 0.0);

  const GridBest best = grid_oracle(p);
  CHECK(std::abs(s.k1 - best.k1) < 1e-3);
  CHECK(s.utility(p.beta_disc) >= best.utility - 1e-6);

  // Constrained capital sits below the unconstrained closed form.
  const double k_free =
      std::pow((1.0 + p.r1) / p.alpha, 1.0 / (p.alpha - 1.0));
  CHECK(s.k1 < k_free);
}

TEST_CASE("regime dispatch and infeasibility") {
  EntrepreneurParams rich;
  rich.b0 = -5.0;
  CHECK(solve(rich).regime == Regime::Unconstrained);

  EntrepreneurParams poor;
  poor.b0 = 0.9;  // resources 1 - 0.945 barely positive
  const auto s = solve(poor);
  CHECK(s.regime == Regime::Constrained);
  CHECK(s.mu > 0.0);
  check_solution_invariants(poor, s);

  EntrepreneurParams broke;
  broke.b0 = 2.0;
  try {
    static_cast<void>(solve(broke));
    FAIL("expected InfeasibleConsumption");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleConsumption);
  }
}

TEST_CASE("solutions are continuous across the regime kink") {
  // Locate the b0 where the constraint starts binding, then compare the two
  // sides just around it.
  EntrepreneurParams p;
  p.alpha = 0.3;
  p.beta_disc = 0.95;
  p.theta = 0.5;
  p.r0 = p.r1 = 0.05;

  double lo = -1.0, hi = 0.9;  // unconstrained at lo, constrained at hi
  for (int it = 0; it < 60; ++it) {
    EntrepreneurParams mid = p;
    mid.b0 = 0.5 * (lo + hi);
    if (solve(mid).regime == Regime::Unconstrained) lo = mid.b0;
    else hi = mid.b0;
  }
  EntrepreneurParams left = p, right = p;
  left.b0 = lo - 1e-6;
  right.b0 = hi + 1e-6;
  const auto sl = solve(left);
  const auto sr = solve(right);
  CHECK(sl.regime == Regime::Unconstrained);
  CHECK(sr.regime == Regime::Constrained);
  CHECK(std::abs(sl.k1 - sr.k1) < 1e-3);
}

TEST_CASE("grid-oracle dominance on random feasible parameters") {
  RngStream rng(404);
  int checked = 0;
  while (checked < 10) {
    EntrepreneurParams p;
    p.alpha = 0.2 + 0.4 * rng.uniform();
    p.beta_disc = 0.9 + 0.09 * rng.uniform();
    p.theta = 0.2 + 0.6 * rng.uniform();
    p.k0 = 0.5 + rng.uniform();
    p.r0 = 0.02 + 0.08 * rng.uniform();
    p.r1 = 0.02 + 0.2 * rng.uniform();
    const double w_max = std::pow(p.k0, p.alpha) / (1.0 + p.r0);
    p.b0 = w_max * (2.0 * rng.uniform() - 1.0);
    if (!(p.initial_resources() > 1e-3)) continue;
    ++checked;

    const auto s = solve(p);
    check_solution_invariants(p, s);
    const GridBest best = grid_oracle(p, 200, 200);
    CHECK(s.utility(p.beta_disc) >= best.utility - 1e-6);
  }
}

TEST_CASE("unconstrained capital falls monotonically in the rate") {
  EntrepreneurParams p;
  p.alpha = 0.35;
  p.b0 = -2.0;
  double previous = 1e300;
  for (double r1 = 0.01; r1 < 0.5; r1 += 0.03) {
    p.r1 = r1;
    const double k = solve_unconstrained(p).k1;
    CHECK(k < previous);
    previous = k;
  }
}

TEST_CASE("sweeps detect the kink and match the figure shapes") {
  EntrepreneurParams low_debt;
  low_debt.alpha = 0.3;
  low_debt.beta_disc = 0.95;
  low_debt.theta = 0.5;
  low_debt.r0 = 0.05;
  low_debt.b0 = 0.1;
  EntrepreneurParams high_debt = low_debt;
  high_debt.b0 = 0.55;

  std::vector<double> grid;
  for (int i = 0; i < 80; ++i) grid.push_back(0.01 + 0.012 * i);

  const SweepResult low = sweep(low_debt, SweepAxis::Rate, grid);
  const SweepResult high = sweep(high_debt, SweepAxis::Rate, grid);

  // Where both entrepreneurs are unconstrained their capital coincides.
  int overlap = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (low.points[i].failed || high.points[i].failed) continue;
    if (low.points[i].solution.regime == Regime::Unconstrained &&
        high.points[i].solution.regime == Regime::Unconstrained) {
      CHECK(low.points[i].solution.k1 ==
            doctest::Approx(high.points[i].solution.k1).epsilon(1e-10));
      ++overlap;
    }
  }
  CHECK(overlap > 0);
  // The high-debt entrepreneur hits the constraint somewhere on the grid.
  CHECK(!high.kinks.empty());

  // Theta sweep on a constrained instance: capital nondecreasing.
  EntrepreneurParams constrained;
  constrained.alpha = 0.3;
  constrained.beta_disc = 0.95;
  constrained.r0 = constrained.r1 = 0.05;
  constrained.b0 = 0.6;
  std::vector<double> theta_grid;
  for (int i = 0; i < 30; ++i) theta_grid.push_back(0.25 + 0.015 * i);
  const SweepResult theta_sweep =
      sweep(constrained, SweepAxis::Theta, theta_grid);
  double prev_k = 0.0;
  for (const auto& point : theta_sweep.points) {
    if (point.failed) continue;
    if (point.solution.regime == Regime::Constrained) {
      CHECK(point.solution.k1 >= prev_k - 1e-12);
      prev_k = point.solution.k1;
    }
  }

  // Debt sweep under a tighter and a looser constraint: the tighter curve
  // lies weakly below with equality on the unconstrained side.
  EntrepreneurParams loose;
  loose.alpha = 0.3;
  loose.beta_disc = 0.95;
  loose.r0 = loose.r1 = 0.05;
  loose.theta = 0.6;
  EntrepreneurParams tight = loose;
  tight.theta = 0.35;
  std::vector<double> debt_grid;
  for (int i = 0; i < 40; ++i) debt_grid.push_back(-0.5 + 0.03 * i);
  const SweepResult loose_curve = sweep(loose, SweepAxis::InitialDebt, debt_grid);
  const SweepResult tight_curve = sweep(tight, SweepAxis::InitialDebt, debt_grid);
  for (std::size_t i = 0; i < debt_grid.size(); ++i) {
    if (loose_curve.points[i].failed || tight_curve.points[i].failed) continue;
    CHECK(tight_curve.points[i].solution.k1 <=
          loose_curve.points[i].solution.k1 + 1e-9);
    if (tight_curve.points[i].solution.regime == Regime::Unconstrained &&
        loose_curve.points[i].solution.regime == Regime::Unconstrained)
      CHECK(tight_curve.points[i].solution.k1 ==
            doctest::Approx(loose_curve.points[i].solution.k1).epsilon(1e-10));
  }

  std::vector<double> unsorted{0.3, 0.2};
  CHECK_THROWS_AS(static_cast<void>(sweep(loose, SweepAxis::Theta, unsorted)),
                  Error);
}

TEST_CASE("proposition checks on a straddling pair") {
  EntrepreneurParams unconstrained_side;
  unconstrained_side.alpha = 0.5;
  unconstrained_side.beta_disc = 0.95;
  unconstrained_side.theta = 0.5;
  unconstrained_side.r0 = 0.05;
  unconstrained_side.r1 = 1.0;  // gross rate 2: the closed-form example
  unconstrained_side.b0 = -0.5;
  EntrepreneurParams constrained_side = unconstrained_side;
  constrained_side.b0 = 0.93;

  const auto report =
      verify_propositions(unconstrained_side, constrained_side);
  CHECK(report.dk_dr_closed_form == doctest::Approx(-0.0625).epsilon(1e-12));
  CHECK(report.derivatives_negative);
  CHECK(report.unconstrained_larger);
  CHECK(report.closed_form_matches);
  CHECK(report.theta_derivative_positive);
  CHECK(report.all_pass());

  // A pair that does not straddle the kink is rejected.
  EntrepreneurParams also_unconstrained = unconstrained_side;
  also_unconstrained.b0 = -0.4;
  CHECK_THROWS_AS(static_cast<void>(verify_propositions(unconstrained_side,
                                                        also_unconstrained)),
                  Error);
}

TEST_CASE("kink is reported at the grid midpoint") {
  EntrepreneurParams p;
  p.alpha = 0.3;
  p.beta_disc = 0.95;
  p.theta = 0.5;
  p.r0 = p.r1 = 0.05;
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(-0.2 + 0.05 * i);
  const SweepResult result = sweep(p, SweepAxis::InitialDebt, grid);
  REQUIRE(result.kinks.size() == 1);
  bool midpoint_ok = false;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(result.kinks[0] - 0.5 * (grid[i - 1] + grid[i])) < 1e-12)
      midpoint_ok = true;
  CHECK(midpoint_ok);
}
