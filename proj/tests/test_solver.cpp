#include <doctest.h>

#include <cmath>

#include "hartree/solver.hpp"

using namespace hartree;

namespace {
SolveOptions quick_opts() {
  SolveOptions o;
  o.tolerance = 1e-9;
  o.max_iterations = 2500;
  return o;
}
}  // namespace

TEST_CASE("limit-family ground state at m = 2") {
  GridSpec grid = make_grid(10.0, 48);
  auto res = solve_ground_state(ProblemSpec::limit(2.0), quick_opts(), grid);
  REQUIRE(res.converged);
  CHECK(res.residual_norm <= 1e-9);
  CHECK(mass(res.state) == doctest::Approx(1.0).epsilon(1e-12));

  // bound state: multiplier is -lambda < 0
  CHECK(res.multiplier < 0.0);
  double lambda = -res.multiplier;

  // virial identity for the limit family: lambda = -3 e_m
  CHECK(lambda == doctest::Approx(-3.0 * res.energy.total).epsilon(1e-5));

  // strictly positive state
  double mn = 1e300;
  for (double v : res.state.values) mn = std::min(mn, v);
  CHECK(mn > 0.0);

  // radially symmetric about the origin after recentering
  CHECK(radial_anisotropy(res.state) <= 1e-6 * linf_norm(res.state));

  // monotone energy trace after burn-in
  for (std::size_t i = 6; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].energy <=
          res.trace[i - 1].energy + 1e-12 * std::abs(res.trace[i - 1].energy));
  }
}

TEST_CASE("translation covariance of the flow") {
  GridSpec grid = make_grid(10.0, 48);
  auto g = share_grid(grid);
  auto base = solve_ground_state(ProblemSpec::limit(2.0), quick_opts(), grid);
  Field shifted_init = sample_field(g, [](double x, double y, double z) {
    double dx = x - 1.5, dy = y + 1.0;
    return std::exp(-(dx * dx + dy * dy + z * z) / 2.0);
  });
  auto shifted = solve_ground_state(ProblemSpec::limit(2.0), quick_opts(), grid,
                                    shifted_init);
  REQUIRE(shifted.converged);
  // both solves recenter at the origin, so the profiles align directly
  double d = 0.0;
  for (std::size_t i = 0; i < base.state.values.size(); ++i) {
    d = std::max(d, std::abs(base.state.values[i] - shifted.state.values[i]));
  }
  CHECK(d <= 1e-6 * linf_norm(base.state));
}

TEST_CASE("rescaled family warm start and multiplier sign") {
  GridSpec grid = make_grid(10.0, 48);
  auto limit = solve_ground_state(ProblemSpec::limit(1.0), quick_opts(), grid);
  REQUIRE(limit.converged);
  auto resc = solve_ground_state(ProblemSpec::rescaled(1.0, 8.0), quick_opts(), grid,
                                 limit.state);
  REQUIRE(resc.converged);
  CHECK(resc.multiplier < 0.0);
  CHECK(resc.multiplier == doctest::Approx(limit.multiplier).epsilon(0.05));
  CHECK(resc.iterations < limit.iterations);  // warm start pays off
}

TEST_CASE("supercritical mass collapses, subcritical converges") {
  GridSpec grid = make_grid(10.0, 48);
  auto opts = quick_opts();
  CHECK_THROWS_AS(
      solve_ground_state(ProblemSpec::original(1.0, 10.0), opts, grid),
      collapse_error);
  auto ok = solve_ground_state(ProblemSpec::original(1.0, 1.3), opts, grid);
  CHECK(ok.converged);
  CHECK(mass(ok.state) == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("massless solve saturates its own equation") {
  GridSpec grid = make_grid(12.0, 48);
  SolveOptions opts = quick_opts();
  opts.tolerance = 1e-9;
  auto res = solve_massless(opts, grid);
  REQUIRE(res.converged);
  CHECK(res.residual_norm <= 1e-9);
  double nstar = mass(res.state);
  CHECK(nstar == doctest::Approx(2.6956).epsilon(0.05));
  // multiplier is pinned at 1 by the equation (reported as -1)
  CHECK(res.multiplier == doctest::Approx(-1.0).epsilon(1e-6));
  double sat = gn_ratio(res.state) * nstar / 2.0;
  CHECK(sat == doctest::Approx(1.0).epsilon(1e-2));

  Field zero(share_grid(grid));
  CHECK_THROWS_AS(solve_massless(opts, grid, zero), degenerate_field_error);
}

TEST_CASE("critical mass estimate with a coarse grid pair") {
  auto est = critical_mass_estimate(quick_opts(), 12.0, 32, 48);
  CHECK(est.value == doctest::Approx(2.6956).epsilon(0.05));
  CHECK(est.error_bar <= 0.05 * est.value);
}

TEST_CASE("multistart uniqueness on a small grid") {
  GridSpec grid = make_grid(10.0, 32);
  auto opts = quick_opts();
  opts.seed = 42;
  CHECK_THROWS_AS(
      multistart_uniqueness(ProblemSpec::limit(2.0), 1, opts, grid),
      std::invalid_argument);
  auto rep = multistart_uniqueness(ProblemSpec::limit(2.0), 3, opts, grid);
  CHECK(!rep.inconclusive);
  CHECK(rep.pairwise_distance <= 1e-5);
  CHECK(rep.multiplier_spread <= 1e-7);

  // determinism: same seed, same report
  auto rep2 = multistart_uniqueness(ProblemSpec::limit(2.0), 3, opts, grid);
  CHECK(rep.pairwise_distance == rep2.pairwise_distance);
  CHECK(rep.multiplier_spread == rep2.multiplier_spread);
}

TEST_CASE("option validation and non-convergence reporting") {
  GridSpec grid = make_grid(10.0, 16);
  SolveOptions bad = quick_opts();
  bad.tolerance = 0.5;
  CHECK_THROWS_AS(solve_ground_state(ProblemSpec::limit(1.0), bad, grid),
                  std::invalid_argument);
  SolveOptions s = quick_opts();
  s.max_iterations = 3;
  auto res = solve_ground_state(ProblemSpec::limit(1.0), s, grid);
  CHECK(!res.converged);
}
