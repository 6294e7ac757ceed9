#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>

#include "mmcool/analytic.hpp"
#include "mmcool/ensemble.hpp"
#include "mmcool/params.hpp"

using namespace mmcool;
using namespace mmcool::ensemble;

namespace {

sde::Model model_at(double omega_2pi, double pump_rate = -1.0) {
  auto p = baseline_params();
  p.trap_omega = two_pi * omega_2pi;
  if (pump_rate >= 0.0) p.pump_rate = pump_rate;
  return sde::make_model(p);
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("line fit") {
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 - 0.25 * 0.1 * i);
  }
  const auto f = fit_line(t, y);
  CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-13));
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1.0, 1.0}, {2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("quadratic fit recovers exact coefficients and covariance") {
  std::vector<double> x = {250, 450, 650, 900, 1200};
  std::vector<double> y;
  std::vector<double> s = {1.0, 2.0, 1.0, 3.0, 1.5};
  for (double v : x) y.push_back(0.7 - 2e-3 * v + 1e-6 * v * v);
  const auto f = fit_quadratic(x, y, s);
  CHECK(f.coef[0] == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(f.coef[1] == doctest::Approx(-2e-3).epsilon(1e-9));
  CHECK(f.coef[2] == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(f.chi2 < 1e-20);

  // Covariance oracle: (A^T W A)^{-1} assembled in the raw abscissa with long doubles.
  long double m[3][3] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double b[3] = {1.0L, x[i], static_cast<long double>(x[i]) * x[i]};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += b[r] * b[c] / (s[i] * s[i]);
    }
  }
  const long double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                          m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                          m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  const long double inv00 = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  const long double inv22 = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  CHECK(f.cov[0][0] == doctest::Approx(static_cast<double>(inv00)).epsilon(1e-8));
  CHECK(f.cov[2][2] == doctest::Approx(static_cast<double>(inv22)).epsilon(1e-8));
  CHECK_THROWS_AS(fit_quadratic({1, 2}, {1, 2}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(fit_quadratic({1, 2, 3}, {1, 2, 3}, {1, 0, 1}), std::invalid_argument);
}

TEST_CASE("quadratic roots") {
  QuadraticFit f;
  f.coef = {6.0, -5.0, 1.0};
  const auto r = quadratic_roots(f);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(2.0));
  CHECK(r[1] == doctest::Approx(3.0));
  f.coef = {1.0, 0.0, 1.0};
  CHECK(quadratic_roots(f).empty());
  f.coef = {4.0, -2.0, 0.0};
  REQUIRE(quadratic_roots(f).size() == 1);
  CHECK(quadratic_roots(f)[0] == 2.0);
}

TEST_CASE("mean and standard error") {
  const auto m = mean_and_se({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.se == doctest::Approx(std::sqrt(1.25 / 3.0)));
  CHECK_THROWS_AS(mean_and_se({}), std::invalid_argument);
  // Order-insensitive reduction.
  std::vector<double> v;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(1e3, 1.0);
  for (int i = 0; i < 1000; ++i) v.push_back(n(rng));
  const auto a = mean_and_se(v);
  std::shuffle(v.begin(), v.end(), rng);
  const auto b = mean_and_se(v);
  CHECK(std::fabs(a.mean - b.mean) <= 1e-12 * std::fabs(a.mean));
}

TEST_CASE("steady-state root selection") {
  // dT/dt = 0.01 (700 - T) - small curvature: stable root near 700.
  std::vector<SteadyStatePoint> pts;
  for (double t : {300.0, 500.0, 700.0, 900.0, 1100.0}) {
    pts.push_back({t, t, {0.01 * (700.0 - t) + 1e-6 * (t - 700.0) * (t - 700.0), 0.05}});
  }
  const auto r = solve_steady_state(pts);
  CHECK(r.t_ss == doctest::Approx(700.0).epsilon(1e-9));
  CHECK(r.cooling_time == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(r.t_ss_sigma > 0.0);

  std::vector<SteadyStatePoint> heating;
  for (double t : {300.0, 500.0, 700.0}) heating.push_back({t, t, {1.0 + 1e-3 * t, 0.1}});
  CHECK_THROWS_AS(solve_steady_state(heating), SteadyStateError);
  std::vector<SteadyStatePoint> outside;
  for (double t : {300.0, 400.0, 500.0}) outside.push_back({t, t, {0.01 * (900.0 - t), 0.1}});
  try {
    solve_steady_state(outside);
    FAIL("expected an error");
  } catch (const SteadyStateError& e) {
    CHECK(std::string(e.what()).find("outside the grid span") != std::string::npos);
    CHECK(e.fit().coef[1] == doctest::Approx(-0.01));
  }
}

TEST_CASE("parallel_for covers every index and reports the lowest failure") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  try {
    parallel_for(20, 1, [](std::size_t i) {
      if (i >= 5) throw TrajectoryFailure(i, "boom");
    });
    FAIL("expected a failure");
  } catch (const TrajectoryFailure& e) {
    CHECK(e.index() == 5);
  }
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  ::setenv("MMCOOL_WORKERS", "5", 1);
  CHECK(resolve_workers(0) == 5);
  ::setenv("MMCOOL_WORKERS", "x", 1);
  CHECK_THROWS_AS(resolve_workers(0), std::invalid_argument);
  ::unsetenv("MMCOOL_WORKERS");
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("spec validation") {
  EnsembleSpec s;
  s.n_traj = 1;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.n_traj = 4;
  s.p0 = -1.0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  const auto m = model_at(0.3);
  EnsembleSpec w;
  w.n_traj = 2;
  w.window_start = 10.0;
  w.window_end = 5.0;
  CHECK_THROWS_AS(run_ensemble(m, w), std::invalid_argument);
}

TEST_CASE("atom at rest at the trap centre") {
  auto m = model_at(0.3);
  EnsembleSpec s;
  s.n_traj = 2;
  s.t_end = 20.0;
  s.window_end = 20.0;
  const auto with_scatter = run_ensemble(m, s).rate_peak_p2.mean;
  m.scatter = 0.0;
  const auto without = run_ensemble(m, s).rate_peak_p2.mean;
  MESSAGE("rest-state drift " << with_scatter << " with scattering, " << without << " without");
  // The static light force shifts the equilibrium, so the atom rings at the trap
  // frequency with p ~ 5e-4 and the fitted slope picks up that residue.
  const auto p = baseline_params();
  const double ref = analytic::heating_rate_avg(p, analytic::max_friction_offset(), 30.0,
                                                two_pi * 0.3);
  CHECK(std::fabs(without) < 0.05 * std::fabs(ref));
  CHECK(std::fabs(with_scatter) < 0.05 * std::fabs(ref));
}

TEST_CASE("trap energy is constant without pump and noise") {
  const auto m = model_at(0.3, 0.0);
  EnsembleSpec s;
  s.n_traj = 4;
  s.start = StartMode::Thermal;
  s.init_temperature = 5.0;
  s.t_end = 5.0;
  s.window_end = 5.0;
  const auto st = run_ensemble(m, s);
  for (double t : st.temperature) {
    CHECK(t == doctest::Approx(st.temperature.front()).epsilon(1e-6));
  }
  CHECK(std::fabs(st.rate_temperature.mean) < 1e-6 * st.temperature.front());
}

TEST_CASE("results do not depend on the worker count") {
  const auto m = model_at(0.3);
  EnsembleSpec s;
  s.n_traj = 6;
  s.start = StartMode::Thermal;
  s.init_temperature = 4.0;
  s.noise.enabled = true;
  s.t_end = 2.0;
  s.window_end = 2.0;
  s.workers = 1;
  const auto a = run_ensemble(m, s);
  s.workers = 3;
  const auto b = run_ensemble(m, s);
  CHECK(a.trajectory_rates == b.trajectory_rates);
  CHECK(a.rate_temperature.mean == b.rate_temperature.mean);
  CHECK(a.temperature == b.temperature);
}

TEST_CASE("doubling the ensemble shrinks the standard error by sqrt 2") {
  const auto m = model_at(0.5);
  EnsembleSpec s;
  s.start = StartMode::Thermal;
  s.init_temperature = 4.0;
  s.noise.enabled = true;
  s.t_end = 4.0;
  s.window_end = 4.0;
  s.n_traj = 96;
  const double se1 = run_ensemble(m, s).rate_temperature.se;
  s.n_traj = 192;
  s.master_seed = 99;
  const double se2 = run_ensemble(m, s).rate_temperature.se;
  CHECK(se1 / se2 == doctest::Approx(std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("friction curve cools at small momentum") {
  const auto m = model_at(0.3);
  EnsembleSpec s;
  s.n_traj = 2;
  s.workers = 2;
  const auto curve = friction_curve(m, {40.0, 80.0}, s);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].rate.mean < 0.0);
  CHECK(curve[1].rate.mean < curve[0].rate.mean);
  s.noise.enabled = true;
  CHECK_THROWS_AS(friction_curve(m, {40.0}, s), std::invalid_argument);
}

TEST_CASE("capture scan brackets the sign change") {
  auto p = baseline_params();
  EnsembleSpec s;
  s.n_traj = 2;
  s.workers = 2;
  s.dt = 2e-3;
  const auto pts = capture_scan(p, {two_pi * 0.2}, s, {}, {0.05, 6});
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].bounded);
  CHECK(pts[0].momentum == doctest::Approx(pts[0].analytic_momentum).epsilon(0.25));
  CHECK(pts[0].temperature == doctest::Approx(pts[0].momentum * pts[0].momentum / p.mass));
}

TEST_CASE("steady-state scan preconditions") {
  const auto m = model_at(0.5);
  EnsembleSpec s;
  CHECK_THROWS_AS(steady_state_scan(m, {1, 2, 3, 4, 5}, s), std::invalid_argument);
  s.noise.enabled = true;
  CHECK_THROWS_AS(steady_state_scan(m, {1, 2, 3}, s), std::invalid_argument);
}

}
