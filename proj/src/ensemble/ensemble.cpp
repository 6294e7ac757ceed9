#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmcool/analytic.hpp"
#include "mmcool/ensemble.hpp"
#include "mmcool/numeric.hpp"

namespace mmcool::ensemble {
namespace {

struct TrajectoryResult {
  std::vector<double> time;
  std::vector<double> w;
  std::vector<double> p2;
  double rate = 0.0;
  bool escaped = false;
};

struct Window {
  double t_end;
  double start;
  double end;
};

Window resolve_window(const sde::Model& model, const EnsembleSpec& spec, double delay_tau) {
  Window w;
  const double t_rec_limit = 0.8 * model.grid.recurrence_time();
  w.start = spec.window_start >= 0.0 ? spec.window_start : 2.0 * delay_tau + 1.0;
  w.end = spec.window_end >= 0.0 ? spec.window_end : t_rec_limit;
  w.t_end = spec.t_end > 0.0 ? spec.t_end : w.end;
  w.end = std::min({w.end, w.t_end, t_rec_limit});
  if (!(w.end > w.start)) {
    std::ostringstream msg;
    msg << "empty measurement window [" << w.start << ", " << w.end << "]";
    throw std::invalid_argument(msg.str());
  }
  return w;
}

sde::SystemState start_state(const sde::Model& model, const EnsembleSpec& spec, std::size_t i,
                             sde::Rng& rng) {
  const double m = model.mass;
  const double w = model.trap.omega;
  const double xc = model.trap.center;
  if (spec.start == StartMode::Shell) {
    if (w == 0.0) return sde::initial_state(model, xc, spec.p0);
    double phase = 0.0;
    if (spec.stratified_phases) {
      phase = (static_cast<double>(i) + 0.5) / static_cast<double>(spec.n_traj) * two_pi;
    }
    return sde::initial_state(model, xc + spec.p0 / (m * w) * std::sin(phase),
                              spec.p0 * std::cos(phase));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const double p = std::sqrt(m * spec.init_temperature) * normal(rng);
  double x = xc;
  if (w > 0.0) x += std::sqrt(spec.init_temperature / (m * w * w)) * normal(rng);
  return sde::initial_state(model, x, p);
}

}  // namespace

void validate(const EnsembleSpec& spec) {
  if (spec.n_traj < 2) throw std::invalid_argument("n_traj must be at least 2");
  if (!(spec.init_temperature >= 0.0)) {
    throw std::invalid_argument("init_temperature must be non-negative");
  }
  if (!(spec.p0 >= 0.0)) throw std::invalid_argument("p0 must be non-negative");
  if (spec.sample_every == 0) throw std::invalid_argument("sample_every must be positive");
}

EnsembleStats run_ensemble(const sde::Model& model, const EnsembleSpec& spec) {
  validate(spec);
  const Window win = resolve_window(model, spec, model.delay_tau);
  const auto& table = kernels::select(spec.backend);
  std::vector<TrajectoryResult> results(spec.n_traj);

  parallel_for(spec.n_traj, resolve_workers(spec.workers), [&](std::size_t i) {
    try {
      sde::Rng init_rng(sde::stream_seed(spec.master_seed, 2 * i));
      auto state = start_state(model, spec, i, init_rng);
      sde::RunSpec run;
      run.t_end = win.t_end;
      run.dt = spec.dt;
      run.sample_every = spec.sample_every;
      run.noise = spec.noise;
      run.seed = sde::stream_seed(spec.master_seed, 2 * i + 1);
      const auto traj = sde::run_trajectory(model, std::move(state), run, table);

      TrajectoryResult r;
      std::vector<double> wt;
      std::vector<double> wy;
      const double escape_distance = 0.5 * model.grid.anchor_position();
      for (const auto& s : traj.samples) {
        const double w = sde::energy(model, s.x, s.p, {s.e_re, s.e_im});
        r.time.push_back(s.t);
        r.w.push_back(w);
        r.p2.push_back(s.p * s.p);
        if (std::fabs(s.x - model.trap.center) > escape_distance) r.escaped = true;
        if (s.t >= win.start - 1e-9 && s.t <= win.end + 1e-9) {
          wt.push_back(s.t);
          wy.push_back(w - s.noise_work);
        }
      }
      if (wt.size() < 2) throw std::invalid_argument("fewer than two samples in the window");
      r.rate = fit_line(wt, wy).slope;
      results[i] = std::move(r);
    } catch (const std::exception& e) {
      throw TrajectoryFailure(i, e.what());
    }
  });

  EnsembleStats st;
  st.window_start = win.start;
  st.window_end = win.end;
  st.time = results.front().time;
  const std::size_t ns = st.time.size();
  st.mean_p2.resize(ns);
  st.temperature.resize(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    CompensatedSum w;
    CompensatedSum p2;
    for (const auto& r : results) {
      w.add(r.w[j]);
      p2.add(r.p2[j]);
    }
    st.temperature[j] = w.value() / static_cast<double>(results.size());
    st.mean_p2[j] = p2.value() / static_cast<double>(results.size());
  }
  std::vector<double> w0;
  std::vector<double> rates;
  for (const auto& r : results) {
    w0.push_back(r.w.front());
    rates.push_back(r.rate);
    st.escaped.push_back(r.escaped);
  }
  st.initial_temperature = mean_and_se(w0);
  st.rate_temperature = mean_and_se(rates);
  st.rate_peak_p2 = {2.0 * model.mass * st.rate_temperature.mean,
                     2.0 * model.mass * st.rate_temperature.se};
  st.trajectory_rates = std::move(rates);
  return st;
}

std::vector<FrictionPoint> friction_curve(const sde::Model& model,
                                          const std::vector<double>& p0_grid,
                                          const EnsembleSpec& base) {
  if (base.noise.enabled) throw std::invalid_argument("friction_curve requires noise off");
  std::vector<FrictionPoint> out;
  for (std::size_t j = 0; j < p0_grid.size(); ++j) {
    EnsembleSpec spec = base;
    spec.start = StartMode::Shell;
    spec.p0 = p0_grid[j];
    spec.master_seed = sde::stream_seed(base.master_seed, j);
    const auto st = run_ensemble(model, spec);
    out.push_back({p0_grid[j], p0_grid[j] * p0_grid[j], st.rate_peak_p2});
  }
  return out;
}

std::vector<CapturePoint> capture_scan(const PhysicalParams& params,
                                       const std::vector<double>& omega_grid,
                                       const EnsembleSpec& base, const sde::ModelSpec& model_spec,
                                       CaptureOptions options) {
  if (base.noise.enabled) throw std::invalid_argument("capture_scan requires noise off");
  std::vector<CapturePoint> out;
  for (std::size_t j = 0; j < omega_grid.size(); ++j) {
    PhysicalParams q = params;
    q.trap_omega = omega_grid[j];
    validate(q);
    const sde::Model model = sde::make_model(q, model_spec);
    CapturePoint cp;
    cp.omega_t = omega_grid[j];
    cp.analytic_momentum =
        analytic::capture_range(q, q.trap_omega, analytic::NodeOffset(q.trap_offset));

    EnsembleSpec spec = base;
    spec.start = StartMode::Shell;
    spec.master_seed = sde::stream_seed(base.master_seed, j);
    auto rate = [&](double p0) {
      spec.p0 = p0;
      ++cp.evaluations;
      return run_ensemble(model, spec).rate_peak_p2.mean;
    };

    double lo = 0.7 * cp.analytic_momentum;
    double hi = 1.5 * cp.analytic_momentum;
    double f_lo = rate(lo);
    for (int k = 0; k < options.max_expand && f_lo >= 0.0; ++k) {
      hi = lo;
      lo *= 0.6;
      f_lo = rate(lo);
    }
    double f_hi = f_lo < 0.0 ? rate(hi) : 0.0;
    for (int k = 0; k < options.max_expand && f_lo < 0.0 && f_hi <= 0.0; ++k) {
      lo = hi;
      f_lo = f_hi;
      hi *= 1.5;
      f_hi = rate(hi);
    }
    if (f_lo < 0.0 && f_hi > 0.0) {
      while ((hi - lo) > options.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const double fm = rate(mid);
        if (fm < 0.0) {
          lo = mid;
          f_lo = fm;
        } else {
          hi = mid;
          f_hi = fm;
        }
      }
      // Linear interpolation of the zero inside the final bracket.
      cp.momentum = lo + (hi - lo) * (-f_lo) / (f_hi - f_lo);
      cp.temperature = cp.momentum * cp.momentum / q.mass;
      cp.bounded = true;
    }
    out.push_back(cp);
  }
  return out;
}

SteadyStateResult solve_steady_state(std::vector<SteadyStatePoint> points) {
  if (points.size() < 3) throw std::invalid_argument("steady-state fit needs at least 3 points");
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> s;
  for (const auto& pt : points) {
    x.push_back(pt.t0_realized);
    y.push_back(pt.rate.mean);
    s.push_back(pt.rate.se > 0.0 ? pt.rate.se : 1e-300);
  }
  SteadyStateResult res;
  res.points = std::move(points);
  res.fit = fit_quadratic(x, y, s);
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());

  double root = std::numeric_limits<double>::quiet_NaN();
  for (double r : quadratic_roots(res.fit)) {
    if (r > 0.0 && res.fit.derivative(r) < 0.0) {
      root = r;
      break;
    }
  }
  std::ostringstream curve;
  curve.precision(6);
  curve << "dT/dt = " << res.fit.coef[0] << " + " << res.fit.coef[1] << " T + " << res.fit.coef[2]
        << " T^2";
  if (!std::isfinite(root)) {
    throw SteadyStateError("no stable positive root of the fitted curve " + curve.str(), res.fit);
  }
  if (root < lo || root > hi) {
    std::ostringstream msg;
    msg << "fitted root T = " << root << " lies outside the grid span [" << lo << ", " << hi
        << "]; " << curve.str();
    throw SteadyStateError(msg.str(), res.fit);
  }
  const double slope = res.fit.derivative(root);
  const std::array<double, 3> jac = {-1.0 / slope, -root / slope, -root * root / slope};
  double var = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) var += jac[i] * res.fit.cov[i][j] * jac[j];
  }
  res.t_ss = root;
  res.t_ss_sigma = std::sqrt(std::max(var, 0.0));
  res.cooling_time = 1.0 / std::fabs(slope);
  return res;
}

SteadyStateResult steady_state_scan(const sde::Model& model, const std::vector<double>& t0_grid,
                                    const EnsembleSpec& base) {
  if (!base.noise.enabled) throw std::invalid_argument("steady_state_scan requires noise on");
  if (t0_grid.size() < 5) throw std::invalid_argument("steady_state_scan needs >= 5 temperatures");
  std::vector<SteadyStatePoint> points;
  for (std::size_t j = 0; j < t0_grid.size(); ++j) {
    EnsembleSpec spec = base;
    spec.start = StartMode::Thermal;
    spec.init_temperature = t0_grid[j];
    spec.master_seed = sde::stream_seed(base.master_seed, 1000 + j);
    const auto st = run_ensemble(model, spec);
    points.push_back({t0_grid[j], st.initial_temperature.mean, st.rate_temperature});
  }
  return solve_steady_state(std::move(points));
}

}  // namespace mmcool::ensemble
