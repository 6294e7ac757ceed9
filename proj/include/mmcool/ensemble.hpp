#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmcool/params.hpp"
#include "mmcool/sde.hpp"

namespace mmcool::ensemble {

// ---- parallel execution -------------------------------------------------

// Worker count: explicit value if > 0, else MMCOOL_WORKERS, else the
// hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

// Calls fn(i) for i in [0, n) on a bounded pool. If any call throws, the
// exception of the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

class TrajectoryFailure : public std::runtime_error {
 public:
  TrajectoryFailure(std::size_t index, const std::string& what)
      : std::runtime_error("trajectory " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// ---- estimators ---------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares of y on t.
LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y);

struct QuadraticFit {
  std::array<double, 3> coef{};  // y = c0 + c1 x + c2 x^2
  std::array<std::array<double, 3>, 3> cov{};
  double chi2 = 0.0;

  double operator()(double x) const { return coef[0] + x * (coef[1] + x * coef[2]); }
  double derivative(double x) const { return coef[1] + 2.0 * coef[2] * x; }
};

// Inverse-variance weighted quadratic least squares. Needs >= 3 points and
// positive sigmas.
QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& sigma);

// Real roots of the fitted quadratic in ascending order.
std::vector<double> quadratic_roots(const QuadraticFit& fit);

struct Mean {
  double mean = 0.0;
  double se = 0.0;
};

// Compensated mean and standard error of the mean.
Mean mean_and_se(const std::vector<double>& v);

// ---- ensembles ----------------------------------------------------------

enum class StartMode {
  Shell,    // peak momentum p0, trap phase cosine or stratified
  Thermal,  // x - x_t ~ N(0, T0 / (m w^2)), p ~ N(0, m T0)
};

struct EnsembleSpec {
  std::size_t n_traj = 64;
  StartMode start = StartMode::Shell;
  double p0 = 0.0;                // Shell
  bool stratified_phases = false;  // Shell: phases (i + 1/2) 2 pi / n, else all cosine
  double init_temperature = 0.0;  // Thermal
  sde::NoiseSpec noise;
  std::uint64_t master_seed = 1;
  double dt = 1e-3;
  double t_end = 0.0;          // 0: end of the measurement window
  std::size_t sample_every = 50;
  double window_start = -1.0;  // < 0: 2 tau + 1
  double window_end = -1.0;    // < 0: 0.8 x recurrence time
  std::size_t workers = 0;
  kernels::Backend backend = kernels::Backend::Auto;
};

void validate(const EnsembleSpec& spec);

struct EnsembleStats {
  std::vector<double> time;
  std::vector<double> mean_p2;      // <p^2>(t)
  std::vector<double> temperature;  // <W>(t), hbar Gamma / k_B
  Mean initial_temperature;         // <W(0)>
  Mean rate_temperature;            // dT/dt over the window
  Mean rate_peak_p2;                // d(p_peak^2)/dt = 2 m dT/dt
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<bool> escaped;        // atom left the trap region
  std::vector<double> trajectory_rates;  // per-trajectory dT/dt
};

EnsembleStats run_ensemble(const sde::Model& model, const EnsembleSpec& spec);

struct FrictionPoint {
  double p0 = 0.0;
  double p0_sq = 0.0;
  Mean rate;  // d(p_peak^2)/dt
};

std::vector<FrictionPoint> friction_curve(const sde::Model& model,
                                          const std::vector<double>& p0_grid,
                                          const EnsembleSpec& base);

struct CapturePoint {
  double omega_t = 0.0;
  double momentum = 0.0;
  double temperature = 0.0;  // p0^2 / m, hbar Gamma / k_B
  double analytic_momentum = 0.0;
  bool bounded = false;
  int evaluations = 0;
};

struct CaptureOptions {
  double rel_tol = 5e-3;
  int max_expand = 6;
};

// Noise must be off. Bisects the sign of d(p_peak^2)/dt in p0 for each trap
// frequency, bracketing around the closed-form capture momentum.
std::vector<CapturePoint> capture_scan(const PhysicalParams& params,
                                       const std::vector<double>& omega_grid,
                                       const EnsembleSpec& spec, const sde::ModelSpec& model_spec,
                                       CaptureOptions options = {});

struct SteadyStatePoint {
  double t0 = 0.0;        // requested initial temperature
  double t0_realized = 0.0;
  Mean rate;              // dT/dt
};

struct SteadyStateResult {
  std::vector<SteadyStatePoint> points;
  QuadraticFit fit;
  double t_ss = 0.0;
  double t_ss_sigma = 0.0;
  double cooling_time = 0.0;  // 1 / |d(dT/dt)/dT| at the root
};

class SteadyStateError : public std::runtime_error {
 public:
  SteadyStateError(const std::string& what, QuadraticFit fit)
      : std::runtime_error(what), fit_(fit) {}
  const QuadraticFit& fit() const { return fit_; }

 private:
  QuadraticFit fit_;
};

// Noise must be on; the grid needs at least 5 temperatures.
SteadyStateResult steady_state_scan(const sde::Model& model, const std::vector<double>& t0_grid,
                                    const EnsembleSpec& spec);

// Root of the fit: smallest positive root with negative slope, with the
// delta-method standard error.
SteadyStateResult solve_steady_state(std::vector<SteadyStatePoint> points);

}  // namespace mmcool::ensemble
