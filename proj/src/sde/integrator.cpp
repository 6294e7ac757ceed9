#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mmcool/sde.hpp"

namespace mmcool::sde {

std::string NoiseSpec::model_description() {
  return "momentum dP ~ N(0, 2 D(x) dt) with D from the lowest-order diffusion; field "
         "noise rank-1, sqrt(gamma dt) f_k(x) zeta with one shared complex normal per step; "
         "dP-dA cross-correlation zero";
}

Model make_model(const PhysicalParams& params, const ModelSpec& spec) {
  Model m;
  m.grid = make_mode_grid(params, spec.n_modes, spec.mode_spacing);
  const DerivedParams d = derive(params, spec.mode_spacing);
  m.u0 = d.light_shift_u0;
  m.scatter = d.scatter_gamma;
  m.pump_photons = d.pump_photons;
  m.mass = params.mass;
  m.delay_tau = params.delay_tau;
  m.diffusion_scale = params.k0 * params.k0 * params.gamma * d.saturation_s;
  m.trap.omega = params.trap_omega;
  m.trap.center = params.trap_offset_length();
  return m;
}

SystemState initial_state(const Model& model, double x, double p) {
  return initial_state(model, x, p, model.pump_photons);
}

SystemState initial_state(const Model& model, double x, double p, double pump_photons) {
  if (!(pump_photons >= 0.0)) throw std::invalid_argument("pump photons must be non-negative");
  SystemState s;
  s.x = x;
  s.p = p;
  s.a_re.assign(model.grid.n_modes, 0.0);
  s.a_im.assign(model.grid.n_modes, 0.0);
  s.a_re[model.grid.pump_index] = std::sqrt(pump_photons);
  return s;
}

FieldAtAtom total_field(const SystemState& state, const ModeGrid& grid,
                        const kernels::KernelTable& table) {
  const auto g = grid.geometry();
  const auto sums = table.evaluate(g, state.x, state.a_re.data(), state.a_im.data(), nullptr);
  return {{sums.e_re, sums.e_im}, {sums.de_re, sums.de_im}};
}

Drift drift(const SystemState& state, const Model& model) {
  const auto& grid = model.grid;
  const std::size_t n = grid.n_modes;
  std::complex<double> e{0.0, 0.0};
  std::complex<double> de{0.0, 0.0};
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    f[k] = mode_function(grid, k, state.x);
    e += state.alpha(k) * f[k];
    de += state.alpha(k) * mode_function_derivative(grid, k, state.x);
  }
  const std::complex<double> i{0.0, 1.0};
  Drift d;
  d.dx = state.p / model.mass;
  d.dp = -model.u0 * (e * std::conj(de) + std::conj(e) * de) +
         i * model.scatter * (e * std::conj(de) - std::conj(e) * de) -
         model.spring() * (state.x - model.trap.center);
  d.dalpha.resize(n);
  const std::complex<double> coupling{model.scatter, model.u0};  // i U0 + gamma
  for (std::size_t k = 0; k < n; ++k) {
    d.dalpha[k] = i * grid.detunings[k] * state.alpha(k) - coupling * e * f[k];
  }
  return d;
}

double energy(const Model& model, double x, double p, std::complex<double> e) {
  const double xr = x - model.trap.center;
  const double s = std::sin(model.grid.k0 * model.trap.center);
  return 0.5 * p * p / model.mass + 0.5 * model.spring() * xr * xr +
         model.u0 * (std::norm(e) - model.pump_photons * s * s);
}

Integrator::Integrator(const Model& model, double dt, NoiseSpec noise,
                       const kernels::KernelTable& table)
    : model_(&model), dt_(dt), noise_(noise), table_(&table), geometry_(model.grid.geometry()) {
  const double dmax = model.grid.max_abs_detuning();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (dt * dmax > 0.1) {
    std::ostringstream msg;
    msg << "dt = " << dt << " violates dt <= 0.1/max|Delta_k| with max|Delta_k| = " << dmax;
    throw std::invalid_argument(msg.str());
  }
  const std::size_t n = model.grid.n_modes;
  half_re_.resize(n);
  half_im_.resize(n);
  profile_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ph = 0.5 * dt * model.grid.detunings[k];
    half_re_[k] = std::cos(ph);
    half_im_[k] = std::sin(ph);
  }
  trap_c_ = std::cos(0.5 * dt * model.trap.omega);
  trap_s_ = std::sin(0.5 * dt * model.trap.omega);
}

void Integrator::trap_half(SystemState& s) const {
  const double m = model_->mass;
  const double w = model_->trap.omega;
  if (w == 0.0) {
    s.x += 0.5 * dt_ * s.p / m;
    return;
  }
  const double xr = s.x - model_->trap.center;
  const double nx = xr * trap_c_ + s.p / (m * w) * trap_s_;
  const double np = s.p * trap_c_ - m * w * xr * trap_s_;
  s.x = model_->trap.center + nx;
  s.p = np;
}

StepInfo Integrator::step(SystemState& s, Rng& rng) {
  const Model& m = *model_;
  trap_half(s);
  const auto sums = table_->rotate_evaluate(geometry_, s.x, s.a_re.data(), s.a_im.data(),
                                            half_re_.data(), half_im_.data(), profile_.data());
  const std::complex<double> e{sums.e_re, sums.e_im};
  // E conj(dE)
  const double re = sums.e_re * sums.de_re + sums.e_im * sums.de_im;
  const double im = sums.e_im * sums.de_re - sums.e_re * sums.de_im;
  const double force = -2.0 * m.u0 * re - 2.0 * m.scatter * im;

  double dp = 0.0;
  std::complex<double> zeta{0.0, 0.0};
  if (noise_.enabled) {
    if (noise_.momentum) {
      const double c = std::cos(m.grid.k0 * s.x);
      const double sn = std::sin(m.grid.k0 * s.x);
      const double diff = m.diffusion_scale * (c * c + 0.4 * sn * sn);
      dp = std::sqrt(2.0 * diff * dt_) * normal_(rng);
    }
    if (noise_.field) {
      const double zr = normal_(rng);
      const double zi = normal_(rng);
      zeta = std::complex<double>(zr, zi) * std::sqrt(0.5 * m.scatter * dt_);
    }
  }

  // Exact flow of alpha at fixed x for the coupling term: it only moves
  // alpha along f, with E -> E exp(-(i U0 + gamma) S dt).
  std::complex<double> kick{0.0, 0.0};
  if (sums.s > 0.0) {
    const std::complex<double> rate{m.scatter * sums.s * dt_, m.u0 * sums.s * dt_};
    kick = e * (std::exp(-rate) - 1.0) / sums.s;
  }
  kick += zeta;

  const double p_mid = s.p + force * dt_;
  s.noise_work += p_mid * dp / m.mass;
  s.p = p_mid + dp;
  table_->kick_rotate(m.grid.n_modes, s.a_re.data(), s.a_im.data(), profile_.data(), kick.real(),
                      kick.imag(), half_re_.data(), half_im_.data());
  trap_half(s);
  s.t += dt_;
  return {e, force};
}

}  // namespace mmcool::sde
