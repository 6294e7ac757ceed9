#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmcool/kernels.hpp"
#include "mmcool/params.hpp"

// Semiclassical atom + discrete standing-wave modes. Positions are measured
// from an anchor pump node x_ref (k0 x_ref = 2 pi n, x_ref ~ c tau), so that
// the large optical phase never enters floating-point arithmetic.
namespace mmcool::sde {

using Rng = std::mt19937_64;

struct ModeGrid {
  std::size_t n_modes = 0;
  double spacing = 0.0;
  std::size_t pump_index = 0;
  std::vector<double> detunings;  // Delta_k = omega_0 - omega_k
  double k0 = 1.0;
  double carrier_omega = 0.0;  // omega_0; c = omega_0 / k0
  std::int64_t anchor_node = 0;
  double q_ref = 0.0;  // x_ref / c

  double speed_of_light() const { return carrier_omega / k0; }
  double recurrence_time() const { return two_pi / spacing; }
  double max_abs_detuning() const;
  // omega_k / c
  double wavenumber(std::size_t k) const;
  // Distance of the anchor node from the mirror.
  double anchor_position() const;
  kernels::Geometry geometry() const;
};

// Modes k = 0..n-1 with Delta_k = (n/2 - k) spacing; the pump sits at n/2.
ModeGrid make_mode_grid(const PhysicalParams& params, std::size_t n_modes = 256,
                        double spacing = 0.1);

struct TrapSpec {
  double omega = 0.0;
  double center = 0.0;  // measured from the anchor node
};

struct NoiseSpec {
  bool enabled = false;
  bool momentum = true;  // dP ~ N(0, 2 D(x) dt)
  bool field = true;     // dA_k = sqrt(gamma dt) f_k(x) zeta, one shared zeta

  // Short description of the noise model for output metadata.
  static std::string model_description();
};

struct Model {
  ModeGrid grid;
  double u0 = 0.0;
  double scatter = 0.0;
  double mass = 0.0;
  double diffusion_scale = 0.0;  // k0^2 Gamma s
  double pump_photons = 0.0;
  double delay_tau = 0.0;
  TrapSpec trap;

  double spring() const { return mass * trap.omega * trap.omega; }
};

struct ModelSpec {
  std::size_t n_modes = 256;
  double mode_spacing = 0.1;
};

// Trap frequency and centre are taken from params (trap_omega, trap_offset).
Model make_model(const PhysicalParams& params, const ModelSpec& spec = {});

struct SystemState {
  double t = 0.0;
  double x = 0.0;  // from the anchor node
  double p = 0.0;
  std::vector<double> a_re;
  std::vector<double> a_im;
  // Accumulated Ito term (p + F dt) dP / m of the injected momentum noise.
  double noise_work = 0.0;

  std::complex<double> alpha(std::size_t k) const { return {a_re[k], a_im[k]}; }
  double photon_total() const;
};

// Pump mode coherent with |alpha|^2 = pump_photons, other modes empty.
SystemState initial_state(const Model& model, double x, double p);
SystemState initial_state(const Model& model, double x, double p, double pump_photons);

double mode_function(const ModeGrid& grid, std::size_t k, double x);
double mode_function_derivative(const ModeGrid& grid, std::size_t k, double x);

struct FieldAtAtom {
  std::complex<double> e;
  std::complex<double> de;  // dE/dx
};

FieldAtAtom total_field(const SystemState& state, const ModeGrid& grid,
                        const kernels::KernelTable& table = kernels::scalar_kernels());

struct Drift {
  double dx = 0.0;
  std::complex<double> dp;  // imaginary part is a rounding residue
  std::vector<std::complex<double>> dalpha;
};

Drift drift(const SystemState& state, const Model& model);

// Mechanical plus light-shift energy relative to the unperturbed trap centre:
// p^2/2m + k_t (x - x_t)^2 / 2 + U0 (|E(x)|^2 - pump_photons sin^2(k0 x_t)).
double energy(const Model& model, double x, double p, std::complex<double> e);

struct StepInfo {
  std::complex<double> e;
  double force = 0.0;
};

class Integrator {
 public:
  Integrator(const Model& model, double dt, NoiseSpec noise,
             const kernels::KernelTable& table = kernels::select());

  StepInfo step(SystemState& state, Rng& rng);

  double dt() const { return dt_; }
  const kernels::KernelTable& kernels() const { return *table_; }

 private:
  void trap_half(SystemState& s) const;

  const Model* model_;
  double dt_;
  NoiseSpec noise_;
  const kernels::KernelTable* table_;
  kernels::Geometry geometry_;
  std::vector<double> half_re_;
  std::vector<double> half_im_;
  std::vector<double> profile_;
  double trap_c_ = 1.0;
  double trap_s_ = 0.0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Sample {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
  double photon_total = 0.0;
  double e_re = 0.0;
  double e_im = 0.0;
  double noise_work = 0.0;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<Sample> samples;
  std::vector<std::string> warnings;
};

struct RunSpec {
  double t_end = 50.0;
  double dt = 1e-3;
  std::size_t sample_every = 100;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

class TrajectoryAborted : public std::runtime_error {
 public:
  TrajectoryAborted(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

Trajectory run_trajectory(const Model& model, SystemState init, const RunSpec& spec,
                          const kernels::KernelTable& table = kernels::select());

// Independent per-trajectory stream seed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

// CSV with a leading "# {json}" metadata line.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const nlohmann::json& metadata);

}  // namespace mmcool::sde
