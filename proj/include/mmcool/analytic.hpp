#pragma once

#include <string>
#include <vector>

#include "mmcool/params.hpp"

// Closed-form forces, rates and temperatures of the perturbative theory.
// Positions enter through the trap/atom offset from the nearest pump node;
// the delay itself is carried by params.delay_tau.
namespace mmcool::analytic {

// Offset x0' of a point from its nearest pump node, in wavelengths.
class NodeOffset {
 public:
  explicit NodeOffset(double wavelengths) : wavelengths_(wavelengths) {}
  static NodeOffset from_phase(double k0x) { return NodeOffset(k0x / two_pi); }

  double wavelengths() const { return wavelengths_; }
  // k0 * x0'
  double phase() const { return two_pi * wavelengths_; }

 private:
  double wavelengths_;
};

// The maximum-friction point used throughout, x0' = -3 lambda / 16.
inline NodeOffset max_friction_offset() { return NodeOffset(-3.0 / 16.0); }

struct ForceTerm {
  std::string name;
  double value = 0.0;
};

struct ForceResult {
  double value = 0.0;  // hbar k0 Gamma
  std::vector<ForceTerm> breakdown;

  double term(const std::string& name) const;
};

struct TemperatureResult {
  double t_mirror = 0.0;   // hbar Gamma / k_B
  double t_doppler = 0.0;
  double t_combined = 0.0;
  double t_mirror_approx = 0.0;  // point-of-maximum-friction estimate
  bool valid = false;
  std::string reason;
};

// Conservative force of the static standing wave plus the lowest-order
// back-action of the atom on it. Terms: "pump_interaction", "back_action".
ForceResult static_force(const PhysicalParams& p, NodeOffset x0);

// Velocity-linear longitudinal force. approx=false gives both terms
// ("non_delay", "delay"); approx=true keeps only the delay term.
ForceResult friction_longitudinal(const PhysicalParams& p, NodeOffset x0, double v,
                                  bool approx = true);

// Same as the approximate longitudinal friction, written through s, sigma_a
// and the waist. Valid for |Delta| >> Gamma.
ForceResult friction_familiar(const PhysicalParams& p, NodeOffset x0, double v);

// Transverse friction for a Gaussian mode g(r) = g exp(-r^2/w^2).
ForceResult friction_transverse(const PhysicalParams& p, NodeOffset x0, double v, double r0);

// Trap-modified friction: tau -> tau sinc(2 omega_t tau), v -> peak velocity.
ForceResult friction_trapped(const PhysicalParams& p, NodeOffset x0, double v_m,
                             double omega_t);

// Oscillation-averaged d(p_peak^2)/dt for peak momentum p0 in a trap.
// Throws for omega_t = 0 with p0 > 0 (the orbit is unbounded).
double heating_rate_avg(const PhysicalParams& p, NodeOffset x0, double p0, double omega_t);

// Upsilon in dp^2/dt = Upsilon p^2 (untrapped, lowest order in v).
double heating_coefficient(const PhysicalParams& p, NodeOffset x0);

// Same, with the trap correction sinc(2 omega_t tau).
double heating_coefficient_trapped(const PhysicalParams& p, NodeOffset x0, double omega_t);

// Largest peak momentum that is still cooled. Closed form at the optimal
// point, bisection elsewhere. Throws when the position does not cool.
double capture_range(const PhysicalParams& p, double omega_t, NodeOffset x0);

// Momentum diffusion to lowest order in s, at absolute position x.
double diffusion_coefficient(const PhysicalParams& p, double x);

TemperatureResult steady_state_temperatures(const PhysicalParams& p, NodeOffset x0,
                                            double omega_t);

struct MirrorMinimum {
  NodeOffset offset{0.0};
  double t_mirror = 0.0;
};

// Minimum positive mirror temperature over x0' in (-1/2, 1/2].
MirrorMinimum mirror_temperature_minimum(const PhysicalParams& p, double omega_t);

// |Delta| in [Gamma, 100 Gamma] where the mirror and Doppler temperatures
// coincide, with the saturation parameter held fixed.
double crossover_detuning(const PhysicalParams& p, NodeOffset x0, double omega_t);

}  // namespace mmcool::analytic
