#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mmcool/config.hpp"

// Unit system used throughout: hbar = 1, time in 1/Gamma, length in 1/k0,
// momentum in hbar*k0, energy and temperature in hbar*Gamma (k_B = 1).
namespace mmcool {

namespace si {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double k_boltzmann = 1.380649e-23;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;
inline constexpr double speed_of_light = 299792458.0;
}  // namespace si

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

struct SiReference {
  double wavelength = 0.0;  // m
  double gamma = 0.0;       // rad/s, the atomic half-linewidth
  double mass = 0.0;        // kg

  bool populated() const { return wavelength > 0.0 && gamma > 0.0 && mass > 0.0; }
};

struct PhysicalParams {
  double gamma = 1.0;        // atomic half-linewidth; the decay rate is 2*gamma
  double detuning = -10.0;   // omega_a - omega_0; negative is red of the pump
  double coupling_g = 0.0;   // continuum coupling, units of sqrt(gamma)
  double pump_rate = 0.0;    // |A|^2, photons per unit time
  double delay_tau = 0.25;   // atom-mirror light travel time
  double k0 = 1.0;
  double mass = 0.0;
  double trap_omega = 0.0;   // angular trap frequency
  double trap_offset = 0.0;  // trap centre relative to the nearest pump node, wavelengths
  double waist = 0.0;        // Gaussian mode waist, 1/k0 units
  double carrier_omega = 0.0;  // omega_0 / gamma; equals c in simulation units
  SiReference si;

  double wavelength() const { return two_pi / k0; }
  double speed_of_light() const { return carrier_omega / k0; }
  // Trap-centre offset from its node in length units.
  double trap_offset_length() const { return trap_offset * wavelength(); }
  double trap_spring() const { return mass * trap_omega * trap_omega; }

  // Soft validity checks (e.g. the far-detuned regime). Empty when clean.
  std::vector<std::string> warnings() const;
};

struct DerivedParams {
  double d_delta = 0.0;        // D(Delta) = Delta / (Delta^2 + Gamma^2)
  double saturation_s = 0.0;   // g^2 |A|^2 / (Delta^2 + Gamma^2)
  double sigma_a = 0.0;        // 3 lambda^2 / (2 pi)
  double mode_spacing = 0.0;
  double light_shift_u0 = 0.0;  // discrete model, per photon
  double scatter_gamma = 0.0;   // discrete model, per photon
  double pump_photons = 0.0;    // |alpha_pump|^2 equivalent to pump_rate
};

// Builds validated parameters. Every key is optional; the defaults are the
// 85Rb baseline (|A|^2 = 62.5 Gamma/2pi, Delta = -10 Gamma, tau = 0.25/Gamma,
// w = 0.7 um). Throws std::invalid_argument naming the offending field.
PhysicalParams make_params(const Config& config);
PhysicalParams baseline_params();

void validate(const PhysicalParams& params);

DerivedParams derive(const PhysicalParams& params, double mode_spacing);

// Same parameters at a new detuning with the pump rescaled so that the
// saturation parameter stays fixed.
PhysicalParams with_detuning_fixed_saturation(const PhysicalParams& params, double detuning);

// g^2 from the waist via 2 pi g^2 / Gamma = 4 sigma_a / (pi w^2).
double coupling_g_from_waist(double gamma, double wavelength, double waist);

double temperature_to_si(const PhysicalParams& params, double temperature);
double temperature_from_si(const PhysicalParams& params, double kelvin);
double time_to_si(const PhysicalParams& params, double time);
double time_from_si(const PhysicalParams& params, double seconds);

nlohmann::json to_json(const PhysicalParams& params);
PhysicalParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DerivedParams& derived);

}  // namespace mmcool
