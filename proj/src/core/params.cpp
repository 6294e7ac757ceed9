#include "mmcool/params.hpp"

#include <cmath>
#include <stdexcept>

namespace mmcool {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

std::vector<std::string> PhysicalParams::warnings() const {
  std::vector<std::string> out;
  if (std::abs(detuning) < 5.0 * gamma) {
    out.push_back("detuning: |Delta| < 5 Gamma, adiabatic elimination is marginal");
  }
  return out;
}

double coupling_g_from_waist(double gamma, double wavelength, double waist) {
  const double sigma_a = 3.0 * wavelength * wavelength / two_pi;
  const double g2 = gamma * 4.0 * sigma_a / (pi * waist * waist) / two_pi;
  return std::sqrt(g2);
}

void validate(const PhysicalParams& p) {
  require(std::isfinite(p.gamma) && p.gamma > 0.0, "gamma must be positive");
  require(std::isfinite(p.detuning), "detuning must be finite");
  require(std::isfinite(p.coupling_g) && p.coupling_g >= 0.0,
          "coupling_g must be non-negative");
  require(std::isfinite(p.pump_rate) && p.pump_rate >= 0.0,
          "pump_rate must be non-negative");
  require(std::isfinite(p.delay_tau) && p.delay_tau > 0.0, "delay_tau must be positive");
  require(std::isfinite(p.k0) && p.k0 > 0.0, "k0 must be positive");
  require(std::isfinite(p.mass) && p.mass > 0.0, "mass must be positive");
  require(std::isfinite(p.trap_omega) && p.trap_omega >= 0.0,
          "trap_omega must be non-negative");
  require(std::isfinite(p.trap_offset) && p.trap_offset > -0.5 && p.trap_offset <= 0.5,
          "trap_offset must lie in (-1/2, 1/2] wavelengths");
  require(std::isfinite(p.waist) && p.waist > 0.0, "waist must be positive");
  require(std::isfinite(p.carrier_omega) && p.carrier_omega > 0.0,
          "carrier_omega must be positive");
}

PhysicalParams make_params(const Config& c) {
  PhysicalParams p;
  p.si.wavelength = c.number_or("wavelength_nm", 780.24) * 1e-9;
  p.si.gamma = two_pi * c.number_or("gamma_si_mhz", 3.03) * 1e6;
  p.si.mass = c.number_or("mass_u", 85.0) * si::atomic_mass_unit;
  require(p.si.wavelength > 0.0, "wavelength_nm must be positive");
  require(p.si.gamma > 0.0, "gamma_si_mhz must be positive");
  require(p.si.mass > 0.0, "mass_u must be positive");

  const double k0_si = two_pi / p.si.wavelength;

  p.gamma = c.number_or("gamma", 1.0);
  p.k0 = 1.0;
  p.detuning = c.number_or("detuning", -10.0);
  p.pump_rate = c.number_or("pump_rate", 62.5 / two_pi);
  p.delay_tau = c.number_or("delay_tau", 0.25);
  p.waist = c.number_or("waist_um", 0.7) * 1e-6 * k0_si;
  p.carrier_omega = si::speed_of_light * k0_si / p.si.gamma;
  // Mass from the recoil frequency hbar k0^2 / (2m) expressed in Gamma.
  p.mass = c.number_or("mass", p.si.mass * p.si.gamma / (si::hbar * k0_si * k0_si));
  p.trap_omega = two_pi * c.number_or("trap_omega_2pi", 0.5);
  p.trap_offset = c.number_or("trap_offset_lambda", -3.0 / 16.0);

  require(p.waist > 0.0, "waist must be positive");
  if (const auto g = c.number("coupling_g")) {
    p.coupling_g = *g;
  } else {
    p.coupling_g = coupling_g_from_waist(p.gamma, p.wavelength(), p.waist);
  }
  validate(p);
  return p;
}

PhysicalParams baseline_params() { return make_params(Config{}); }

DerivedParams derive(const PhysicalParams& p, double mode_spacing) {
  if (!(mode_spacing > 0.0) || !std::isfinite(mode_spacing)) {
    throw std::invalid_argument("mode_spacing must be positive");
  }
  DerivedParams d;
  const double denom = p.detuning * p.detuning + p.gamma * p.gamma;
  const double g2 = p.coupling_g * p.coupling_g;
  d.d_delta = p.detuning / denom;
  d.saturation_s = g2 * p.pump_rate / denom;
  d.sigma_a = 3.0 * p.wavelength() * p.wavelength() / two_pi;
  d.mode_spacing = mode_spacing;
  // A mode of width dw carries a(omega) integrated over its bin, so that
  // sum_k <-> (1/dw) * integral d omega.
  d.light_shift_u0 = g2 * d.d_delta * mode_spacing;
  d.scatter_gamma = g2 * p.gamma / denom * mode_spacing;
  d.pump_photons = p.pump_rate / mode_spacing;
  return d;
}

PhysicalParams with_detuning_fixed_saturation(const PhysicalParams& p, double detuning) {
  PhysicalParams q = p;
  const double old_denom = p.detuning * p.detuning + p.gamma * p.gamma;
  const double new_denom = detuning * detuning + p.gamma * p.gamma;
  q.detuning = detuning;
  q.pump_rate = p.pump_rate * new_denom / old_denom;
  return q;
}

double temperature_to_si(const PhysicalParams& p, double temperature) {
  if (!(p.si.gamma > 0.0)) throw std::invalid_argument("missing SI reference (gamma)");
  return temperature * si::hbar * p.si.gamma / si::k_boltzmann;
}

double temperature_from_si(const PhysicalParams& p, double kelvin) {
  if (!(p.si.gamma > 0.0)) throw std::invalid_argument("missing SI reference (gamma)");
  return kelvin * si::k_boltzmann / (si::hbar * p.si.gamma);
}

double time_to_si(const PhysicalParams& p, double time) {
  if (!(p.si.gamma > 0.0)) throw std::invalid_argument("missing SI reference (gamma)");
  return time / p.si.gamma;
}

double time_from_si(const PhysicalParams& p, double seconds) {
  if (!(p.si.gamma > 0.0)) throw std::invalid_argument("missing SI reference (gamma)");
  return seconds * p.si.gamma;
}

nlohmann::json to_json(const PhysicalParams& p) {
  return nlohmann::json{
      {"gamma", p.gamma},
      {"detuning", p.detuning},
      {"coupling_g", p.coupling_g},
      {"pump_rate", p.pump_rate},
      {"pump_rate_times_2pi", p.pump_rate * two_pi},
      {"delay_tau", p.delay_tau},
      {"k0", p.k0},
      {"mass", p.mass},
      {"trap_omega", p.trap_omega},
      {"trap_omega_2pi", p.trap_omega / two_pi},
      {"trap_offset_lambda", p.trap_offset},
      {"waist", p.waist},
      {"carrier_omega", p.carrier_omega},
      {"si_reference",
       {{"wavelength_m", p.si.wavelength},
        {"gamma_rad_per_s", p.si.gamma},
        {"mass_kg", p.si.mass}}},
  };
}

PhysicalParams params_from_json(const nlohmann::json& j) {
  PhysicalParams p;
  p.gamma = j.at("gamma").get<double>();
  p.detuning = j.at("detuning").get<double>();
  p.coupling_g = j.at("coupling_g").get<double>();
  p.pump_rate = j.at("pump_rate").get<double>();
  p.delay_tau = j.at("delay_tau").get<double>();
  p.k0 = j.at("k0").get<double>();
  p.mass = j.at("mass").get<double>();
  p.trap_omega = j.at("trap_omega").get<double>();
  p.trap_offset = j.at("trap_offset_lambda").get<double>();
  p.waist = j.at("waist").get<double>();
  p.carrier_omega = j.at("carrier_omega").get<double>();
  const auto& s = j.at("si_reference");
  p.si.wavelength = s.at("wavelength_m").get<double>();
  p.si.gamma = s.at("gamma_rad_per_s").get<double>();
  p.si.mass = s.at("mass_kg").get<double>();
  validate(p);
  return p;
}

nlohmann::json to_json(const DerivedParams& d) {
  return nlohmann::json{
      {"d_delta", d.d_delta},
      {"saturation_s", d.saturation_s},
      {"sigma_a", d.sigma_a},
      {"mode_spacing", d.mode_spacing},
      {"light_shift_u0", d.light_shift_u0},
      {"scatter_gamma", d.scatter_gamma},
      {"pump_photons", d.pump_photons},
  };
}

}  // namespace mmcool
