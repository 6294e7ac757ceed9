#include <cmath>
#include <stdexcept>

#include "mmcool/numeric.hpp"
#include "mmcool/sde.hpp"

namespace mmcool::sde {

double ModeGrid::max_abs_detuning() const {
  double m = 0.0;
  for (double d : detunings) m = std::max(m, std::fabs(d));
  return m;
}

double ModeGrid::wavenumber(std::size_t k) const {
  return (carrier_omega - detunings.at(k)) / speed_of_light();
}

double ModeGrid::anchor_position() const {
  return two_pi * static_cast<double>(anchor_node) / k0;
}

kernels::Geometry ModeGrid::geometry() const {
  kernels::Geometry g;
  g.n = n_modes;
  g.detunings = detunings.data();
  g.delta0 = detunings.empty() ? 0.0 : detunings.front();
  g.spacing = spacing;
  g.k0 = k0;
  g.q_ref = q_ref;
  g.inv_c = 1.0 / speed_of_light();
  return g;
}

ModeGrid make_mode_grid(const PhysicalParams& params, std::size_t n_modes, double spacing) {
  if (n_modes < 2) throw std::invalid_argument("n_modes must be at least 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("mode_spacing must be positive");
  }
  ModeGrid g;
  g.n_modes = n_modes;
  g.spacing = spacing;
  g.pump_index = n_modes / 2;
  g.k0 = params.k0;
  g.carrier_omega = params.carrier_omega;
  g.detunings.resize(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    g.detunings[k] = (static_cast<double>(g.pump_index) - static_cast<double>(k)) * spacing;
  }
  // Anchor: the even-multiple-of-pi node nearest to c tau.
  const double phase = params.carrier_omega * params.delay_tau;  // k0 c tau
  g.anchor_node = static_cast<std::int64_t>(std::llround(phase / two_pi));
  if (g.anchor_node < 1) g.anchor_node = 1;
  g.q_ref = two_pi * static_cast<double>(g.anchor_node) / params.carrier_omega;
  return g;
}

double mode_function(const ModeGrid& grid, std::size_t k, double x) {
  const double theta = grid.k0 * x - grid.detunings.at(k) * (grid.q_ref + x / grid.speed_of_light());
  return std::sin(theta);
}

double mode_function_derivative(const ModeGrid& grid, std::size_t k, double x) {
  const double inv_c = 1.0 / grid.speed_of_light();
  const double d = grid.detunings.at(k);
  const double theta = grid.k0 * x - d * (grid.q_ref + x * inv_c);
  return (grid.k0 - d * inv_c) * std::cos(theta);
}

double SystemState::photon_total() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < a_re.size(); ++k) s.add(a_re[k] * a_re[k] + a_im[k] * a_im[k]);
  return s.value();
}

}  // namespace mmcool::sde
