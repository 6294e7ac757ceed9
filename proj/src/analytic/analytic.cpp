#include "mmcool/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmcool/specfun.hpp"

namespace mmcool::analytic {
namespace {

ForceResult make_result(std::vector<ForceTerm> terms) {
  ForceResult r;
  for (const auto& t : terms) r.value += t.value;
  r.breakdown = std::move(terms);
  return r;
}

double g2d(const PhysicalParams& p) {
  return p.coupling_g * p.coupling_g * p.detuning /
         (p.detuning * p.detuning + p.gamma * p.gamma);
}

// beta in F = -beta v sin(4 k0 x0'), with an effective delay.
double friction_beta(const PhysicalParams& p, double tau_eff) {
  const double c = g2d(p);
  return two_pi * p.k0 * p.k0 * tau_eff * p.pump_rate * c * c;
}

double effective_delay(const PhysicalParams& p, double omega_t) {
  if (!(omega_t >= 0.0)) throw std::invalid_argument("omega_t must be non-negative");
  return p.delay_tau * specfun::sinc(2.0 * omega_t * p.delay_tau);
}

// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ForceResult::term(const std::string& name) const {
  for (const auto& t : breakdown) {
    if (t.name == name) return t.value;
  }
  throw std::out_of_range("no force term named '" + name + "'");
}

ForceResult static_force(const PhysicalParams& p, NodeOffset x0) {
  const double x = x0.phase();
  const double c = g2d(p);
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  const double pump = -p.k0 * p.pump_rate * c * std::sin(2.0 * x);
  const double back = p.k0 * p.pump_rate * c * (0.5 * pi) * c * sx * sx * (4.0 * cx * cx - 1.0);
  return make_result({{"pump_interaction", pump}, {"back_action", back}});
}

ForceResult friction_longitudinal(const PhysicalParams& p, NodeOffset x0, double v, bool approx) {
  const double x = x0.phase();
  const double c = g2d(p);
  const double delay = -friction_beta(p, p.delay_tau) * v * std::sin(4.0 * x);
  if (approx) return make_result({{"delay", delay}});
  const double s2 = std::sin(2.0 * x);
  const double non_delay =
      two_pi * p.k0 * v * p.pump_rate * c * c * s2 * s2 / p.speed_of_light();
  return make_result({{"non_delay", non_delay}, {"delay", delay}});
}

ForceResult friction_familiar(const PhysicalParams& p, NodeOffset x0, double v) {
  const double denom = p.detuning * p.detuning + p.gamma * p.gamma;
  const double s = p.coupling_g * p.coupling_g * p.pump_rate / denom;
  const double sigma_a = 3.0 * p.wavelength() * p.wavelength() / two_pi;
  const double f = -4.0 * v * s * p.gamma * sigma_a / (pi * p.waist * p.waist) * p.k0 * p.k0 *
                   p.delay_tau * std::sin(4.0 * x0.phase());
  return make_result({{"delay", f}});
}

ForceResult friction_transverse(const PhysicalParams& p, NodeOffset x0, double v, double r0) {
  const double w2 = p.waist * p.waist;
  const double g = p.coupling_g * std::exp(-r0 * r0 / w2);
  const double dg = -2.0 * r0 / w2 * g;
  const double k = 2.0 * g * dg * p.detuning / (p.detuning * p.detuning + p.gamma * p.gamma);
  const double x = x0.phase();
  const double sx = std::sin(x);
  const double f = -4.0 * pi * v * p.delay_tau * p.pump_rate * k * k * sx * sx * sx * std::cos(x);
  return make_result({{"delay", f}});
}

ForceResult friction_trapped(const PhysicalParams& p, NodeOffset x0, double v_m, double omega_t) {
  const double beta = friction_beta(p, effective_delay(p, omega_t));
  return make_result({{"delay", -beta * v_m * std::sin(4.0 * x0.phase())}});
}

double heating_coefficient(const PhysicalParams& p, NodeOffset x0) {
  return -2.0 * friction_beta(p, p.delay_tau) * std::sin(4.0 * x0.phase()) / p.mass;
}

double heating_coefficient_trapped(const PhysicalParams& p, NodeOffset x0, double omega_t) {
  return -2.0 * friction_beta(p, effective_delay(p, omega_t)) * std::sin(4.0 * x0.phase()) /
         p.mass;
}

double heating_rate_avg(const PhysicalParams& p, NodeOffset x0, double p0, double omega_t) {
  if (!(p0 >= 0.0)) throw std::invalid_argument("p0 must be non-negative");
  if (!(omega_t >= 0.0)) throw std::invalid_argument("omega_t must be non-negative");
  if (p0 == 0.0) return 0.0;
  if (omega_t == 0.0) throw std::invalid_argument("unbounded excursion: omega_t = 0 with p0 > 0");
  const double x_m = p0 / (p.mass * omega_t);
  const double integral =
      specfun::spatial_average_integral(4.0 * x0.phase(), 4.0 * p.k0 * x_m);
  // beta / (2 pi) * 2 / m = (2 tau_eff / m) |A|^2 (g^2 D)^2 k0^2
  const double prefactor = 2.0 * friction_beta(p, effective_delay(p, omega_t)) / (two_pi * p.mass);
  return -prefactor * p0 * p0 * integral;
}

double capture_range(const PhysicalParams& p, double omega_t, NodeOffset x0) {
  if (!(omega_t > 0.0)) throw std::invalid_argument("capture_range requires omega_t > 0");
  const double a = 4.0 * x0.phase();
  const double scale = p.mass * omega_t / (4.0 * p.k0);  // p0 = scale * b
  const double sa = std::sin(a);
  const double ca = std::cos(a);
  if (std::fabs(ca) < 1e-12 && sa > 0.0) return specfun::bessel_j1_first_zero * scale;

  // The sign of the averaged rate follows -I(a, b).
  const double sign_tau = effective_delay(p, omega_t) >= 0.0 ? 1.0 : -1.0;
  auto cooling = [&](double b) { return sign_tau * specfun::spatial_average_integral(a, b); };

  const double b_lo = 1e-6 / scale;
  constexpr double b_max = 80.0;
  if (!(cooling(b_lo) > 0.0)) {
    throw std::domain_error("no finite capture range at this position");
  }
  constexpr double step = 0.05;
  double prev = b_lo;
  for (double b = step; b <= b_max + 1e-12; b += step) {
    if (cooling(b) <= 0.0) {
      return scale * bisect(cooling, prev, b, 1e-14 * b);
    }
    prev = b;
  }
  throw std::domain_error("no finite capture range at this position");
}

double diffusion_coefficient(const PhysicalParams& p, double x) {
  const double denom = p.detuning * p.detuning + p.gamma * p.gamma;
  const double s = p.coupling_g * p.coupling_g * p.pump_rate / denom;
  const double c = std::cos(p.k0 * x);
  const double sn = std::sin(p.k0 * x);
  return p.k0 * p.k0 * p.gamma * s * (c * c + 0.4 * sn * sn);
}

TemperatureResult steady_state_temperatures(const PhysicalParams& p, NodeOffset x0,
                                            double omega_t) {
  TemperatureResult r;
  const double sigma_a = 3.0 * p.wavelength() * p.wavelength() / two_pi;
  r.t_mirror_approx = (1.0 / p.delay_tau) * pi * p.waist * p.waist / (8.0 * sigma_a);

  const double x = x0.phase();
  const double cx = std::cos(x);
  // sin(2 w tau) / w written as 2 tau sinc(2 w tau) so that w -> 0 is regular.
  const double den = 2.0 * effective_delay(p, omega_t) * std::sin(4.0 * x);
  const double g2 = p.coupling_g * p.coupling_g;
  if (den == 0.0 || g2 == 0.0) {
    r.t_mirror = std::numeric_limits<double>::infinity();
    r.reason = "mirror temperature diverges at this position/trap frequency";
  } else {
    r.t_mirror = (1.0 / (5.0 * pi)) * (p.gamma / g2) * (2.0 + 3.0 * cx * cx) / den;
  }

  if (p.detuning < 0.0) {
    const double d2 = p.detuning * p.detuning + p.gamma * p.gamma;
    r.t_doppler = -p.gamma * d2 / (2.0 * p.detuning);
  } else {
    r.t_doppler = std::numeric_limits<double>::infinity();
    if (r.reason.empty()) r.reason = "Doppler cooling needs red detuning";
  }

  if (!(r.t_mirror > 0.0) && std::isfinite(r.t_mirror)) {
    r.reason = "mirror force heats at this position";
  }
  r.valid = r.t_mirror > 0.0 && std::isfinite(r.t_mirror) && r.t_doppler > 0.0 &&
            std::isfinite(r.t_doppler);
  if (r.valid) {
    r.t_combined = 1.0 / (1.0 / r.t_mirror + 1.0 / r.t_doppler);
  } else {
    r.t_combined = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

MirrorMinimum mirror_temperature_minimum(const PhysicalParams& p, double omega_t) {
  auto t_of = [&](double w) {
    const auto t = steady_state_temperatures(p, NodeOffset(w), omega_t).t_mirror;
    return (t > 0.0 && std::isfinite(t)) ? t : std::numeric_limits<double>::infinity();
  };
  constexpr int n = 4000;
  double best_w = 0.0;
  double best_t = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) {
    const double w = -0.5 + static_cast<double>(i) / n;
    const double t = t_of(w);
    if (t < best_t) {
      best_t = t;
      best_w = w;
    }
  }
  if (!std::isfinite(best_t)) throw std::domain_error("mirror force heats everywhere");
  // Golden-section refinement inside the neighbouring grid cells.
  double lo = best_w - 1.0 / n;
  double hi = best_w + 1.0 / n;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
    if (t_of(c) < t_of(d)) {
      hi = d;
    } else {
      lo = c;
    }
    c = hi - r * (hi - lo);
    d = lo + r * (hi - lo);
  }
  const double w = 0.5 * (lo + hi);
  return {NodeOffset(w), t_of(w)};
}

double crossover_detuning(const PhysicalParams& p, NodeOffset x0, double omega_t) {
  auto diff = [&](double mag) {
    const auto q = with_detuning_fixed_saturation(p, -mag * p.gamma);
    const auto t = steady_state_temperatures(q, x0, omega_t);
    if (!(t.t_mirror > 0.0) || !std::isfinite(t.t_mirror)) {
      throw std::domain_error("no crossover: mirror force does not cool at this position");
    }
    return t.t_doppler - t.t_mirror;
  };
  constexpr double lo = 1.0;
  constexpr double hi = 100.0;
  const double f_lo = diff(lo);
  const double f_hi = diff(hi);
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw std::domain_error("no crossover detuning in [Gamma, 100 Gamma]");
  }
  return bisect(diff, lo, hi, 1e-12) * p.gamma;
}

}  // namespace mmcool::analytic
