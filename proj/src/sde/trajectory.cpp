#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "mmcool/sde.hpp"

namespace mmcool::sde {
namespace {

Sample sample_of(const SystemState& s, std::complex<double> e) {
  return {s.t, s.x, s.p, s.photon_total(), e.real(), e.imag(), s.noise_work};
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer applied to a mix of both inputs
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Trajectory run_trajectory(const Model& model, SystemState state, const RunSpec& spec,
                          const kernels::KernelTable& table) {
  if (!(spec.t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (spec.sample_every == 0) throw std::invalid_argument("sample_every must be positive");
  Trajectory traj;
  traj.seed = spec.seed;

  double t_end = spec.t_end;
  const double t_rec = model.grid.recurrence_time();
  if (t_end > t_rec) {
    std::ostringstream msg;
    msg << "t_end = " << t_end << " exceeds the mode recurrence time " << t_rec << "; capped";
    traj.warnings.push_back(msg.str());
    t_end = t_rec;
  }

  Integrator integ(model, spec.dt, spec.noise, table);
  Rng rng(spec.seed);
  const auto steps = static_cast<std::size_t>(std::llround(t_end / spec.dt));
  traj.samples.reserve(steps / spec.sample_every + 2);
  traj.samples.push_back(sample_of(state, total_field(state, model.grid, table).e));

  for (std::size_t i = 1; i <= steps; ++i) {
    integ.step(state, rng);
    const bool finite = std::isfinite(state.x) && std::isfinite(state.p) &&
                        std::isfinite(state.a_re[model.grid.pump_index]) &&
                        std::isfinite(state.a_im[model.grid.pump_index]);
    if (!finite) {
      throw TrajectoryAborted(i, "non-finite state at step " + std::to_string(i));
    }
    if (i % spec.sample_every == 0 || i == steps) {
      const auto field = total_field(state, model.grid, table).e;
      if (!std::isfinite(field.real()) || !std::isfinite(field.imag())) {
        throw TrajectoryAborted(i, "non-finite field at step " + std::to_string(i));
      }
      traj.samples.push_back(sample_of(state, field));
    }
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const nlohmann::json& metadata) {
  nlohmann::json meta = metadata;
  meta["seed"] = traj.seed;
  meta["warnings"] = traj.warnings;
  out << "# " << meta.dump() << "\n";
  out << "t[1/Gamma],x_from_anchor[1/k0],p[hbar k0],photon_total[photons],"
         "field_at_atom_re[sqrt(photons)],field_at_atom_im[sqrt(photons)],"
         "noise_work[hbar Gamma]\n";
  char buf[512];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.x, s.p,
                  s.photon_total, s.e_re, s.e_im, s.noise_work);
    out << buf;
  }
}

}  // namespace mmcool::sde
