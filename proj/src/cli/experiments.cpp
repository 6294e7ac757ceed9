#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mmcool/analytic.hpp"
#include "mmcool/cli.hpp"
#include "mmcool/config.hpp"
#include "mmcool/ensemble.hpp"
#include "mmcool/output.hpp"
#include "mmcool/params.hpp"
#include "mmcool/sde.hpp"

#ifndef MMCOOL_VERSION
#define MMCOOL_VERSION "unknown"
#endif

namespace mmcool::cli {
namespace {

using analytic::NodeOffset;
using nlohmann::json;

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    item = item.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw std::invalid_argument(key + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(key + ": empty list");
  return out;
}

std::string format(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

// Everything an experiment needs, resolved once from the config.
struct Context {
  const ExperimentCommand& cmd;
  Config config;
  PhysicalParams params;
  sde::ModelSpec model_spec;
  ensemble::EnsembleSpec base;
  std::ostream& out;
  std::ostream& err;
  Manifest manifest;
  json summary = json::object();

  double uk(double t) const { return temperature_to_si(params, t) * 1e6; }
  double ms(double t) const { return time_to_si(params, t) * 1e3; }

  std::string path(const std::string& name) const { return join_path(cmd.output_dir, name); }

  void write_csv(const std::string& name, const CsvTable& table) {
    table.write(path(name));
    manifest.files.push_back(name);
  }
};

ensemble::EnsembleSpec base_spec(const Config& c, const ExperimentCommand& cmd) {
  ensemble::EnsembleSpec s;
  s.dt = c.number_or("dt", 1e-3);
  s.t_end = c.number_or("t_end", 0.0);
  s.sample_every = static_cast<std::size_t>(c.integer_or("sample_every", 50));
  s.window_start = c.number_or("window_start", -1.0);
  s.window_end = c.number_or("window_end", -1.0);
  s.master_seed = cmd.master_seed;
  s.workers = cmd.workers;
  s.backend = kernels::parse_backend(c.string_or("kernels", "auto"));
  s.noise.momentum = c.flag_or("noise_momentum", true);
  s.noise.field = c.flag_or("noise_field", true);
  return s;
}

json simulation_json(const Context& ctx) {
  return json{{"n_modes", ctx.model_spec.n_modes},
              {"mode_spacing", ctx.model_spec.mode_spacing},
              {"dt", ctx.base.dt},
              {"t_end", ctx.base.t_end},
              {"sample_every", ctx.base.sample_every},
              {"window_start", ctx.base.window_start},
              {"window_end", ctx.base.window_end},
              {"noise_model", sde::NoiseSpec::model_description()},
              {"kernels", kernels::select(ctx.base.backend).name}};
}

json resolved_json(const Context& ctx) {
  return json{{"physical", to_json(ctx.params)},
              {"derived", to_json(derive(ctx.params, ctx.model_spec.mode_spacing))},
              {"simulation", simulation_json(ctx)}};
}

NodeOffset trap_offset(const Context& ctx) { return NodeOffset(ctx.params.trap_offset); }

// ---- dump-config ----------------------------------------------------------

void dump_config(Context& ctx) {
  const json j = resolved_json(ctx);
  const std::string name = "resolved_config.json";
  std::ofstream f(ctx.path(name), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + ctx.path(name) + "'");
  f << j.dump(2) << "\n";
  ctx.manifest.files.push_back(name);
  ctx.out << j.dump(2) << "\n";
}

// ---- analytic-scan --------------------------------------------------------

void analytic_scan(Context& ctx) {
  const auto& p = ctx.params;
  const double w_t = p.trap_omega;
  const int n = static_cast<int>(ctx.config.integer_or("scan_points", 400));
  if (n < 2) throw std::invalid_argument("scan_points must be at least 2");
  const double r0 = ctx.config.number_or("transverse_r0_waists", 0.5) * p.waist;

  CsvTable pos;
  pos.columns = {"x0_offset[lambda]",         "upsilon[1/Gamma]",
                 "upsilon_trapped[1/Gamma]",  "friction_longitudinal_per_v[hbar k0^2]",
                 "friction_transverse_per_v[hbar k0^2]", "static_force[hbar k0 Gamma]",
                 "t_mirror[uK]",              "cooling[1=yes]"};
  for (int i = 0; i < n; ++i) {
    const double w = -0.5 + (i + 1.0) / n;
    const NodeOffset x(w);
    const double ups = analytic::heating_coefficient(p, x);
    const auto t = analytic::steady_state_temperatures(p, x, w_t);
    pos.add_row({w, ups, analytic::heating_coefficient_trapped(p, x, w_t),
                 analytic::friction_longitudinal(p, x, 1.0).value,
                 analytic::friction_transverse(p, x, 1.0, r0).value,
                 analytic::static_force(p, x).value,
                 (t.t_mirror > 0.0 && std::isfinite(t.t_mirror)) ? ctx.uk(t.t_mirror) : NAN,
                 ups < 0.0 ? 1.0 : 0.0});
  }
  ctx.write_csv("analytic_position_scan.csv", pos);

  CsvTable det;
  det.columns = {"detuning_abs[Gamma]", "pump_rate[Gamma]", "t_mirror[uK]", "t_doppler[uK]",
                 "t_combined[uK]"};
  for (int i = 0; i <= 200; ++i) {
    const double d = 1.0 + 0.2 * i;
    const auto q = with_detuning_fixed_saturation(p, -d * p.gamma);
    const auto t = analytic::steady_state_temperatures(q, trap_offset(ctx), w_t);
    det.add_row({d, q.pump_rate, ctx.uk(t.t_mirror), ctx.uk(t.t_doppler),
                 t.valid ? ctx.uk(t.t_combined) : NAN});
  }
  ctx.write_csv("analytic_detuning_scan.csv", det);

  CsvTable heat;
  heat.columns = {"p0[hbar k0]", "p0_sq[(hbar k0)^2]", "rate_avg[(hbar k0)^2 Gamma]"};
  if (w_t > 0.0) {
    double pmax = 4.0 * p.mass * w_t;
    for (int i = 1; i <= 200; ++i) {
      const double p0 = pmax * i / 200.0;
      heat.add_row({p0, p0 * p0, analytic::heating_rate_avg(p, trap_offset(ctx), p0, w_t)});
    }
  }
  ctx.write_csv("analytic_heating_curve.csv", heat);

  const NodeOffset best = analytic::max_friction_offset();
  const double ups = analytic::heating_coefficient(p, best);
  const auto tb = analytic::steady_state_temperatures(p, best, w_t);
  const auto t0 = analytic::steady_state_temperatures(p, best, 0.0);
  ctx.summary = {{"upsilon_at_max_friction_per_gamma", ups},
                 {"cooling_time_1_over_upsilon_ms", ctx.ms(1.0 / std::fabs(ups))},
                 {"t_mirror_uK", ctx.uk(tb.t_mirror)},
                 {"t_combined_zero_trap_uK", ctx.uk(t0.t_combined)},
                 {"t_mirror_approx_uK", ctx.uk(tb.t_mirror_approx)}};
  ctx.out << "Upsilon(x0'=-3lambda/16) = " << format(ups) << " Gamma ("
          << format(ctx.ms(1.0 / std::fabs(ups))) << " ms for 1/|Upsilon|)\n";
  ctx.out << "T_M(omega_t = " << format(w_t / two_pi) << " x 2pi Gamma) = "
          << format(ctx.uk(tb.t_mirror)) << " uK; combined limit omega_t->0 = "
          << format(ctx.uk(t0.t_combined)) << " uK\n";
  if (w_t > 0.0) {
    const double pc = analytic::capture_range(p, w_t, best);
    ctx.summary["capture_momentum_hbar_k0"] = pc;
    ctx.summary["capture_temperature_mK"] = ctx.uk(pc * pc / p.mass) * 1e-3;
    ctx.out << "capture range = " << format(pc) << " hbar k0 ("
            << format(ctx.uk(pc * pc / p.mass) * 1e-3) << " mK)\n";
  }
}

// ---- friction-curve -------------------------------------------------------

void friction_curve(Context& ctx) {
  const auto& p = ctx.params;
  if (!(p.trap_omega > 0.0)) throw std::invalid_argument("friction-curve needs trap_omega_2pi > 0");
  const sde::Model model = sde::make_model(p, ctx.model_spec);
  auto spec = ctx.base;
  spec.n_traj = static_cast<std::size_t>(ctx.config.integer_or("n_traj", 64));
  spec.noise.enabled = false;
  spec.stratified_phases = ctx.config.flag_or("stratified_phases", false);

  const double pc = analytic::capture_range(p, p.trap_omega, trap_offset(ctx));
  std::vector<double> grid;
  if (ctx.config.contains("p0_values")) {
    grid = parse_list("p0_values", ctx.config.string_or("p0_values", ""));
  } else {
    for (int i = 1; i <= 8; ++i) grid.push_back(0.05 * i * pc);
  }
  const auto points = ensemble::friction_curve(model, grid, spec);
  const double half_ups =
      0.5 * analytic::heating_coefficient_trapped(p, trap_offset(ctx), p.trap_omega);

  CsvTable t;
  t.columns = {"p0[hbar k0]",
               "p0_sq[(hbar k0)^2]",
               "rate_sim[(hbar k0)^2 Gamma]",
               "rate_sim_se[(hbar k0)^2 Gamma]",
               "rate_analytic[(hbar k0)^2 Gamma]",
               "rate_small_p[(hbar k0)^2 Gamma]"};
  double worst = 0.0;
  double sa = 0.0;
  double aa = 0.0;
  for (const auto& pt : points) {
    const double a = analytic::heating_rate_avg(p, trap_offset(ctx), pt.p0, p.trap_omega);
    t.add_row({pt.p0, pt.p0_sq, pt.rate.mean, pt.rate.se, a, half_ups * pt.p0_sq});
    worst = std::max(worst, std::fabs(pt.rate.mean / a - 1.0));
    sa += pt.rate.mean * a;
    aa += a * a;
  }
  ctx.write_csv("friction_curve.csv", t);

  // Slope through the origin of rate vs p0^2.
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& pt : points) {
    sxy += pt.p0_sq * pt.rate.mean;
    sxx += pt.p0_sq * pt.p0_sq;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : NAN;
  ctx.summary = {{"slope_sim_per_gamma", slope},
                 {"slope_analytic_per_gamma", half_ups},
                 {"ratio", slope / half_ups},
                 {"ratio_to_averaged_rate", sa / aa},
                 {"max_pointwise_deviation", worst},
                 {"capture_momentum_analytic", pc}};
  ctx.out << "d(p^2)/dt slope vs p0^2: simulated " << format(slope) << " Gamma, small-p limit "
          << format(half_ups) << " Gamma (ratio " << format(slope / half_ups) << ")\n";
  ctx.out << "simulated / oscillation-averaged rate: " << format(sa / aa)
          << " (largest pointwise deviation " << format(worst) << ")\n";
}

// ---- capture-scan ---------------------------------------------------------

void capture_scan(Context& ctx) {
  const auto& p = ctx.params;
  std::vector<double> omegas;
  for (double w : parse_list("capture_omegas_2pi",
                             ctx.config.string_or("capture_omegas_2pi", "0.1,0.2,0.3,0.5"))) {
    omegas.push_back(two_pi * w);
  }
  auto spec = ctx.base;
  spec.n_traj = static_cast<std::size_t>(ctx.config.integer_or("n_traj", 8));
  spec.noise.enabled = false;
  ensemble::CaptureOptions opt;
  opt.rel_tol = ctx.config.number_or("capture_rel_tol", 5e-3);
  const auto pts = ensemble::capture_scan(p, omegas, spec, ctx.model_spec, opt);

  CsvTable t;
  t.columns = {"omega_t_2pi[Gamma]", "p_capture_sim[hbar k0]", "t_capture_sim[mK]",
               "p_capture_analytic[hbar k0]", "t_capture_analytic[mK]", "bounded[1=yes]",
               "rate_evaluations[count]"};
  json rows = json::array();
  for (const auto& c : pts) {
    const double ta = c.analytic_momentum * c.analytic_momentum / p.mass;
    t.add_row({c.omega_t / two_pi, c.bounded ? c.momentum : NAN,
               c.bounded ? ctx.uk(c.temperature) * 1e-3 : NAN, c.analytic_momentum,
               ctx.uk(ta) * 1e-3, c.bounded ? 1.0 : 0.0, static_cast<double>(c.evaluations)});
    ctx.out << "omega_t = " << format(c.omega_t / two_pi) << " x 2pi Gamma: ";
    if (c.bounded) {
      ctx.out << format(ctx.uk(c.temperature) * 1e-3) << " mK simulated, ";
    } else {
      ctx.out << "unbounded in scan window, ";
    }
    ctx.out << format(ctx.uk(ta) * 1e-3) << " mK analytic\n";
    rows.push_back({{"omega_t_2pi", c.omega_t / two_pi},
                    {"bounded", c.bounded},
                    {"t_capture_sim_mK", c.bounded ? ctx.uk(c.temperature) * 1e-3 : 0.0},
                    {"t_capture_analytic_mK", ctx.uk(ta) * 1e-3}});
  }
  ctx.write_csv("capture_scan.csv", t);
  ctx.summary = {{"points", rows}};
}

// ---- steady-state ---------------------------------------------------------

void steady_state(Context& ctx) {
  const auto& p = ctx.params;
  const sde::Model model = sde::make_model(p, ctx.model_spec);
  auto spec = ctx.base;
  spec.n_traj = static_cast<std::size_t>(ctx.config.integer_or("n_traj", 256));
  spec.noise.enabled = ctx.config.flag_or("noise", true);
  std::vector<double> grid;
  for (double t : parse_list("t0_list_uK", ctx.config.string_or("t0_list_uK",
                                                                 "250,450,650,900,1200"))) {
    grid.push_back(temperature_from_si(p, t * 1e-6));
  }

  CsvTable t;
  t.columns = {"t0_requested[uK]", "t0_realized[uK]", "dTdt[uK/ms]", "dTdt_se[uK/ms]"};
  const double rate_si = temperature_to_si(p, 1.0) * 1e6 / (time_to_si(p, 1.0) * 1e3);
  auto write_points = [&](const std::vector<ensemble::SteadyStatePoint>& pts) {
    for (const auto& pt : pts) {
      t.add_row({ctx.uk(pt.t0), ctx.uk(pt.t0_realized), pt.rate.mean * rate_si,
                 pt.rate.se * rate_si});
    }
    ctx.write_csv("steady_state_points.csv", t);
  };

  try {
    const auto res = ensemble::steady_state_scan(model, grid, spec);
    write_points(res.points);
    const auto pred = analytic::steady_state_temperatures(p, trap_offset(ctx), p.trap_omega);
    ctx.summary = {{"t_ss_uK", ctx.uk(res.t_ss)},
                   {"t_ss_sigma_uK", ctx.uk(res.t_ss_sigma)},
                   {"cooling_time_ms", ctx.ms(res.cooling_time)},
                   {"fit_coefficients", res.fit.coef},
                   {"fit_chi2", res.fit.chi2},
                   {"t_mirror_analytic_uK", ctx.uk(pred.t_mirror)}};
    ctx.out << "T_ss = " << format(ctx.uk(res.t_ss)) << " +- " << format(ctx.uk(res.t_ss_sigma))
            << " uK, cooling time " << format(ctx.ms(res.cooling_time)) << " ms (analytic T_M "
            << format(ctx.uk(pred.t_mirror)) << " uK)\n";
  } catch (const ensemble::SteadyStateError& e) {
    ctx.manifest.body["fit_coefficients"] = e.fit().coef;
    throw;
  }
}

// ---- crossover ------------------------------------------------------------

void crossover(Context& ctx) {
  const auto& p = ctx.params;
  const double d = analytic::crossover_detuning(p, trap_offset(ctx), p.trap_omega);
  CsvTable t;
  t.columns = {"crossover_detuning_abs[Gamma]", "temperature[uK]"};
  const auto at = analytic::steady_state_temperatures(
      with_detuning_fixed_saturation(p, -d), trap_offset(ctx), p.trap_omega);
  t.add_row({d, ctx.uk(at.t_mirror)});
  ctx.write_csv("crossover.csv", t);
  ctx.summary = {{"crossover_detuning_abs_gamma", d}, {"temperature_uK", ctx.uk(at.t_mirror)}};
  ctx.out << "mirror and Doppler temperatures cross at |Delta| = " << format(d) << " Gamma ("
          << format(ctx.uk(at.t_mirror)) << " uK)\n";
}

// ---- trajectory -----------------------------------------------------------

void trajectory(Context& ctx) {
  const auto& p = ctx.params;
  const sde::Model model = sde::make_model(p, ctx.model_spec);
  sde::RunSpec run;
  run.t_end = ctx.config.number_or("t_end", 50.0);
  run.dt = ctx.base.dt;
  run.sample_every = static_cast<std::size_t>(ctx.config.integer_or("sample_every", 100));
  run.noise = ctx.base.noise;
  run.noise.enabled = ctx.config.flag_or("noise", false);
  run.seed = sde::stream_seed(ctx.cmd.master_seed, 0);
  auto init = sde::initial_state(model, model.trap.center + ctx.config.number_or("init_x", 0.0),
                                 ctx.config.number_or("init_p", 0.0),
                                 ctx.config.number_or("initial_pump_photons", model.pump_photons));
  const auto traj = sde::run_trajectory(model, std::move(init), run,
                                        kernels::select(ctx.base.backend));
  for (const auto& w : traj.warnings) ctx.err << "warning: " << w << "\n";

  const json meta = {{"config", resolved_json(ctx)},
                     {"master_seed", ctx.cmd.master_seed},
                     {"code_version", MMCOOL_VERSION}};
  const std::string name = "trajectory.csv";
  std::ofstream f(ctx.path(name), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + ctx.path(name) + "'");
  sde::write_trajectory_csv(f, traj, meta);
  ctx.manifest.files.push_back(name);
  const auto& last = traj.samples.back();
  ctx.summary = {{"samples", traj.samples.size()}, {"final_p", last.p}, {"final_t", last.t}};
  ctx.out << traj.samples.size() << " samples to t = " << format(last.t) << " / Gamma, final p = "
          << format(last.p) << " hbar k0\n";
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
  static const std::map<std::string, std::function<void(Context&)>> r = {
      {"dump-config", dump_config},   {"analytic-scan", analytic_scan},
      {"friction-curve", friction_curve}, {"capture-scan", capture_scan},
      {"steady-state", steady_state}, {"crossover", crossover},
      {"trajectory", trajectory}};
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"dump-config",  "analytic-scan",
                                                 "friction-curve", "capture-scan",
                                                 "steady-state", "crossover", "trajectory"};
  return names;
}

void run(const ExperimentCommand& cmd, std::ostream& out, std::ostream& err) {
  const auto& reg = registry();
  const auto it = reg.find(cmd.name);
  if (it == reg.end()) throw std::invalid_argument("unknown command '" + cmd.name + "'");

  Config config = cmd.config_path.empty() ? Config{} : Config::load(cmd.config_path);
  for (const auto& o : cmd.overrides) config.set(o);

  ensure_directory(cmd.output_dir);
  Context ctx{cmd, std::move(config), {}, {}, {}, out, err, {}, json::object()};
  ctx.params = make_params(ctx.config);
  ctx.model_spec.n_modes = static_cast<std::size_t>(ctx.config.integer_or("n_modes", 256));
  ctx.model_spec.mode_spacing = ctx.config.number_or("mode_spacing", 0.1);
  ctx.base = base_spec(ctx.config, cmd);
  for (const auto& w : ctx.params.warnings()) err << "warning: " << w << "\n";

  ctx.manifest.command = cmd.name;
  const auto started = std::chrono::steady_clock::now();
  it->second(ctx);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  for (const auto& k : ctx.config.unused_keys()) {
    err << "warning: config key '" << k << "' was not used by " << cmd.name << "\n";
  }
  const json resolved = resolved_json(ctx);
  ctx.manifest.body["config"] = resolved;
  ctx.manifest.body["config_hash"] = fnv1a_hex(resolved.dump());
  ctx.manifest.body["overrides"] = cmd.overrides;
  ctx.manifest.body["master_seed"] = cmd.master_seed;
  ctx.manifest.body["workers"] = ensemble::resolve_workers(cmd.workers);
  ctx.manifest.body["code_version"] = MMCOOL_VERSION;
  ctx.manifest.body["timings"] = {{"wall_seconds", seconds}};
  ctx.manifest.body["summary"] = ctx.summary;
  const std::string manifest_name = cmd.name + "_manifest.json";
  ctx.manifest.write(ctx.path(manifest_name));
  out << "wrote " << ctx.manifest.files.size() << " file(s) and " << manifest_name << " to "
      << cmd.output_dir << "\n";
}

}  // namespace mmcool::cli
