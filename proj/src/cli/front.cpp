#include <CLI11.hpp>

#include <ostream>

#include "mmcool/cli.hpp"

namespace mmcool::cli {

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mirror-mediated cooling: analytic toolkit and stochastic simulator", "mmcool"};
  app.require_subcommand(1);

  ExperimentCommand cmd;
  app.add_option("--config", cmd.config_path, "key = value parameter file");
  app.add_option("--set", cmd.overrides, "override one key (key=value), repeatable")
      ->take_all();
  app.add_option("--seed", cmd.master_seed, "master seed");
  app.add_option("--workers", cmd.workers, "worker threads (default: MMCOOL_WORKERS or all cores)");
  app.add_option("--out", cmd.output_dir, "output directory");

  const char* help[] = {
      "print and save the fully resolved parameter set",
      "closed-form friction, temperatures and capture range versus position/detuning",
      "noiseless simulated d(p^2)/dt versus initial momentum",
      "simulated capture range versus trap frequency",
      "noisy ensembles and quadratic-fit steady-state temperature",
      "detuning where mirror and Doppler temperatures coincide",
      "single trajectory dump"};
  for (std::size_t i = 0; i < command_names().size(); ++i) {
    app.add_subcommand(command_names()[i], help[i])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  cmd.name = app.get_subcommands().front()->get_name();

  try {
    run(cmd, out, err);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "error: " << cmd.name << ": " << msg << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mmcool::cli
