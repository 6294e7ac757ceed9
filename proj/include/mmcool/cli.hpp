#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mmcool::cli {

struct ExperimentCommand {
  std::string name;  // one of command_names()
  std::vector<std::string> overrides;  // key=value
  std::string config_path;             // empty: defaults only
  std::string output_dir = ".";
  std::uint64_t master_seed = 1;
  std::size_t workers = 0;  // 0: MMCOOL_WORKERS or hardware concurrency
};

const std::vector<std::string>& command_names();

// Runs one experiment, writing its files and a manifest into output_dir and
// a short summary to out. Throws on failure.
void run(const ExperimentCommand& command, std::ostream& out, std::ostream& err);

// argv front end. Exit status: 0 success, 1 runtime error (one line on err),
// 2 usage error.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mmcool::cli
