#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mmcool/cli.hpp"
#include "mmcool/output.hpp"

namespace fs = std::filesystem;
using namespace mmcool::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mmcool");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(MMCOOL_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> csv_column(const std::string& text, std::size_t col) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i) std::getline(ls, cell, ',');
    out.push_back(cell);
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2 with help") {
  const auto r = invoke({"bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--seed", "abc", "dump-config"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("runtime errors exit 1 with one line") {
  const auto dir = fresh_dir("bad_param");
  const auto r = invoke({"--out", dir, "--set", "delay_tau=-1", "dump-config"});
  CHECK(r.code == 1);
  CHECK(r.err == "error: dump-config: delay_tau must be positive\n");
  const auto bad_set = invoke({"--out", dir, "--set", "novalue", "dump-config"});
  CHECK(bad_set.code == 1);
  CHECK(std::count(bad_set.err.begin(), bad_set.err.end(), '\n') == 1);
}

TEST_CASE("dump-config writes the resolved baseline") {
  const auto dir = fresh_dir("dump");
  const auto r = invoke({"--out", dir, "dump-config"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(fs::path(dir) / "resolved_config.json"));
  CHECK(j["physical"]["pump_rate_times_2pi"].get<double>() == doctest::Approx(62.5));
  CHECK(j["physical"]["detuning"].get<double>() == -10.0);
  const auto m = nlohmann::json::parse(slurp(fs::path(dir) / "dump-config_manifest.json"));
  CHECK(m["files"] == nlohmann::json::array({"resolved_config.json"}));
  CHECK(m["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("unused keys are reported") {
  const auto dir = fresh_dir("unused");
  const auto r = invoke({"--out", dir, "--set", "detunng=-5", "dump-config"});
  CHECK(r.code == 0);
  CHECK(r.err.find("'detunng'") != std::string::npos);
}

TEST_CASE("config files and overrides combine") {
  const auto dir = fresh_dir("cfgfile");
  const auto cfg = (fs::path(dir) / "run.cfg").string();
  std::ofstream(cfg) << "# test\ndetuning = -20\ndelay_tau = 0.5\n";
  const auto r = invoke({"--out", dir, "--config", cfg, "--set", "delay_tau=0.75", "dump-config"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(fs::path(dir) / "resolved_config.json"));
  CHECK(j["physical"]["detuning"].get<double>() == -20.0);
  CHECK(j["physical"]["delay_tau"].get<double>() == 0.75);
  CHECK(invoke({"--out", dir, "--config", "/no/such/file", "dump-config"}).code == 1);
}

TEST_CASE("analytic scan reproduces the cooling sign pattern") {
  const auto dir = fresh_dir("analytic");
  REQUIRE(invoke({"--out", dir, "--set", "scan_points=64", "analytic-scan"}).code == 0);
  const auto text = slurp(fs::path(dir) / "analytic_position_scan.csv");
  const auto xs = csv_column(text, 0);
  const auto cool = csv_column(text, 7);
  REQUIRE(xs.size() == 64);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double s = std::sin(4.0 * 2.0 * M_PI * std::stod(xs[i]));
    if (std::fabs(s) > 1e-9) CHECK((std::stod(cool[i]) == 1.0) == (s > 0.0));
  }
  const auto m = nlohmann::json::parse(slurp(fs::path(dir) / "analytic-scan_manifest.json"));
  CHECK(m["files"].size() == 3);
}

TEST_CASE("every output file is listed by exactly one manifest") {
  const auto dir = fresh_dir("manifests");
  REQUIRE(invoke({"--out", dir, "analytic-scan"}).code == 0);
  REQUIRE(invoke({"--out", dir, "crossover"}).code == 0);
  REQUIRE(invoke({"--out", dir, "--set", "t_end=1", "trajectory"}).code == 0);
  std::map<std::string, int> listed;
  std::set<std::string> present;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() > 14 && name.substr(name.size() - 14) == "_manifest.json") {
      const auto manifest = nlohmann::json::parse(slurp(e.path()));
      for (const auto& f : manifest["files"]) {
        ++listed[f.get<std::string>()];
      }
    } else {
      present.insert(name);
    }
  }
  for (const auto& f : present) CHECK_MESSAGE(listed[f] == 1, f);
  CHECK(listed.size() == present.size());
}

TEST_CASE("same seed gives identical CSV bytes") {
  const std::vector<std::string> common = {"--seed", "7", "--workers", "3", "--set", "n_traj=3",
                                           "--set",  "p0_values=40,60", "--set", "t_end=5",
                                           "--set", "window_end=5"};
  auto run_into = [&](const std::string& name) {
    const auto dir = fresh_dir(name);
    auto args = common;
    args.insert(args.end(), {"--out", dir, "friction-curve"});
    REQUIRE(invoke(args).code == 0);
    return slurp(fs::path(dir) / "friction_curve.csv");
  };
  CHECK(run_into("det_a") == run_into("det_b"));

  auto traj = [&](const std::string& name, const std::string& seed) {
    const auto dir = fresh_dir(name);
    REQUIRE(invoke({"--out", dir, "--seed", seed, "--set", "noise=true", "--set", "t_end=1",
                    "--set", "init_p=20", "trajectory"})
                .code == 0);
    return slurp(fs::path(dir) / "trajectory.csv");
  };
  const auto a = traj("traj_a", "5");
  CHECK(a == traj("traj_b", "5"));
  CHECK(a != traj("traj_c", "6"));
}

TEST_CASE("csv rendering") {
  CsvTable t;
  t.columns = {"a[1]", "b[2]"};
  t.add_row({0.1, 2.0});
  CHECK(t.render() == "a[1],b[2]\n0.10000000000000001,2\n");
  CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(join_path("a", "b") == "a/b");
}

}
