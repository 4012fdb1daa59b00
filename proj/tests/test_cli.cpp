#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tegsim/cli.hpp"

using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tegsim::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::path(TEGSIM_BINARY_DIR) / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Keeps a stray TEGSIM_CONFIG in the caller's shell from leaking in.
struct CleanEnv {
  CleanEnv() { unsetenv(tegsim::kConfigEnvVar); }
  ~CleanEnv() { unsetenv(tegsim::kConfigEnvVar); }
};

const std::vector<std::vector<std::string>> kCommands = {
    {"materials", "zt"},     {"leg", "resistance"}, {"leg", "sweep-width"}, {"leg", "sweep-height"},
    {"leg", "sweep-mask"},   {"network", "solve"},  {"gen", "simulate"},    {"gen", "sweep"},
    {"gen", "optimize"},     {"scenario", "chuck"},
};

}  // namespace

TEST_CASE("every subcommand runs and writes one file", "[cli]") {
  CleanEnv env;
  const auto dir = scratch("all");
  for (const auto& cmd : kCommands) {
    std::vector<std::string> args = cmd;
    args.insert(args.end(), {"--out", dir.string(), "--no-timestamp"});
    const auto r = run(args);
    INFO(cmd[0] << " " << cmd[1] << ": " << r.err);
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("wrote "));
  }
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 10);
  const std::string csv = slurp(dir / "gen_simulate.csv");
  CHECK(csv.rfind("# tegsim gen simulate\n# config_hash: ", 0) == 0);
  CHECK_THAT(csv, ContainsSubstring("\n# config: {"));
  CHECK_THAT(csv, ContainsSubstring("\nquantity,value,unit\n"));
  CHECK(csv.find("# generated:") == std::string::npos);
}

TEST_CASE("outputs are deterministic without the timestamp", "[cli]") {
  CleanEnv env;
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& cmd : {std::vector<std::string>{"gen", "sweep"}, std::vector<std::string>{"leg", "sweep-width"}}) {
    for (const auto& dir : {a, b}) {
      std::vector<std::string> args = cmd;
      args.insert(args.end(), {"--out", dir.string(), "--no-timestamp", "--set", "solver.parallelism=3"});
      REQUIRE(run(args).code == 0);
    }
  }
  for (const char* f : {"gen_sweep.csv", "leg_sweep_width.csv"}) CHECK(slurp(a / f) == slurp(b / f));

  const auto c = scratch("det_c");
  REQUIRE(run({"leg", "sweep-width", "--out", c.string()}).code == 0);
  CHECK_THAT(slurp(c / "leg_sweep_width.csv"), ContainsSubstring("# generated: "));
}

TEST_CASE("exit codes", "[cli]") {
  CleanEnv env;
  const auto dir = scratch("codes").string();
  CHECK(run({}).code == tegsim::cli::kUsage);
  CHECK(run({"leg"}).code == tegsim::cli::kUsage);
  CHECK(run({"leg", "resistance", "--format", "xml"}).code == tegsim::cli::kUsage);
  CHECK(run({"leg", "resistance", "--resolution", "-1"}).code == tegsim::cli::kUsage);
  CHECK(run({"--help"}).code == tegsim::cli::kOk);

  CHECK(run({"leg", "resistance", "--config", "/nonexistent.json"}).code == tegsim::cli::kConfig);
  CHECK(run({"leg", "resistance", "--set", "cell.bogus=1"}).code == tegsim::cli::kConfig);

  const auto bad = run({"leg", "resistance", "--out", dir, "--set", "geometry.middle_width_b_um=12"});
  CHECK(bad.code == tegsim::cli::kValidation);
  CHECK_THAT(bad.err, ContainsSubstring("end_width_a >= middle_width_b"));

  const auto big = run({"leg", "resistance", "--out", dir, "--set", "solver.backend=numeric", "--resolution", "100"});
  CHECK(big.code == tegsim::cli::kResource);
  CHECK_THAT(big.err, ContainsSubstring("suggested: --resolution "));

  const auto stuck = run({"leg", "resistance", "--out", dir, "--set", "solver.backend=numeric", "--set",
                          "solver.max_iterations=2"});
  CHECK(stuck.code == tegsim::cli::kSolver);
  CHECK_THAT(stuck.err, ContainsSubstring("residual history"));
}

TEST_CASE("plot format", "[cli]") {
  CleanEnv env;
  const auto dir = scratch("plot");
  REQUIRE(run({"leg", "sweep-width", "--out", dir.string(), "--format", "plot"}).code == 0);
  const std::string dat = slurp(dir / "leg_sweep_width.dat");
  std::istringstream in(dat);
  int lines = 0;
  for (std::string l; std::getline(in, l); ++lines) {
    double x = 0, y = 0;
    CHECK(std::sscanf(l.c_str(), "%lf %lf", &x, &y) == 2);
  }
  CHECK(lines == 8);
  CHECK(run({"gen", "simulate", "--out", dir.string(), "--format", "plot"}).code == tegsim::cli::kConfig);
}

TEST_CASE("config show echoes the resolved document", "[cli]") {
  CleanEnv env;
  const auto r = run({"config", "show"});
  REQUIRE(r.code == 0);
  CHECK(r.out == tegsim::dump_config(tegsim::load_config_text("{}")));
  const auto o = run({"config", "show", "--set", "layout.n_couples=1000", "--no-timestamp"});
  CHECK(tegsim::load_config_text(o.out).design.n_couples == 1000);
  CHECK(tegsim::load_config_text(o.out).output.timestamp == false);
}

TEST_CASE("environment variable supplies the user config", "[cli]") {
  CleanEnv env;
  const auto dir = scratch("env");
  const auto user = dir / "user.json";
  std::ofstream(user) << "{\"layout\": {\"n_couples\": 1234}}\n";
  setenv(tegsim::kConfigEnvVar, user.string().c_str(), 1);
  CHECK(tegsim::load_config_text(run({"config", "show"}).out).design.n_couples == 1234);
  // --config wins over the variable
  const auto other = dir / "other.json";
  std::ofstream(other) << "{\"layout\": {\"n_couples\": 999}}\n";
  CHECK(tegsim::load_config_text(run({"config", "show", "--config", other.string()}).out).design.n_couples == 999);
  // --set wins over both
  CHECK(tegsim::load_config_text(run({"config", "show", "--set", "layout.n_couples=5"}).out).design.n_couples == 5);
}

TEST_CASE("materials report flags the p-type discrepancy", "[cli]") {
  CleanEnv env;
  const auto r = run({"materials", "zt", "--out", scratch("zt").string()});
  REQUIRE(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("DISCREPANCY"));
}
