#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "csv_read.hpp"

// End-to-end checks against the installed binary, driven through a shell the
// way a user would run it. DCQDEST_BIN is injected by the build.

namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("tmp_cli") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string write_config(const std::string& dir, const std::string& text) {
  const std::string path = dir + "/config.cfg";
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

int run_tool(const std::string& args) {
  const std::string cmd =
      std::string(DCQDEST_BIN) + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("repeated runs with one config and seed are byte-identical") {
  const std::string base = fresh_dir("determinism");
  const std::string cfg = write_config(
      base,
      "[experiment]\nkind = exchange-iso\nmode = sampled\n"
      "n_shots = 30000\nseed = 9\n"
      "[hamiltonian]\njx = 0.8\njy = 0.8\njz = 0.8\nt = 0.4\nj_max = 1.2\n");
  REQUIRE(run_tool("exchange-iso --config " + cfg + " --out " + base + "/a") == 0);
  REQUIRE(run_tool("exchange-iso --config " + cfg + " --out " + base + "/b") == 0);
  for (const char* name : {"records.csv", "estimates.csv", "config_echo.txt"})
    CHECK(read_file(base + "/a/" + name) == read_file(base + "/b/" + name));
}

TEST_CASE("seed flag overrides the config and changes sampled data") {
  const std::string base = fresh_dir("seed_flag");
  const std::string cfg = write_config(
      base,
      "[experiment]\nkind = relaxation\nmode = sampled\nn_shots = 20000\n"
      "seed = 1\n[relaxation]\nt1 = 1.5\nt2 = 1.0\nt = 0.4\n");
  REQUIRE(run_tool("relaxation --config " + cfg + " --out " + base + "/a") == 0);
  REQUIRE(run_tool("relaxation --config " + cfg + " --seed 2 --out " + base +
                   "/b") == 0);
  CHECK(read_file(base + "/a/records.csv") != read_file(base + "/b/records.csv"));
  CHECK(read_file(base + "/b/config_echo.txt").find("# resolved_seed = 2") !=
        std::string::npos);
}

TEST_CASE("exit codes: validation failure and estimator degeneracy") {
  const std::string base = fresh_dir("exit_codes");
  const std::string bad = write_config(
      base, "[experiment]\nkind = relaxation\n"
            "[relaxation]\nt1 = 1\nt2 = 2.5\nt = 0.5\n");
  CHECK(run_tool("validate --config " + bad + " --out " + base + "/v") == 2);
  const CsvTable errs = read_csv(base + "/v/errors.csv");
  CHECK(errs.rows[0].at("category") == "CONFIG");

  const std::string deg = write_config(
      base + "/v", "[experiment]\nkind = exchange-aniso\nmode = exact\n"
                   "[hamiltonian]\njx = 1\njy = 1\njz = 0.7\n"
                   "t = 0.7853981633974483\n");
  CHECK(run_tool("exchange-aniso --config " + deg + " --out " + base + "/d") ==
        3);

  CHECK(run_tool("single-qubit --config " + base + "/missing.cfg --out " +
                 base + "/m") == 2);
  CHECK(run_tool("single-qubit") != 0);  // --config is required
}

TEST_CASE("estimates file carries the documented example value") {
  const std::string base = fresh_dir("example");
  const std::string cfg = write_config(
      base, "[experiment]\nkind = exchange-iso\nmode = exact\n"
            "[hamiltonian]\njx = 1\njy = 1\njz = 1\n"
            "t = 0.39269908169872414\n");
  REQUIRE(run_tool("exchange-iso --config " + cfg + " --out " + base) == 0);
  const CsvTable est = read_csv(base + "/estimates.csv");
  const double v =
      std::stod(est.find({{"parameter", "sin_2jt"}}).at("estimate"));
  CHECK(std::abs(v - 0.7071068) < 1e-7);
}
