#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csv_read.hpp"
#include "dcqd/config.hpp"
#include "dcqd/runner.hpp"

using namespace dcqd;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("tmp_runner") / name;
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

struct RunOutcome {
  int exit_code = 0;
  std::string stdout_text;
  std::string stderr_text;
};

RunOutcome run(const std::string& subcommand, const std::string& config_text,
               const std::string& dir,
               std::optional<std::uint64_t> seed = std::nullopt) {
  std::ostringstream out, err;
  RunOutcome rc;
  rc.exit_code =
      run_subcommand(subcommand, write_config(dir, config_text), seed, dir, out, err);
  rc.stdout_text = out.str();
  rc.stderr_text = err.str();
  return rc;
}

double num(const std::map<std::string, std::string>& row,
           const std::string& col) {
  return std::stod(row.at(col));
}

const char* kSingleQubitZ = R"(
[experiment]
kind = single-qubit
mode = exact
seed = 7

[hamiltonian]
jx = 0
jy = 0
jz = 1.0
t = 0.7853981633974483
)";

}  // namespace

TEST_CASE("config text: sections, comments, types, line-level failures") {
  const ConfigMap cm = ConfigMap::parse(
      "# leading comment\n[experiment]\nkind = scaling ; trailing\n\n"
      "[scaling]\nn_samples_grid = 16, 64\nrepeats = 3\nn_shots_grid = 1e3,1e5\n",
      "inline");
  CHECK(cm.get_string("experiment", "kind") == "scaling");
  CHECK(cm.get_int("scaling", "repeats") == 3);
  const auto grid = cm.get_int_list("scaling", "n_samples_grid");
  REQUIRE(grid.size() == 2);
  CHECK(grid[0] == 16);
  CHECK(grid[1] == 64);
  const auto shots = cm.get_int_list("scaling", "n_shots_grid");
  CHECK(shots[0] == 1000);
  CHECK(shots[1] == 100000);

  const auto expect_config_error = [](const std::string& text,
                                      const std::string& fragment) {
    try {
      const ConfigMap bad = ConfigMap::parse(text, "inline");
      bad.get_double("a", "x");
      FAIL("expected a config error for: " << text);
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::config);
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect_config_error("[a\nx = 1\n", "inline:1");
  expect_config_error("x = 1\n", "before any [section]");
  expect_config_error("[a]\nx = 1\nx = 2\n", "duplicate key");
  expect_config_error("[a]\nx + 1\n", "expected 'key = value'");
  expect_config_error("[a]\nx = banana\n", "not a number");
  expect_config_error("[a]\nx =\n", "has no value");
}

TEST_CASE("config: unknown keys are rejected and the echo is canonical") {
  const ConfigMap cm = ConfigMap::parse(
      std::string(kSingleQubitZ) + "extra_key = 1\n", "inline");
  try {
    ExperimentConfig::from(cm, std::nullopt);
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("unknown key 'extra_key'") !=
          std::string::npos);
  }

  // Key order inside a section does not change the canonical form or hash.
  const ConfigMap a = ConfigMap::parse("[s]\nx = 1\ny = 2\n", "inline");
  const ConfigMap b = ConfigMap::parse("[s]\ny = 2\nx = 1\n", "inline");
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != ConfigMap::parse("[s]\nx = 1\ny = 3\n", "inline").hash());
}

TEST_CASE("config: experiment-level validation failures") {
  const auto expect_reject = [](const std::string& text,
                                const std::string& fragment) {
    try {
      ExperimentConfig::from(ConfigMap::parse(text, "inline"), std::nullopt);
      FAIL("expected rejection: " << fragment);
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::config);
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };

  expect_reject(
      "[experiment]\nkind = relaxation\n[relaxation]\nt1 = 1\nt2 = 2.5\nt = 0.5\n",
      "T2 <= 2*T1");
  expect_reject(
      "[experiment]\nkind = exchange-iso\n[hamiltonian]\njx = 1\njy = 1\njz = 2\nt = 0.3\n",
      "exchange-iso requires jx = jy = jz");
  expect_reject(
      "[experiment]\nkind = exchange-aniso\n[hamiltonian]\njx = 1\njy = 2\njz = 3\nt = 0.3\n",
      "requires jx = jy");
  expect_reject(
      "[experiment]\nkind = single-qubit\n[hamiltonian]\njx = 0\njy = 0\njz = 2\nt = 0.3\nj_max = 1\n",
      "below the configured coupling magnitude");
  expect_reject(
      "[experiment]\nkind = single-qubit\nmode = sampled\n[hamiltonian]\njx = 1\njy = 0\njz = 0\nt = 0.3\n",
      "n_shots");
  expect_reject("[experiment]\nkind = banana\n", "unknown experiment kind");
  expect_reject(std::string(kSingleQubitZ) + "mode_extra = 1\n", "unknown key");

  // Seed override wins over the configured seed.
  const auto cfg = ExperimentConfig::from(
      ConfigMap::parse(kSingleQubitZ, "inline"), 123);
  CHECK(cfg.seed == 123);
}

TEST_CASE("single-qubit run recovers the z coupling exactly") {
  const std::string dir = fresh_dir("sq");
  const auto rc = run("single-qubit", kSingleQubitZ, dir);
  REQUIRE(rc.exit_code == 0);

  const CsvTable est = read_csv(dir + "/estimates.csv");
  CHECK(std::abs(num(est.find({{"parameter", "abs_jz"}}), "estimate") - 1.0) <
        1e-9);
  CHECK(std::abs(num(est.find({{"parameter", "jz"}}), "estimate") - 1.0) < 1e-9);
  CHECK(std::abs(num(est.find({{"parameter", "jx"}}), "estimate")) < 1e-9);
  CHECK(est.find({{"parameter", "jz"}}).at("mode") == "exact");

  const CsvTable rec = read_csv(dir + "/records.csv");
  CHECK(rec.rows.size() == 16);  // four probe configurations, four outcomes
  const auto& phi_plus = rec.find({{"outcome_label", "BellZ:Phi+"}});
  CHECK(std::abs(num(phi_plus, "probability") - 0.5) < 1e-12);
  CHECK(phi_plus.at("seed") == "7");

  CHECK(read_file(dir + "/config_echo.txt").find("# resolved_seed = 7") !=
        std::string::npos);
}

TEST_CASE("relaxation run reproduces T1 = 2, T2 = 1 at t = 0.5") {
  const std::string dir = fresh_dir("rel");
  const auto rc = run("relaxation",
                      "[experiment]\nkind = relaxation\nmode = exact\n"
                      "[relaxation]\nt1 = 2.0\nt2 = 1.0\na_inf = 0.3\nt = 0.5\n",
                      dir);
  REQUIRE(rc.exit_code == 0);
  const CsvTable est = read_csv(dir + "/estimates.csv");
  CHECK(std::abs(num(est.find({{"parameter", "T1"}}), "estimate") - 2.0) < 1e-9);
  CHECK(std::abs(num(est.find({{"parameter", "T2"}}), "estimate") - 1.0) < 1e-9);
  CHECK(std::abs(num(est.find({{"parameter", "rate1"}}), "estimate") - 0.5) <
        1e-9);
}

TEST_CASE("exchange-iso run reports sin(2|J|t) and resolves the alias") {
  const std::string dir = fresh_dir("iso");
  const auto rc = run("exchange-iso",
                      "[experiment]\nkind = exchange-iso\nmode = exact\n"
                      "[hamiltonian]\njx = 1\njy = 1\njz = 1\n"
                      "t = 0.39269908169872414\nj_max = 1.5\n",
                      dir);
  REQUIRE(rc.exit_code == 0);
  const CsvTable est = read_csv(dir + "/estimates.csv");
  CHECK(std::abs(num(est.find({{"parameter", "sin_2jt"}}), "estimate") -
                 0.7071068) < 1e-7);
  CHECK(std::abs(num(est.find({{"parameter", "abs_j_resolved"}}), "estimate") -
                 1.0) < 1e-9);
  CHECK(est.find({{"parameter", "abs_j_principal"}}).at("notes").find(
            "alias candidates") != std::string::npos);
}

TEST_CASE("exchange-aniso sampled run lands within a few standard errors") {
  const std::string dir = fresh_dir("aniso");
  const auto rc = run("exchange-aniso",
                      "[experiment]\nkind = exchange-aniso\nmode = sampled\n"
                      "n_shots = 200000\nseed = 11\n"
                      "[hamiltonian]\njx = 0.4\njy = 0.4\njz = 1.1\nt = 0.35\n"
                      "j_max = 1.5\n",
                      dir);
  REQUIRE(rc.exit_code == 0);
  const CsvTable est = read_csv(dir + "/estimates.csv");
  const auto& jxy = est.find({{"parameter", "abs_jxy_resolved"}});
  CHECK(std::abs(num(jxy, "estimate") - 0.4) < 6.0 * num(jxy, "stderr"));
  const auto& jz = est.find({{"parameter", "abs_jz_resolved"}});
  CHECK(std::abs(num(jz, "estimate") - 1.1) < 6.0 * num(jz, "stderr"));
  CHECK(jz.at("N_E") == "200000");

  const CsvTable rec = read_csv(dir + "/records.csv");
  std::int64_t total = 0;
  for (const auto& row : rec.rows) total += std::stoll(row.at("count"));
  CHECK(total == 200000);
}

TEST_CASE("scaling run writes one row per grid cell and repeat") {
  const std::string dir = fresh_dir("scaling");
  const auto rc = run("scaling",
                      "[experiment]\nkind = scaling\nseed = 5\n"
                      "[schedule]\nj_max = 1.0\noversample = 4\n"
                      "[scaling]\nn_samples_grid = 16, 64\n"
                      "n_shots_grid = 1000, 100000\nrepeats = 3\n",
                      dir);
  REQUIRE(rc.exit_code == 0);
  const CsvTable items = read_csv(dir + "/scaling.csv");
  CHECK(items.rows.size() == 4 * 3);  // grid cells times repeats
  const CsvTable est = read_csv(dir + "/estimates.csv");
  CHECK(est.rows.size() == 4 * 3);  // three aggregates per cell
  for (const auto& row : items.rows)
    CHECK(num(row, "delta_f") > 0.0);
}

TEST_CASE("validate checks without running and names the broken invariant") {
  const std::string ok_dir = fresh_dir("validate_ok");
  const auto ok = run("validate", kSingleQubitZ, ok_dir);
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("config valid: experiment=single-qubit") !=
        std::string::npos);
  CHECK(!fs::exists(ok_dir + "/estimates.csv"));

  const std::string bad_dir = fresh_dir("validate_bad");
  const auto bad = run("validate",
                       "[experiment]\nkind = relaxation\n"
                       "[relaxation]\nt1 = 1\nt2 = 2.5\nt = 0.5\n",
                       bad_dir);
  CHECK(bad.exit_code == 2);
  CHECK(bad.stderr_text.find("T2 <= 2*T1") != std::string::npos);
  const CsvTable errs = read_csv(bad_dir + "/errors.csv");
  REQUIRE(errs.rows.size() == 1);
  CHECK(errs.rows[0].at("category") == "CONFIG");
  CHECK(errs.rows[0].at("experiment") == "relaxation");
}

TEST_CASE("subcommand and configured kind must agree") {
  const std::string dir = fresh_dir("mismatch");
  const auto rc = run("relaxation", kSingleQubitZ, dir);
  CHECK(rc.exit_code == 2);
  CHECK(rc.stderr_text.find("does not match configured experiment kind") !=
        std::string::npos);
}

TEST_CASE("estimator failures map to category exit codes") {
  // 2 |Jxy| t = pi/2 makes the z coupling unreadable.
  const std::string dir = fresh_dir("degenerate");
  const auto rc = run("exchange-aniso",
                      "[experiment]\nkind = exchange-aniso\nmode = exact\n"
                      "[hamiltonian]\njx = 1\njy = 1\njz = 0.7\n"
                      "t = 0.7853981633974483\n",
                      dir);
  CHECK(rc.exit_code == 3);
  const CsvTable errs = read_csv(dir + "/errors.csv");
  CHECK(errs.rows[0].at("category") == "DEGENERATE_TIME");
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  const std::string d1 = fresh_dir("det1");
  const std::string d2 = fresh_dir("det2");
  const std::string cfg =
      "[experiment]\nkind = single-qubit\nmode = sampled\n"
      "n_shots = 50000\nseed = 42\n"
      "[hamiltonian]\njx = 0.3\njy = -0.5\njz = 0.8\nt = 0.6\n";
  REQUIRE(run("single-qubit", cfg, d1).exit_code == 0);
  REQUIRE(run("single-qubit", cfg, d2).exit_code == 0);
  for (const char* name : {"records.csv", "estimates.csv", "config_echo.txt"})
    CHECK(read_file(d1 + "/" + name) == read_file(d2 + "/" + name));

  // A different seed must change the sampled records.
  const std::string d3 = fresh_dir("det3");
  REQUIRE(run("single-qubit", cfg, d3, 43).exit_code == 0);
  CHECK(read_file(d1 + "/records.csv") != read_file(d3 + "/records.csv"));
}
