// End-to-end tests of the ordinal-crc binary: exit-code contract, file
// determinism, and the documented formats. The binary path comes from the
// build system via ORDINAL_CRC_CLI_PATH.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "ordinal_crc/io.hpp"
#include "ordinal_crc/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ordinal_crc_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RunResult run_cli(const TempDir& dir, const std::string& args, const std::string& env = "") {
  const fs::path out = dir.path / "stdout.txt";
  const fs::path err = dir.path / "stderr.txt";
  const std::string command = "cd '" + dir.path.string() + "' && " + (env.empty() ? "" : env + " ") + "'" +
                              ORDINAL_CRC_CLI_PATH + "' " + args + " > stdout.txt 2> stderr.txt";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate writes byte-identical files for identical flags") {
    TempDir dir;
    const auto first = run_cli(dir, "simulate --classes 6 --per-class 40 --seed 7 --out a.csv");
    REQUIRE(first.exit_code == 0);
    const auto second = run_cli(dir, "simulate --classes 6 --per-class 40 --seed 7 --out b.csv");
    REQUIRE(second.exit_code == 0);
    CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));

    const auto other_seed = run_cli(dir, "simulate --classes 6 --per-class 40 --seed 8 --out c.csv");
    REQUIRE(other_seed.exit_code == 0);
    CHECK(slurp(dir.path / "a.csv") != slurp(dir.path / "c.csv"));

    const auto rows = ordinal_crc::io::read_scores_csv(dir.path / "a.csv");
    CHECK(rows.size() == 240);
    CHECK(ordinal_crc::validate_dataset(rows) == 6);
  }

  TEST_CASE("config errors exit with code 1") {
    TempDir dir;
    CHECK(run_cli(dir, "simulate --classes 1 --per-class 5 --seed 1 --out x.csv").exit_code == 1);
    CHECK(run_cli(dir, "simulate --no-such-flag").exit_code == 1);
    CHECK(run_cli(dir, "").exit_code == 1);
    CHECK(run_cli(dir, "calibrate --scores missing.csv --alpha 2.0").exit_code == 1);
  }

  TEST_CASE("missing or malformed input files exit with code 3") {
    TempDir dir;
    CHECK(run_cli(dir, "calibrate --scores missing.csv --alpha 0.1").exit_code == 3);
    ordinal_crc::io::atomic_write(dir.path / "bad.csv", "label,p0,p1\n0,0.5,oops\n");
    CHECK(run_cli(dir, "calibrate --scores bad.csv --alpha 0.1").exit_code == 3);
  }

  TEST_CASE("calibrate emits a feasible lambda_hat and the jump diagnostics") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --classes 8 --per-class 30 --seed 3 --out sim.csv").exit_code == 0);
    const auto exact =
        run_cli(dir, "calibrate --scores sim.csv --alpha 0.1 --loss weighted --weights equal "
                     "--method exact --out cal.json");
    REQUIRE(exact.exit_code == 0);
    const json j = json::parse(slurp(dir.path / "cal.json"));
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("k") == 8);
    CHECK(j.at("n") == 240);
    const double lambda_hat = j.at("lambda_hat").get<double>();
    CHECK((lambda_hat >= 0.0 && lambda_hat <= 1.0));
    CHECK(j.at("empirical_sum").get<double>() <= 241.0 * 0.1 - 1.0);
    CHECK(j.at("max_collision_m").get<int>() >= 1);

    const auto binary =
        run_cli(dir, "calibrate --scores sim.csv --alpha 0.1 --loss weighted --weights equal "
                     "--method binary --delta 1e-4 --out cal_binary.json");
    REQUIRE(binary.exit_code == 0);
    const json jb = json::parse(slurp(dir.path / "cal_binary.json"));
    CHECK(std::abs(jb.at("lambda_hat").get<double>() - lambda_hat) <= 1e-4 + 1e-12);
    CHECK(jb.at("delta").get<double>() == 1e-4);
  }

  TEST_CASE("alpha below B/(n+1) exits with code 2") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --classes 5 --per-class 20 --seed 2 --out sim.csv").exit_code == 0);
    const auto result = run_cli(dir, "calibrate --scores sim.csv --alpha 0.0001");
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("infeasible: alpha below B/(n+1)") != std::string::npos);
  }

  TEST_CASE("predict at lambda = 1 returns singletons at the point prediction") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --classes 6 --per-class 25 --seed 11 --out sim.csv").exit_code == 0);
    REQUIRE(run_cli(dir, "predict --scores sim.csv --lambda 1 --loss weighted --out pred.csv").exit_code == 0);
    const std::string text = slurp(dir.path / "pred.csv");
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "lower,upper,width,centroid,point_prediction");
    size_t count = 0;
    while (std::getline(lines, line)) {
      int lower, upper, width, yhat;
      double centroid;
      REQUIRE(std::sscanf(line.c_str(), "%d,%d,%d,%lf,%d", &lower, &upper, &width, &centroid, &yhat) == 5);
      CHECK(width == 1);
      CHECK(lower == yhat);
      CHECK(upper == yhat);
      ++count;
    }
    CHECK(count == 150);
  }

  TEST_CASE("predict accepts a calibration file and rejects a K mismatch") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --classes 6 --per-class 25 --seed 11 --out sim6.csv").exit_code == 0);
    REQUIRE(run_cli(dir, "simulate --classes 5 --per-class 25 --seed 11 --out sim5.csv").exit_code == 0);
    REQUIRE(run_cli(dir, "calibrate --scores sim6.csv --alpha 0.2 --loss divergence --out cal.json")
                .exit_code == 0);
    CHECK(run_cli(dir, "predict --scores sim6.csv --calibration cal.json --out ok.csv").exit_code == 0);
    CHECK(run_cli(dir, "predict --scores sim5.csv --calibration cal.json --out bad.csv").exit_code == 1);
    CHECK(run_cli(dir, "predict --scores sim6.csv --lambda 1.5 --out bad2.csv").exit_code == 1);
  }

  TEST_CASE("evaluate writes the report trio and flags saturation on divergence sweeps") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --classes 6 --per-class 60 --seed 13 --out sim.csv").exit_code == 0);
    const auto result = run_cli(
        dir, "evaluate --scores sim.csv --alphas 0.02,0.3,0.5 --loss divergence --trials 6 --seed 3 "
             "--out-report rep.json --out-summary sum.csv --out-centroids cen.csv");
    REQUIRE(result.exit_code == 0);

    const json report = json::parse(slurp(dir.path / "rep.json"));
    CHECK(report.at("schema_version") == 1);
    REQUIRE(report.at("reports").size() == 3);
    CHECK(!report.at("saturation_alpha").is_null());

    const std::string summary = slurp(dir.path / "sum.csv");
    CHECK(summary.rfind("alpha,mean_risk,mean_set_size\n", 0) == 0);
    CHECK(slurp(dir.path / "cen.csv").rfind("alpha,centroid,count\n", 0) == 0);

    // a split that empties the test half is a config error
    CHECK(run_cli(dir, "evaluate --scores sim.csv --alpha 0.1 --trials 2 --split 0.9999").exit_code == 1);
  }

  TEST_CASE("threads flag and env fallback do not change results") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --classes 5 --per-class 40 --seed 17 --out sim.csv").exit_code == 0);
    REQUIRE(run_cli(dir, "evaluate --scores sim.csv --alpha 0.1 --trials 4 --seed 9 --threads 2 "
                         "--out-report a.json --out-summary a.csv --out-centroids ac.csv")
                .exit_code == 0);
    REQUIRE(run_cli(dir,
                    "evaluate --scores sim.csv --alpha 0.1 --trials 4 --seed 9 "
                    "--out-report b.json --out-summary b.csv --out-centroids bc.csv",
                    "ORDINAL_CRC_THREADS=3")
                .exit_code == 0);
    CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
    CHECK(slurp(dir.path / "ac.csv") == slurp(dir.path / "bc.csv"));
  }
}
