// End-to-end checks of the command-line contract: exit codes, JSON report
// schema and round-trip, CSV sweep shape, overrides, and determinism across
// worker-pool sizes. Each test drives the installed binary as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(SIGGAME_TOOL_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "siggame_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const json& doc) {
  auto path = scratch_dir() / name;
  std::ofstream out(path);
  out << doc.dump(2);
  return path;
}

}  // namespace

TEST_CASE("signaling run emits the documented schema and round-trips") {
  auto config = write_config(
      "signaling.json",
      json{{"parameters", {{"source_power", 1.0},
                           {"noise_power", 1.0},
                           {"lambda", 0.25},
                           {"bias", 0.1}}}});
  auto result = run("signaling --config " + config.string());
  REQUIRE(result.exit_code == 0);

  json report = json::parse(result.out);
  CHECK(report.at("tool_version").is_string());
  CHECK(report.at("scenario").at("game") == "signaling");
  const json& res = report.at("result");
  CHECK(res.at("class") == "informative-affine");
  CHECK(res.at("policy").at("A").get<double>() == doctest::Approx(1.0));
  CHECK(res.at("policy").at("K").get<double>() == doctest::Approx(0.5));
  CHECK(res.at("policy").at("C").get<double>() == doctest::Approx(-0.2));
  CHECK(res.at("policy").at("L").get<double>() == doctest::Approx(0.1));
  CHECK(res.at("game_costs").contains("g_i"));
  CHECK(res.at("game_costs").contains("g_u"));
  CHECK(res.at("costs").at("J_total").get<double>() ==
        doctest::Approx(res.at("costs").at("J_e").get<double>() +
                        res.at("costs").at("J_d").get<double>()));

  // Round-trip: the embedded scenario re-runs to the identical result.
  auto second = write_config("signaling_rt.json", report.at("scenario"));
  auto rerun = run("signaling --config " + second.string());
  REQUIRE(rerun.exit_code == 0);
  CHECK(json::parse(rerun.out).at("result") == res);
}

TEST_CASE("infeasible cheap talk exits with code 2") {
  auto config = write_config(
      "ct_infeasible.json",
      json{{"parameters",
            {{"source", {{"kind", "uniform"}, {"lo", 0.0}, {"hi", 1.0}}},
             {"bias", 0.3},
             {"bins", 2}}}});
  auto result = run("cheap-talk --config " + config.string());
  CHECK(result.exit_code == 2);
  CHECK(json::parse(result.out).at("result").at("status") == "infeasible");
}

TEST_CASE("solvable cheap talk reports the quantizer") {
  auto config = write_config(
      "ct_ok.json",
      json{{"parameters",
            {{"source", {{"kind", "uniform"}, {"lo", 0.0}, {"hi", 1.0}}},
             {"bias", 0.05},
             {"bins", 2}}}});
  auto result = run("cheap-talk --config " + config.string());
  REQUIRE(result.exit_code == 0);
  json res = json::parse(result.out).at("result");
  CHECK(res.at("status") == "solved");
  CHECK(res.at("policy").at("boundaries")[0].get<double>() ==
        doctest::Approx(0.6).epsilon(1e-8));
  CHECK(res.at("diagnostics").at("verified") == true);
}

TEST_CASE("malformed config and unknown keys exit with code 1") {
  auto bad = scratch_dir() / "broken.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run("signaling --config " + bad.string()).exit_code == 1);

  auto config = write_config(
      "sig_base.json",
      json{{"parameters", {{"source_power", 1.0},
                           {"noise_power", 1.0},
                           {"lambda", 0.25},
                           {"bias", 0.1}}}});
  auto unknown =
      run("signaling --config " + config.string() + " --set parameters.nope=3");
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.out.find("unknown key") != std::string::npos);

  auto wrong_game = run("team --config " + config.string());
  CHECK(wrong_game.exit_code == 0);  // same parameter shape parses for team

  auto mismatched = write_config(
      "mismatch.json",
      json{{"game", "poa"},
           {"parameters", {{"source_power", 1.0},
                           {"noise_power", 1.0},
                           {"lambda", 0.25},
                           {"bias", 0.1}}}});
  CHECK(run("signaling --config " + mismatched.string()).exit_code == 1);
}

TEST_CASE("overrides change the resolved scenario") {
  auto config = write_config(
      "sig_override.json",
      json{{"parameters", {{"source_power", 1.0},
                           {"noise_power", 1.0},
                           {"lambda", 0.25},
                           {"bias", 0.1}}}});
  auto result = run("signaling --config " + config.string() +
                    " --set parameters.lambda=2.0");
  REQUIRE(result.exit_code == 0);
  json report = json::parse(result.out);
  CHECK(report.at("scenario").at("parameters").at("lambda") == 2.0);
  CHECK(report.at("result").at("class") == "non-informative");
}

TEST_CASE("csv sweeps are ordered, newline-clean and pool-size invariant") {
  auto config = write_config(
      "poa_sweep.json",
      json{{"parameters", {{"source_power", 1.0},
                           {"noise_power", 1.0},
                           {"lambda", 0.25},
                           {"bias", 0.1}}},
           {"sweep", {{"key", "lambda"},
                      {"values", {0.45, 0.05, 0.25, 0.25, 0.15}}}}});
  auto serial = run("poa --config " + config.string() + " --format csv");
  REQUIRE(serial.exit_code == 0);
  auto pooled = run("poa --config " + config.string() +
                    " --format csv --jobs 3");
  CHECK(serial.out == pooled.out);
  CHECK(serial.out.find('\r') == std::string::npos);

  std::istringstream lines(serial.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("lambda,", 0) == 0);
  CHECK(line.find("g_i") != std::string::npos);
  CHECK(line.find("poa") != std::string::npos);

  // Sorted by the sweep variable with the duplicate removed.
  std::vector<double> seen;
  while (std::getline(lines, line)) {
    seen.push_back(std::stod(line.substr(0, line.find(','))));
  }
  REQUIRE(seen.size() == 4);
  CHECK(std::is_sorted(seen.begin(), seen.end()));
}

TEST_CASE("json sweep embeds per-point results in order") {
  auto config = write_config(
      "sig_sweep.json",
      json{{"parameters", {{"source_power", 1.0},
                           {"noise_power", 1.0},
                           {"lambda", 0.25},
                           {"bias", 0.1}}},
           {"sweep", {{"key", "lambda"},
                      {"from", 0.2}, {"to", 0.4}, {"step", 0.1}}}});
  auto result = run("signaling --config " + config.string());
  REQUIRE(result.exit_code == 0);
  json report = json::parse(result.out);
  REQUIRE(report.at("results").size() == 3);
  CHECK(report.at("results")[0].at("lambda").get<double>() ==
        doctest::Approx(0.2));
  CHECK(report.at("results")[2].at("lambda").get<double>() ==
        doctest::Approx(0.4));
}

TEST_CASE("reference-4d recovers both classes without a config file") {
  auto result = run("reference-4d --seed 11");
  REQUIRE(result.exit_code == 0);
  json res = json::parse(result.out).at("result");
  CHECK(res.at("nonzero_classes").get<int>() >= 2);
  CHECK(res.at("reference_recovered").get<int>() == 2);
  for (const auto& point : res.at("reference_points")) {
    CHECK(point.at("residual_printed").get<double>() < 5e-3);
    CHECK(point.at("residual_refined").get<double>() < 1e-10);
  }
}

TEST_CASE("reports can be written to a file") {
  auto config = write_config(
      "sig_out.json",
      json{{"parameters", {{"source_power", 1.0},
                           {"noise_power", 1.0},
                           {"lambda", 0.25},
                           {"bias", 0.1}}}});
  auto out_path = scratch_dir() / "report.json";
  auto result = run("signaling --config " + config.string() + " --out " +
                    out_path.string());
  REQUIRE(result.exit_code == 0);
  std::ifstream in(out_path);
  REQUIRE(in.good());
  json report;
  in >> report;
  CHECK(report.at("result").at("class") == "informative-affine");
}

TEST_CASE("simulate honors the seed flag deterministically") {
  auto config = write_config(
      "sim.json",
      json{{"parameters",
            {{"spec", {{"source_power", 1.0},
                       {"noise_power", 1.0},
                       {"lambda", 0.25},
                       {"bias", 0.1}}},
             {"policy", "nash"},
             {"n_samples", 50000}}}});
  auto a = run("simulate --config " + config.string() + " --seed 42");
  auto b = run("simulate --config " + config.string() + " --seed 42");
  auto c = run("simulate --config " + config.string() + " --seed 43");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
}
