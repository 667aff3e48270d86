#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include <json.hpp>

#include "gevrey/errors.hpp"
#include "gevrey/pipeline.hpp"

using namespace gevrey;
namespace fs = std::filesystem;

namespace {

const char* kTinyConfig = R"({
  "initial_condition": {"type": "beltrami_abc", "a": 1.0, "b": 1.0, "c": 1.0},
  "galerkin": {"truncation": 4, "dt": 0.001, "t_end": 10.0, "snapshot_stride": 10},
  "extraction": {"depth": 2, "sigma": 0.25},
  "evaluation": {"pairs": [{"alpha": 0.0, "sigma": 0.25}]},
  "probe": {"truncation": 4, "alpha": 0.5, "sigma": 0.2, "samples": 25, "seed": 99}
})";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(GEVREY_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config parsing fills defaults and validates") {
    const RunConfig cfg = parse_config_text(kTinyConfig);
    CHECK(cfg.initial.type == "beltrami_abc");
    CHECK(cfg.galerkin.truncation.max_eigenvalue == 4);
    CHECK(cfg.extraction_depth == 2);
    CHECK(cfg.pairs.size() == 1);
    CHECK(cfg.slope_margin == 0.4);                // default materialized
    CHECK(cfg.residual_tolerance == 1e-8);         // default materialized
    CHECK_FALSE(cfg.small_data.has_value());

    const std::string resolved = resolved_config_text(cfg);
    CHECK(resolved.find("slope_margin") != std::string::npos);
    CHECK(resolved.find("energy_tolerance") != std::string::npos);

    CHECK_THROWS_AS(parse_config_text("{"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{}"), ConfigError);  // initial_condition required
    CHECK_THROWS_AS(parse_config_text(R"({"initial_condition": {"type": "vortex"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"initial_condition": {"type": "beltrami_abc"}, "unknown": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"initial_condition": {"type": "beltrami_abc"},
                                          "extraction": {"depth": 0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"initial_condition": {"type": "single_mode", "k": [0,0,0]}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"initial_condition": {"type": "random_small", "amplitude": -1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"initial_condition": {"type": "single_mode", "k": [4,0,0]},
                                          "galerkin": {"truncation": 6}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"initial_condition": {"type": "beltrami_abc"},
                                          "evaluation": {"pairs": []}})"),
                    ConfigError);
  }

  TEST_CASE("seed override rewrites every seed and the hash tracks content") {
    RunConfig cfg = parse_config_text(kTinyConfig);
    const std::string hash_before = config_hash(cfg);
    apply_seed_override(cfg, 777);
    CHECK(cfg.initial.seed == 777);
    CHECK(cfg.probe.seed == 777);
    CHECK(config_hash(cfg) != hash_before);
    CHECK(config_hash(cfg) == config_hash(cfg));
  }

  TEST_CASE("full pipeline on exact data: artifacts, report content, determinism") {
    const RunConfig cfg = parse_config_text(kTinyConfig);
    const fs::path out1 = fresh_dir("gevrey_pipe_a");
    const fs::path out2 = fresh_dir("gevrey_pipe_b");

    const PipelineResult result = run_pipeline(cfg, out1);
    CHECK(result.verified);
    for (const char* name :
         {"config.resolved.json", "probe.json", "verify.json", "report.json", "remainders.csv"})
      CHECK(fs::exists(out1 / name));
    CHECK(fs::exists(out1 / "trajectory" / "manifest.txt"));
    CHECK(fs::exists(out1 / "expansion" / "summary.txt"));

    const auto report = nlohmann::json::parse(read_file(out1 / "report.json"));
    CHECK(report.at("pass").get<bool>());
    CHECK(report.at("config_hash").get<std::string>() == config_hash(cfg));
    CHECK(report.at("terms").size() == 2);
    CHECK(report.at("terms")[0].at("shells") == nlohmann::json::array({1}));
    const double xi1 = report.at("terms")[0].at("xi_norm").get<double>();
    const double u0_norm = l2_norm(build_initial_condition(cfg));
    CHECK(xi1 == doctest::Approx(u0_norm).epsilon(1e-8));
    CHECK(report.at("terms")[1].at("xi_norm").get<double>() <= 1e-6 * u0_norm * u0_norm);
    CHECK(report.at("energy").at("pass").get<bool>());
    for (const auto& entry : report.at("remainders")) CHECK(entry.at("mode").get<std::string>() == "negligible");

    // CSV: header plus one row per stored sample, 17-digit round-trip.
    const std::string csv = read_file(out1 / "remainders.csv");
    CHECK(csv.rfind("t,v0_a0_s0.25,v1_a0_s0.25,v2_a0_s0.25", 0) == 0);
    const auto verify = nlohmann::json::parse(read_file(out1 / "verify.json"));
    const auto& times = verify.at("series").at("times");
    size_t rows = 0;
    for (char ch : csv)
      if (ch == '\n') ++rows;
    CHECK(rows == times.size() + 1);
    {
      std::istringstream lines(csv);
      std::string header, first;
      std::getline(lines, header);
      std::getline(lines, first);
      const auto comma = first.find(',');
      const double v = std::strtod(first.substr(comma + 1).c_str(), nullptr);
      CHECK(v == verify.at("series").at("columns")[0].at("values")[0].get<double>());
    }

    // Bit-identical artifacts on a second execution.
    const PipelineResult second = run_pipeline(cfg, out2);
    CHECK(second.verified);
    for (const char* name : {"config.resolved.json", "probe.json", "verify.json", "report.json", "remainders.csv"})
      CHECK(read_file(out1 / name) == read_file(out2 / name));

    fs::remove_all(out2);

    // Re-running verify + report must not touch the trajectory, and the
    // re-exported report must be byte-identical.
    std::map<std::string, fs::file_time_type> stamps;
    for (const auto& entry : fs::directory_iterator(out1 / "trajectory"))
      stamps[entry.path().filename().string()] = fs::last_write_time(entry.path());
    const std::string report_before = read_file(out1 / "report.json");
    const std::string csv_before = read_file(out1 / "remainders.csv");
    CHECK(stage_verify(cfg, out1));
    stage_report(cfg, out1);
    for (const auto& entry : fs::directory_iterator(out1 / "trajectory"))
      CHECK(fs::last_write_time(entry.path()) == stamps.at(entry.path().filename().string()));
    CHECK(read_file(out1 / "report.json") == report_before);
    CHECK(read_file(out1 / "remainders.csv") == csv_before);

    fs::remove_all(out1);
  }

  TEST_CASE("a configured weak-decay check on a short horizon raises HorizonError") {
    const RunConfig cfg = parse_config_text(R"({
      "initial_condition": {"type": "single_mode", "k": [0, 1, 0], "amplitude": 0.2},
      "galerkin": {"truncation": 2, "dt": 0.002, "t_end": 4.0, "snapshot_stride": 5},
      "extraction": {"depth": 1},
      "evaluation": {"pairs": [{"alpha": 0.0, "sigma": 0.1}]},
      "probe": {"truncation": 2, "samples": 10, "seed": 5},
      "lemmas": {"weak": {"alpha": 0.5, "sigma": 0.1}}
    })");
    const fs::path out = fresh_dir("gevrey_pipe_horizon");
    stage_simulate(cfg, out);
    stage_probe(cfg, out);
    stage_extract(cfg, out);
    CHECK_THROWS_AS(stage_verify(cfg, out), HorizonError);
    fs::remove_all(out);
  }

  TEST_CASE("stages demand their prerequisites") {
    const RunConfig cfg = parse_config_text(kTinyConfig);
    const fs::path out = fresh_dir("gevrey_pipe_missing");
    CHECK_THROWS(stage_extract(cfg, out));
    CHECK_THROWS_AS(stage_verify(cfg, out), std::exception);
    CHECK_THROWS_AS(stage_report(cfg, out), ConfigError);
    fs::remove_all(out);
  }

  TEST_CASE("command line maps failures to documented exit codes") {
    const fs::path dir = fresh_dir("gevrey_cli_test");
    const fs::path cfg_ok = dir / "ok.json";
    const fs::path cfg_bad = dir / "bad.json";
    const fs::path cfg_blow = dir / "blow.json";
    {
      std::ofstream out(cfg_ok);
      out << R"({
        "initial_condition": {"type": "single_mode", "k": [1, 1, 0], "amplitude": 0.4},
        "galerkin": {"truncation": 2, "dt": 0.002, "t_end": 6.0, "snapshot_stride": 5},
        "extraction": {"depth": 2},
        "evaluation": {"pairs": [{"alpha": 0.0, "sigma": 0.1}]},
        "probe": {"truncation": 2, "samples": 10, "seed": 5}
      })";
      std::ofstream bad(cfg_bad);
      bad << R"({"initial_condition": {"type": "beltrami_abc"}, "extraction": {"depth": 0}})";
      std::ofstream blow(cfg_blow);
      blow << R"({
        "initial_condition": {"type": "random_small", "seed": 31, "amplitude": 30000, "decay": 0.0},
        "galerkin": {"truncation": 6, "dt": 0.5, "t_end": 50.0, "snapshot_stride": 100},
        "probe": {"truncation": 2, "samples": 5, "seed": 5}
      })";
    }

    CHECK(run_cli("") == 2);
    CHECK(run_cli("run --config " + (dir / "nope.json").string() + " --out " + (dir / "o0").string()) == 2);
    CHECK(run_cli("run --config " + cfg_bad.string() + " --out " + (dir / "o1").string()) == 2);
    CHECK(run_cli("run --config " + cfg_blow.string() + " --out " + (dir / "o2").string()) == 3);
    CHECK(run_cli("run --config " + cfg_ok.string() + " --out " + (dir / "o3").string()) == 0);
    CHECK(run_cli("--stage report --config " + cfg_ok.string() + " --out " + (dir / "o3").string()) == 0);
    CHECK(run_cli("verify --config " + cfg_ok.string() + " --out " + (dir / "o3").string()) == 0);

    fs::remove_all(dir);
  }
}
