#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gevrey/bilinear.hpp"
#include "gevrey/errors.hpp"
#include "gevrey/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

int dispatch(const std::string& stage, const gevrey::RunConfig& cfg, const std::filesystem::path& out) {
  if (stage == "simulate") {
    gevrey::stage_simulate(cfg, out);
  } else if (stage == "probe") {
    gevrey::stage_probe(cfg, out);
  } else if (stage == "extract") {
    gevrey::stage_extract(cfg, out);
  } else if (stage == "verify") {
    if (!gevrey::stage_verify(cfg, out)) {
      std::cerr << "gevrey: verification failed (see " << (out / "verify.json").string() << ")\n";
      return kExitVerification;
    }
  } else if (stage == "report") {
    gevrey::stage_report(cfg, out);
  } else if (stage == "run") {
    const auto result = gevrey::run_pipeline(cfg, out);
    if (!result.verified) {
      std::cerr << "gevrey: verification failed (see " << result.report_file.string() << ")\n";
      return kExitVerification;
    }
    std::cout << result.report_file.string() << "\n";
  } else {
    throw gevrey::ConfigError("unknown stage '" + stage + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin Navier-Stokes asymptotic-expansion toolkit"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_dir;
  std::string stage_flag;
  std::uint64_t seed_override = 0;
  bool have_seed_override = false;

  app.add_option("--config", config_path, "configuration file (JSON)");
  app.add_option("--out", out_dir, "output directory for run artifacts");
  app.add_option("--stage", stage_flag, "stage to run (alternative to a subcommand)");
  app.add_option("--seed-override", seed_override, "replace every seed in the config")
      ->each([&](const std::string&) { have_seed_override = true; });

  for (const char* name : {"run", "simulate", "probe", "extract", "verify", "report"})
    app.add_subcommand(name)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  std::string stage = stage_flag;
  for (const auto* sub : app.get_subcommands())
    stage = sub->get_name();

  if (const char* env = std::getenv("GEVREY_THREADS")) {
    const int threads = std::atoi(env);
    if (threads > 0) gevrey::set_bilinear_threads(threads);
  }

  try {
    if (stage.empty()) throw gevrey::ConfigError("no stage given (subcommand or --stage)");
    if (config_path.empty()) throw gevrey::ConfigError("--config is required");
    if (out_dir.empty()) throw gevrey::ConfigError("--out is required");
    gevrey::RunConfig cfg = gevrey::parse_config_file(config_path);
    if (have_seed_override) gevrey::apply_seed_override(cfg, seed_override);
    return dispatch(stage, cfg, out_dir);
  } catch (const gevrey::ConfigError& e) {
    std::cerr << "gevrey: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gevrey::BlowUpError& e) {
    std::cerr << "gevrey: " << e.what() << " (last valid time " << e.last_valid_time << ")\n";
    return kExitNumerical;
  } catch (const gevrey::NumericalError& e) {
    std::cerr << "gevrey: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "gevrey: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "gevrey: " << e.what() << "\n";
    return 1;
  }
}
