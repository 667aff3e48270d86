#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gevrey/bilinear.hpp"
#include "gevrey/dynamics.hpp"

namespace gevrey {

struct InitialCondition {
  std::string type;  // "single_mode" | "beltrami_abc" | "random_small"
  WaveVector k{0, 1, 1};
  double amplitude = 0.01;
  double a = 1.0, b = 1.0, c = 1.0;
  std::uint64_t seed = 1;
  double decay = 1.0;
};

struct EvalPair {
  double alpha = 0.0;
  double sigma = 0.25;
};

struct ProbeConfig {
  Truncation truncation{6};
  double alpha = 0.5;
  double sigma = 0.2;
  int samples = 1000;
  std::uint64_t seed = 2026;
};

struct SmallDataCheck {
  double alpha = 0.5;
  double sigma = 0.25;
  double delta = 0.5;
};

struct ImprovedCheck {
  double alpha = 0.5;
  double sigma = 0.1;
};

struct WeakCheck {
  double alpha = 1.0;
  double sigma = 0.1;
};

struct RunConfig {
  InitialCondition initial;
  GalerkinConfig galerkin;
  int extraction_depth = 3;
  double sigma_extract = 0.25;
  std::vector<EvalPair> pairs{{0.0, 0.25}, {1.0, 0.1}};
  double slope_margin = 0.4;
  int residual_samples = 11;
  double residual_t_max = 2.0;
  double residual_tolerance = 1e-8;
  double energy_tolerance = 1e-6;
  ProbeConfig probe;
  std::optional<SmallDataCheck> small_data;
  std::optional<ImprovedCheck> improved;
  std::optional<WeakCheck> weak;
};

// Parses the structured-text (JSON) config file, filling every default
// explicitly.  Unknown keys and malformed values raise ConfigError.
RunConfig parse_config_file(const std::filesystem::path& file);
RunConfig parse_config_text(const std::string& text);
void apply_seed_override(RunConfig& cfg, std::uint64_t seed);

// Canonical resolved-config serialization (all defaults materialized) and its
// FNV-1a hash, which stamps every report.
std::string resolved_config_text(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

SpectralField build_initial_condition(const RunConfig& cfg);

// Pipeline stages; each persists its artifacts under `out` and later stages
// resume from what is on disk.  stage_verify returns false when a configured
// check fails (slope, bound, residual or energy); it throws on numerical
// failure.
void stage_simulate(const RunConfig& cfg, const std::filesystem::path& out);
void stage_probe(const RunConfig& cfg, const std::filesystem::path& out);
void stage_extract(const RunConfig& cfg, const std::filesystem::path& out);
bool stage_verify(const RunConfig& cfg, const std::filesystem::path& out);
void stage_report(const RunConfig& cfg, const std::filesystem::path& out);

struct PipelineResult {
  bool verified = false;
  std::filesystem::path report_file;
};

// simulate -> probe -> extract -> verify -> report.
PipelineResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out);

const char* version_string();

}  // namespace gevrey
