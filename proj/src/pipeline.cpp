#include "gevrey/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gevrey/analysis.hpp"
#include "gevrey/errors.hpp"
#include "gevrey/expansion.hpp"

namespace gevrey {

namespace {

using nlohmann::json;

constexpr char kVersion[] = "0.1.0";

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) config_fail("unknown key '" + item.key() + "' in " + where);
}

double require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) config_fail(what + " must be positive");
  return v;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("missing artifact " + file.string() + " (run the earlier stage first)");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed artifact " + file.string() + ": " + e.what());
  }
}

}  // namespace

const char* version_string() { return kVersion; }

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(std::string("parse error: ") + e.what());
  }
  if (!root.is_object()) config_fail("top level must be an object");
  check_keys(root, "config",
             {"initial_condition", "galerkin", "extraction", "evaluation", "probe", "lemmas"});

  RunConfig cfg;
  try {
    if (!root.contains("initial_condition")) config_fail("initial_condition is required");
    const json& ic = root.at("initial_condition");
    const std::string type = ic.value("type", "");
    cfg.initial.type = type;
    if (type == "single_mode") {
      check_keys(ic, "initial_condition", {"type", "k", "amplitude"});
      const auto k = ic.value("k", std::vector<int>{0, 1, 1});
      if (k.size() != 3) config_fail("initial_condition.k must have 3 entries");
      cfg.initial.k = WaveVector(k[0], k[1], k[2]);
      if (cfg.initial.k == WaveVector::Zero()) config_fail("initial_condition.k must be nonzero");
      cfg.initial.amplitude = require_positive(ic.value("amplitude", 0.01), "initial_condition.amplitude");
    } else if (type == "beltrami_abc") {
      check_keys(ic, "initial_condition", {"type", "a", "b", "c"});
      cfg.initial.a = ic.value("a", 1.0);
      cfg.initial.b = ic.value("b", 1.0);
      cfg.initial.c = ic.value("c", 1.0);
    } else if (type == "random_small") {
      check_keys(ic, "initial_condition", {"type", "seed", "amplitude", "decay"});
      cfg.initial.seed = ic.value("seed", std::uint64_t{1});
      cfg.initial.amplitude = require_positive(ic.value("amplitude", 0.01), "initial_condition.amplitude");
      cfg.initial.decay = ic.value("decay", 1.0);
      if (cfg.initial.decay < 0.0) config_fail("initial_condition.decay must be >= 0");
    } else {
      config_fail("initial_condition.type must be single_mode, beltrami_abc or random_small");
    }

    if (root.contains("galerkin")) {
      const json& g = root.at("galerkin");
      check_keys(g, "galerkin", {"truncation", "dt", "t_end", "snapshot_stride"});
      cfg.galerkin.truncation.max_eigenvalue = g.value("truncation", 8);
      if (cfg.galerkin.truncation.max_eigenvalue < 1) config_fail("galerkin.truncation must be >= 1");
      cfg.galerkin.dt = require_positive(g.value("dt", 1e-3), "galerkin.dt");
      cfg.galerkin.t_end = require_positive(g.value("t_end", 15.0), "galerkin.t_end");
      cfg.galerkin.snapshot_stride = g.value("snapshot_stride", 10);
      if (cfg.galerkin.snapshot_stride < 1) config_fail("galerkin.snapshot_stride must be >= 1");
    } else {
      cfg.galerkin = GalerkinConfig{Truncation{8}, 1e-3, 15.0, 10};
    }

    if (root.contains("extraction")) {
      const json& e = root.at("extraction");
      check_keys(e, "extraction", {"depth", "sigma"});
      cfg.extraction_depth = e.value("depth", 3);
      if (cfg.extraction_depth < 1) config_fail("extraction.depth must be >= 1");
      cfg.sigma_extract = e.value("sigma", 0.25);
      if (cfg.sigma_extract < 0.0) config_fail("extraction.sigma must be >= 0");
    }

    if (root.contains("evaluation")) {
      const json& ev = root.at("evaluation");
      check_keys(ev, "evaluation",
                 {"pairs", "slope_margin", "residual_samples", "residual_t_max", "residual_tolerance",
                  "energy_tolerance"});
      if (ev.contains("pairs")) {
        cfg.pairs.clear();
        for (const json& pr : ev.at("pairs")) {
          check_keys(pr, "evaluation.pairs", {"alpha", "sigma"});
          EvalPair pair{pr.value("alpha", 0.0), pr.value("sigma", 0.0)};
          if (pair.alpha < 0.0 || pair.sigma < 0.0) config_fail("evaluation pair entries must be >= 0");
          cfg.pairs.push_back(pair);
        }
        if (cfg.pairs.empty()) config_fail("evaluation.pairs must not be empty");
      }
      cfg.slope_margin = ev.value("slope_margin", 0.4);
      cfg.residual_samples = ev.value("residual_samples", 11);
      if (cfg.residual_samples < 2) config_fail("evaluation.residual_samples must be >= 2");
      cfg.residual_t_max = require_positive(ev.value("residual_t_max", 2.0), "evaluation.residual_t_max");
      cfg.residual_tolerance = require_positive(ev.value("residual_tolerance", 1e-8), "evaluation.residual_tolerance");
      cfg.energy_tolerance = require_positive(ev.value("energy_tolerance", 1e-6), "evaluation.energy_tolerance");
    }

    if (root.contains("probe")) {
      const json& p = root.at("probe");
      check_keys(p, "probe", {"truncation", "alpha", "sigma", "samples", "seed"});
      cfg.probe.truncation.max_eigenvalue = p.value("truncation", 6);
      if (cfg.probe.truncation.max_eigenvalue < 1) config_fail("probe.truncation must be >= 1");
      cfg.probe.alpha = p.value("alpha", 0.5);
      cfg.probe.sigma = p.value("sigma", 0.2);
      if (cfg.probe.alpha < 0.0 || cfg.probe.sigma < 0.0) config_fail("probe.alpha and probe.sigma must be >= 0");
      cfg.probe.samples = p.value("samples", 1000);
      if (cfg.probe.samples < 1) config_fail("probe.samples must be >= 1");
      cfg.probe.seed = p.value("seed", std::uint64_t{2026});
    }

    if (root.contains("lemmas")) {
      const json& lm = root.at("lemmas");
      check_keys(lm, "lemmas", {"small_data", "improved", "weak"});
      if (lm.contains("small_data")) {
        const json& s = lm.at("small_data");
        check_keys(s, "lemmas.small_data", {"alpha", "sigma", "delta"});
        SmallDataCheck chk;
        chk.alpha = s.value("alpha", 0.5);
        chk.sigma = s.value("sigma", 0.25);
        chk.delta = s.value("delta", 0.5);
        if (chk.alpha < 0.5) config_fail("lemmas.small_data.alpha must be >= 0.5");
        if (chk.delta <= 0.0 || chk.delta >= 1.0) config_fail("lemmas.small_data.delta must be in (0,1)");
        cfg.small_data = chk;
      }
      if (lm.contains("improved")) {
        const json& s = lm.at("improved");
        check_keys(s, "lemmas.improved", {"alpha", "sigma"});
        ImprovedCheck chk;
        chk.alpha = s.value("alpha", 0.5);
        chk.sigma = s.value("sigma", 0.1);
        if (chk.alpha < 0.5) config_fail("lemmas.improved.alpha must be >= 0.5");
        cfg.improved = chk;
      }
      if (lm.contains("weak")) {
        const json& s = lm.at("weak");
        check_keys(s, "lemmas.weak", {"alpha", "sigma"});
        WeakCheck chk;
        chk.alpha = s.value("alpha", 1.0);
        chk.sigma = s.value("sigma", 0.1);
        if (chk.alpha < 0.0) config_fail("lemmas.weak.alpha must be >= 0");
        cfg.weak = chk;
      }
    }
  } catch (const json::exception& e) {
    config_fail(std::string("invalid value: ") + e.what());
  }

  // The initial condition must live inside the truncation.
  if (cfg.initial.type == "single_mode" &&
      cfg.initial.k.squaredNorm() > cfg.galerkin.truncation.max_eigenvalue)
    config_fail("initial_condition.k lies outside the truncation");
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_seed_override(RunConfig& cfg, std::uint64_t seed) {
  cfg.initial.seed = seed;
  cfg.probe.seed = seed;
}

namespace {

json config_to_json(const RunConfig& cfg) {
  json ic;
  ic["type"] = cfg.initial.type;
  if (cfg.initial.type == "single_mode") {
    ic["k"] = {cfg.initial.k[0], cfg.initial.k[1], cfg.initial.k[2]};
    ic["amplitude"] = cfg.initial.amplitude;
  } else if (cfg.initial.type == "beltrami_abc") {
    ic["a"] = cfg.initial.a;
    ic["b"] = cfg.initial.b;
    ic["c"] = cfg.initial.c;
  } else {
    ic["seed"] = cfg.initial.seed;
    ic["amplitude"] = cfg.initial.amplitude;
    ic["decay"] = cfg.initial.decay;
  }

  json pairs = json::array();
  for (const EvalPair& p : cfg.pairs) pairs.push_back({{"alpha", p.alpha}, {"sigma", p.sigma}});

  json lemmas = json::object();
  if (cfg.small_data)
    lemmas["small_data"] = {{"alpha", cfg.small_data->alpha},
                            {"sigma", cfg.small_data->sigma},
                            {"delta", cfg.small_data->delta}};
  if (cfg.improved) lemmas["improved"] = {{"alpha", cfg.improved->alpha}, {"sigma", cfg.improved->sigma}};
  if (cfg.weak) lemmas["weak"] = {{"alpha", cfg.weak->alpha}, {"sigma", cfg.weak->sigma}};

  return json{
      {"initial_condition", ic},
      {"galerkin",
       {{"truncation", cfg.galerkin.truncation.max_eigenvalue},
        {"dt", cfg.galerkin.dt},
        {"t_end", cfg.galerkin.t_end},
        {"snapshot_stride", cfg.galerkin.snapshot_stride}}},
      {"extraction", {{"depth", cfg.extraction_depth}, {"sigma", cfg.sigma_extract}}},
      {"evaluation",
       {{"pairs", pairs},
        {"slope_margin", cfg.slope_margin},
        {"residual_samples", cfg.residual_samples},
        {"residual_t_max", cfg.residual_t_max},
        {"residual_tolerance", cfg.residual_tolerance},
        {"energy_tolerance", cfg.energy_tolerance}}},
      {"probe",
       {{"truncation", cfg.probe.truncation.max_eigenvalue},
        {"alpha", cfg.probe.alpha},
        {"sigma", cfg.probe.sigma},
        {"samples", cfg.probe.samples},
        {"seed", cfg.probe.seed}}},
      {"lemmas", lemmas}};
}

}  // namespace

std::string resolved_config_text(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  const std::string text = resolved_config_text(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

SpectralField build_initial_condition(const RunConfig& cfg) {
  auto table = ModeTable::get(cfg.galerkin.truncation);
  if (cfg.initial.type == "single_mode") return single_mode_field(table, cfg.initial.k, cfg.initial.amplitude);
  if (cfg.initial.type == "beltrami_abc") return beltrami_abc_field(table, cfg.initial.a, cfg.initial.b, cfg.initial.c);
  return random_small_field(table, cfg.initial.seed, cfg.initial.amplitude, cfg.initial.decay);
}

namespace {

void persist_resolved_config(const RunConfig& cfg, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  write_text_file(out / "config.resolved.json", resolved_config_text(cfg));
}

json lemma_to_json(const LemmaReport& r) {
  return json{{"lemma", r.lemma},
              {"alpha", r.alpha},
              {"sigma", r.sigma},
              {"delta", r.delta},
              {"k_emp", r.k_emp},
              {"initial_norm", r.initial_norm},
              {"hypothesis_value", r.hypothesis_value},
              {"hypothesis_threshold", r.hypothesis_threshold},
              {"hypothesis_met", r.hypothesis_met},
              {"t_min", r.t_min},
              {"window_reached", r.window_reached},
              {"checked_samples", r.checked_samples},
              {"max_violation", r.max_violation},
              {"pass", r.pass}};
}

std::string column_label(int n_terms, const EvalPair& p) {
  return "v" + std::to_string(n_terms) + "_a" + format_g(p.alpha) + "_s" + format_g(p.sigma);
}

}  // namespace

void stage_simulate(const RunConfig& cfg, const std::filesystem::path& out) {
  persist_resolved_config(cfg, out);
  const SpectralField u0 = build_initial_condition(cfg);
  const Trajectory traj = integrate(u0, cfg.galerkin);
  save_trajectory(traj, out / "trajectory");
}

void stage_probe(const RunConfig& cfg, const std::filesystem::path& out) {
  persist_resolved_config(cfg, out);
  const BilinearRatioReport report = probe_inequalities(cfg.probe.truncation, cfg.probe.alpha, cfg.probe.sigma,
                                                        cfg.probe.samples, cfg.probe.seed);
  const double k_emp =
      estimate_bilinear_constant(cfg.probe.truncation, cfg.probe.sigma, cfg.probe.samples, cfg.probe.seed);

  json sweep = json::array();
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    const auto r = probe_inequalities(cfg.probe.truncation, alpha, cfg.probe.sigma, cfg.probe.samples, cfg.probe.seed);
    sweep.push_back({{"alpha", alpha}, {"max_ratio_aalphab", r.max_ratio_aalphab}});
  }

  const json doc{{"format", "probe.v1"},
                 {"report",
                  {{"alpha", report.alpha},
                   {"sigma", report.sigma},
                   {"samples", report.samples},
                   {"used_samples", report.used_samples},
                   {"seed", report.seed},
                   {"max_ratio_b1", report.max_ratio_b1},
                   {"max_ratio_b2", report.max_ratio_b2},
                   {"max_ratio_aalphab", report.max_ratio_aalphab},
                   {"aalphab_valid", report.aalphab_valid}}},
                 {"k_emp", k_emp},
                 {"sweep", sweep}};
  write_text_file(out / "probe.json", doc.dump(2) + "\n");
}

void stage_extract(const RunConfig& cfg, const std::filesystem::path& out) {
  persist_resolved_config(cfg, out);
  auto traj = std::make_shared<const Trajectory>(load_trajectory(out / "trajectory"));
  const ExpansionState state = extract_terms(traj, cfg.extraction_depth, cfg.sigma_extract);
  save_expansion(state, out / "expansion");
}

bool stage_verify(const RunConfig& cfg, const std::filesystem::path& out) {
  persist_resolved_config(cfg, out);
  auto traj = std::make_shared<const Trajectory>(load_trajectory(out / "trajectory"));
  const ExpansionState state = load_expansion(out / "expansion", traj);
  const double k_emp = read_json_file(out / "probe.json").at("k_emp").get<double>();

  bool all_pass = true;
  json doc;
  doc["format"] = "verify.v1";
  doc["k_emp"] = k_emp;

  // Remainder decay slopes per depth and evaluation pair.
  json remainders = json::array();
  json columns = json::array();
  const double horizon = traj->times.back();
  for (int n_terms = 0; n_terms <= state.depth(); ++n_terms) {
    for (const EvalPair& pair : cfg.pairs) {
      const GevreyParams params{pair.alpha, pair.sigma};
      const std::vector<double> series = remainder_series(*traj, state, n_terms, params);
      columns.push_back({{"label", column_label(n_terms, pair)},
                         {"n_terms", n_terms},
                         {"alpha", pair.alpha},
                         {"sigma", pair.sigma},
                         {"values", series}});
      if (n_terms == 0) continue;

      json entry{{"n_terms", n_terms}, {"alpha", pair.alpha}, {"sigma", pair.sigma}};
      entry["threshold"] = static_cast<double>(n_terms) + cfg.slope_margin;
      double series_max = 0.0;
      for (double v : series) series_max = std::max(series_max, v);
      const double reference = gevrey_norm(traj->state(0), params);
      if (series_max <= 1e-9 * reference) {
        entry["mode"] = "negligible";
        entry["pass"] = true;
      } else {
        try {
          const DecayFit fit = fit_decay_rate(traj->times, series, 0.5 * horizon, horizon);
          entry["mode"] = "fitted";
          entry["rate"] = fit.rate;
          entry["amplitude"] = fit.amplitude;
          entry["residual_rms"] = fit.residual_rms;
          entry["n_samples"] = fit.n_samples;
          entry["window"] = {fit.t_start, fit.t_end};
          entry["pass"] = fit.rate >= static_cast<double>(n_terms) + cfg.slope_margin;
        } catch (const NumericalError&) {
          // The series fell below its own floor inside the window: decay is
          // faster than anything the fit could certify.
          entry["mode"] = "floor_limited";
          entry["pass"] = true;
        }
      }
      all_pass = all_pass && entry["pass"].get<bool>();
      remainders.push_back(entry);
    }
  }
  doc["remainders"] = remainders;
  doc["series"] = {{"times", traj->times}, {"columns", columns}};

  // Hierarchy residuals.
  std::vector<double> t_samples(static_cast<size_t>(cfg.residual_samples));
  for (int i = 0; i < cfg.residual_samples; ++i)
    t_samples[static_cast<size_t>(i)] =
        cfg.residual_t_max * static_cast<double>(i) / static_cast<double>(cfg.residual_samples - 1);
  json residuals = json::array();
  for (int n = 1; n <= state.depth(); ++n) {
    const double r = ode_residual(state, n, t_samples);
    const bool ok = r <= cfg.residual_tolerance;
    residuals.push_back({{"n", n}, {"residual", r}, {"tolerance", cfg.residual_tolerance}, {"pass", ok}});
    all_pass = all_pass && ok;
  }
  doc["ode_residuals"] = residuals;

  // Discrete energy balance.
  {
    const std::vector<double> res = energy_residual(*traj);
    const double h = traj->sample_spacing();
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, std::abs(r) / h);
    const bool ok = worst <= cfg.energy_tolerance;
    doc["energy"] = {{"max_residual_per_unit_time", worst}, {"tolerance", cfg.energy_tolerance}, {"pass", ok}};
    all_pass = all_pass && ok;
  }

  // Configured bound checks.
  json lemmas = json::array();
  if (cfg.small_data) {
    const LemmaReport r =
        verify_small_data_decay(*traj, cfg.small_data->alpha, cfg.small_data->sigma, cfg.small_data->delta, k_emp);
    lemmas.push_back(lemma_to_json(r));
    all_pass = all_pass && r.pass;
  }
  if (cfg.improved) {
    const LemmaReport r = verify_improved_decay(*traj, cfg.improved->alpha, cfg.improved->sigma, k_emp);
    lemmas.push_back(lemma_to_json(r));
    all_pass = all_pass && r.pass;
  }
  if (cfg.weak) {
    const auto [base, lifted] = verify_weak_decay_constants(*traj, cfg.weak->sigma, cfg.weak->alpha, k_emp);
    if (!base.window_reached) {
      std::ostringstream msg;
      msg << "weak-decay check needs horizon t_end >= " << base.t_min << " but the trajectory ends at "
          << traj->times.back();
      throw HorizonError(msg.str());
    }
    lemmas.push_back(lemma_to_json(base));
    lemmas.push_back(lemma_to_json(lifted));
    all_pass = all_pass && base.pass && lifted.pass;
  }
  doc["lemmas"] = lemmas;

  // Term summaries.
  json terms = json::array();
  for (int n = 1; n <= state.depth(); ++n) {
    const auto& tail = state.tail_models()[static_cast<size_t>(n) - 1];
    terms.push_back({{"n", n},
                     {"degree", state.term(n).q.degree()},
                     {"shells", state.shell_support(n)},
                     {"xi_norm", state.resonant_norm(n)},
                     {"tail", {{"amplitude", tail.amplitude}, {"rate", tail.rate}, {"fitted", tail.fitted}}}});
  }
  doc["terms"] = terms;
  doc["pass"] = all_pass;

  write_text_file(out / "verify.json", doc.dump(2) + "\n");
  return all_pass;
}

void stage_report(const RunConfig& cfg, const std::filesystem::path& out) {
  persist_resolved_config(cfg, out);
  const json verify = read_json_file(out / "verify.json");
  const json probe = read_json_file(out / "probe.json");

  // Remainder series as CSV, one row per stored sample, 17 significant
  // digits, columns ordered by term count then evaluation pair.
  {
    const json& series = verify.at("series");
    const auto& times = series.at("times");
    const auto& columns = series.at("columns");
    std::ostringstream csv;
    csv << "t";
    for (const json& col : columns) csv << "," << col.at("label").get<std::string>();
    csv << "\n";
    for (size_t i = 0; i < times.size(); ++i) {
      csv << format_full(times[i].get<double>());
      for (const json& col : columns) csv << "," << format_full(col.at("values")[i].get<double>());
      csv << "\n";
    }
    write_text_file(out / "remainders.csv", csv.str());
  }

  json report{{"format", "report.v1"},
              {"version", kVersion},
              {"config", config_to_json(cfg)},
              {"config_hash", config_hash(cfg)},
              {"probe", probe},
              {"k_emp", verify.at("k_emp")},
              {"terms", verify.at("terms")},
              {"remainders", verify.at("remainders")},
              {"ode_residuals", verify.at("ode_residuals")},
              {"lemmas", verify.at("lemmas")},
              {"energy", verify.at("energy")},
              {"pass", verify.at("pass")},
              {"artifacts",
               {{"trajectory", "trajectory"},
                {"expansion", "expansion"},
                {"probe", "probe.json"},
                {"verify", "verify.json"},
                {"remainders_csv", "remainders.csv"}}}};
  write_text_file(out / "report.json", report.dump(2) + "\n");
}

PipelineResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out) {
  stage_simulate(cfg, out);
  stage_probe(cfg, out);
  stage_extract(cfg, out);
  const bool ok = stage_verify(cfg, out);
  stage_report(cfg, out);
  return PipelineResult{ok, out / "report.json"};
}

}  // namespace gevrey
