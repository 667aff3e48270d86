#include "gevrey/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gevrey/bilinear.hpp"
#include "gevrey/errors.hpp"

namespace gevrey {

namespace {

void apply_diagonal(SpectralField& u, const Eigen::ArrayXd& factors) {
  for (int i = 0; i < u.modes().rep_count(); ++i) u.coeffs().col(i) *= factors[i];
}

long steps_for(const GalerkinConfig& cfg) {
  if (cfg.dt <= 0.0 || cfg.t_end <= 0.0) throw std::invalid_argument("GalerkinConfig: dt and t_end must be positive");
  if (cfg.snapshot_stride < 1) throw std::invalid_argument("GalerkinConfig: snapshot_stride must be >= 1");
  const long steps = std::lround(cfg.t_end / cfg.dt);
  if (steps < 1 || std::abs(static_cast<double>(steps) * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end)
    throw std::invalid_argument("GalerkinConfig: t_end must be an integer number of steps");
  if (steps % cfg.snapshot_stride != 0)
    throw std::invalid_argument("GalerkinConfig: step count must be divisible by snapshot_stride");
  return steps;
}

}  // namespace

Trajectory integrate(const SpectralField& u0, const GalerkinConfig& cfg) {
  if (u0.max_eigenvalue() != cfg.truncation.max_eigenvalue)
    throw std::invalid_argument("integrate: initial state truncation mismatch");
  if (!u0.solenoidal()) throw std::invalid_argument("integrate: initial state must be solenoidal");
  const long steps = steps_for(cfg);
  const double h = cfg.dt;

  const ModeTable& table = u0.modes();
  Eigen::ArrayXd half_flow(table.rep_count());
  for (int i = 0; i < table.rep_count(); ++i)
    half_flow[i] = std::exp(-0.5 * h * static_cast<double>(table.rep_eigenvalues()[i]));
  const Eigen::ArrayXd full_flow = half_flow * half_flow;

  auto nonlinear = [](const SpectralField& u) {
    SpectralField n = bilinear(u, u);
    n *= -1.0;
    return n;
  };

  Trajectory traj;
  traj.config = cfg;
  const long sample_every = cfg.snapshot_stride;
  traj.times.reserve(static_cast<size_t>(steps / sample_every) + 1);
  traj.states.reserve(static_cast<size_t>(steps / sample_every) + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);

  SpectralField u = u0;
  for (long step = 0; step < steps; ++step) {
    const SpectralField k1 = nonlinear(u);

    SpectralField stage = u;
    stage.coeffs() += (0.5 * h) * k1.coeffs();
    apply_diagonal(stage, half_flow);
    const SpectralField k2 = nonlinear(stage);

    stage = u;
    apply_diagonal(stage, half_flow);
    stage.coeffs() += (0.5 * h) * k2.coeffs();
    const SpectralField k3 = nonlinear(stage);

    stage = u;
    apply_diagonal(stage, full_flow);
    SpectralField k3_damped = k3;
    apply_diagonal(k3_damped, half_flow);
    stage.coeffs() += h * k3_damped.coeffs();
    const SpectralField k4 = nonlinear(stage);

    apply_diagonal(u, full_flow);
    SpectralField increment = k1;
    apply_diagonal(increment, full_flow);
    SpectralField mid = k2;
    mid.coeffs() += k3.coeffs();
    apply_diagonal(mid, half_flow);
    increment.coeffs() += 2.0 * mid.coeffs() + k4.coeffs();
    u.coeffs() += (h / 6.0) * increment.coeffs();

    if (!u.all_finite())
      throw BlowUpError("integrate: nonfinite state (discrete blow-up)", static_cast<double>(step) * h);

    if ((step + 1) % sample_every == 0) {
      traj.times.push_back(static_cast<double>(step + 1) * h);
      traj.states.push_back(u);
    }
  }
  return traj;
}

std::vector<double> energy_residual(const Trajectory& traj) {
  const int count = traj.sample_count();
  if (count < 3) throw std::invalid_argument("energy_residual: need at least 3 samples");
  const double h = traj.sample_spacing();

  std::vector<double> l2sq(count), enstrophy(count), enstrophy_rate(count);
  for (int i = 0; i < count; ++i) {
    const SpectralField& u = traj.state(i);
    const double l2 = l2_norm(u);
    l2sq[i] = l2 * l2;
    const double en = dirichlet_norm(u);
    enstrophy[i] = en * en;
    const SpectralField au = apply_gevrey_multiplier(u, {1.0, 0.0});
    const double au_norm = l2_norm(au);
    // d/dt ||u||^2 = -2 |Au|^2 - 2 <Au, B(u,u)> along the truncated flow.
    enstrophy_rate[i] = -2.0 * au_norm * au_norm - 2.0 * inner_product(au, bilinear(u, u));
  }

  std::vector<double> residuals(static_cast<size_t>(count) - 1);
  for (int i = 0; i + 1 < count; ++i) {
    const double quad = 0.5 * h * (enstrophy[i] + enstrophy[i + 1]) -
                        h * h / 12.0 * (enstrophy_rate[i + 1] - enstrophy_rate[i]);
    const double balance = 0.5 * (l2sq[i + 1] - l2sq[i]) + quad;
    residuals[static_cast<size_t>(i)] = l2sq[i] > 0.0 ? balance / l2sq[i] : 0.0;
  }
  return residuals;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest " + file.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.empty()) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%08d.bin", index);
  return buf;
}

}  // namespace

void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt", std::ios::trunc);
  if (!manifest) throw std::runtime_error("save_trajectory: cannot write manifest in " + dir.string());
  manifest << "format=trajectory.v1\n";
  manifest << "lambda=" << traj.config.truncation.max_eigenvalue << "\n";
  manifest << "dt=" << format_double(traj.config.dt) << "\n";
  manifest << "stride=" << traj.config.snapshot_stride << "\n";
  manifest << "count=" << traj.sample_count() << "\n";
  manifest << "t_end=" << format_double(traj.config.t_end) << "\n";
  for (int i = 0; i < traj.sample_count(); ++i) save_snapshot(traj.state(i), dir / snapshot_name(i));
}

Trajectory load_trajectory(const std::filesystem::path& dir) {
  const auto kv = read_manifest(dir / "manifest.txt");
  Trajectory traj;
  traj.config.truncation.max_eigenvalue = std::stoi(kv.at("lambda"));
  traj.config.dt = std::stod(kv.at("dt"));
  traj.config.snapshot_stride = std::stoi(kv.at("stride"));
  traj.config.t_end = std::stod(kv.at("t_end"));
  const int count = std::stoi(kv.at("count"));
  traj.times.reserve(count);
  traj.states.reserve(count);
  for (int i = 0; i < count; ++i) {
    traj.states.push_back(load_snapshot(dir / snapshot_name(i)));
    if (traj.states.back().max_eigenvalue() != traj.config.truncation.max_eigenvalue)
      throw std::runtime_error("load_trajectory: snapshot truncation mismatch");
    traj.times.push_back(static_cast<double>(i) * static_cast<double>(traj.config.snapshot_stride) * traj.config.dt);
  }
  return traj;
}

}  // namespace gevrey
