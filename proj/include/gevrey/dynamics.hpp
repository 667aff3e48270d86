#pragma once

#include <filesystem>
#include <vector>

#include "gevrey/field.hpp"

namespace gevrey {

// Time-stepping setup for du/dt + Au + P_Lambda B(u,u) = 0 (viscosity and box
// size are scaled to 1 and 2pi).
struct GalerkinConfig {
  Truncation truncation{8};
  double dt = 1e-3;
  double t_end = 10.0;
  int snapshot_stride = 1;
};

// Uniformly sampled states of one integration.  Immutable once produced.
struct Trajectory {
  GalerkinConfig config;
  std::vector<double> times;
  std::vector<SpectralField> states;

  int sample_count() const { return static_cast<int>(times.size()); }
  double sample_spacing() const { return config.dt * static_cast<double>(config.snapshot_stride); }
  const SpectralField& state(int i) const { return states[static_cast<size_t>(i)]; }
};

// Four-stage explicit step on the integrating-factor form w = e^{tA} u, so
// the linear flow is exact per step.  Snapshots are stored every
// `snapshot_stride` steps, always including the initial and final states.
// Throws BlowUpError with the last finite time if the state leaves finite
// range.
Trajectory integrate(const SpectralField& u0, const GalerkinConfig& cfg);

// Residual of the energy balance d/dt |u|^2/2 + ||u||^2 = 0 per stored
// interval, normalized by |u(t_i)|^2.  The quadrature of ||u||^2 is the
// stored-stride trapezoid with exact endpoint-derivative correction, so the
// residual tracks the stepper's accuracy rather than the sampling stride.
std::vector<double> energy_residual(const Trajectory& traj);

// Directory layout: a key=value manifest plus one snapshot per sample.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir);
Trajectory load_trajectory(const std::filesystem::path& dir);

}  // namespace gevrey
