#pragma once

#include <string>
#include <vector>

#include "gevrey/dynamics.hpp"

namespace gevrey {

// Log-linear least squares on a positive time series: value ~ amplitude
// e^{-rate t} over [t_start, t_end].
struct DecayFit {
  double rate = 0.0;
  double amplitude = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double residual_rms = 0.0;
  int n_samples = 0;
};

// Outcome of one quantitative bound check along a trajectory.  The bound is
// tested with zero tolerance; a 1e-12 relative slack is folded into the
// right-hand side before comparison.
struct LemmaReport {
  std::string lemma;
  double alpha = 0.0;
  double sigma = 0.0;
  double delta = 0.0;  // unused entries stay 0
  double k_emp = 1.0;
  double initial_norm = 0.0;        // |u0| entering the hypothesis
  double hypothesis_value = 0.0;    // measured left side of the smallness condition
  double hypothesis_threshold = 0.0;
  bool hypothesis_met = false;
  double t_min = 0.0;               // start of the check window
  bool window_reached = false;      // trajectory horizon covers t_min
  int checked_samples = 0;
  double max_violation = 0.0;       // max over window of lhs - rhs (signed)
  bool pass = false;
};

// Samples with value <= floor_factor * max(series) are excluded before
// fitting.  Requires >= 10 usable samples, all positive.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values, double t_start,
                        double t_end, double floor_factor = 1e-13);

// |u(t)|_{alpha,sigma} <= e^{-(1-delta) t} |A^alpha u0| for t >= 4 sigma/delta,
// under |A^alpha u0| < delta / (2 K^alpha).  Requires alpha >= 1/2,
// delta in (0,1).
LemmaReport verify_small_data_decay(const Trajectory& traj, double alpha, double sigma, double delta, double k_emp);

// |u(t)|_{alpha,sigma} <= sqrt(2) e^{4 sigma} |A^{alpha+1/2} u0| e^{-t} for
// t >= 24 sigma, under |A^{alpha+1/2} u0| < 1/(12 K^{alpha+1/2}).
LemmaReport verify_improved_decay(const Trajectory& traj, double alpha, double sigma, double k_emp);

// Unconditional large-time bounds with explicit constants:
//   T       = 24 sigma + 34 + (ln(12 K |u0|))^+
//   D_s     = sqrt(2) e^{4 sigma + 14} max{|u0|, 1/(12 K)}
//   D_{a,s} = (2 alpha / e)^{2 alpha} D_s
// checking |u|_{1/2,sigma+1} <= D_s e^{-t} and |u|_{alpha+1/2,sigma}
// <= D_{a,s} e^{-t} for stored t >= T.  Returns two reports (in that order);
// when the horizon is shorter than T they carry window_reached = false.
std::pair<LemmaReport, LemmaReport> verify_weak_decay_constants(const Trajectory& traj, double sigma, double alpha,
                                                                double k_emp);

double weak_decay_entry_time(double sigma, double k_emp, double initial_l2_norm);

}  // namespace gevrey
