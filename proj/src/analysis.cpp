#include "gevrey/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gevrey/errors.hpp"

namespace gevrey {

namespace {

constexpr double kBoundSlack = 1e-12;

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Shared scaffolding of the bound checks: scans stored samples with
// t >= t_min against bound_at(t) and fills the window/violation slots.
template <typename BoundFn>
void check_bound(const Trajectory& traj, const GevreyParams& norm_params, double t_min, BoundFn bound_at,
                 LemmaReport& report) {
  report.t_min = t_min;
  report.window_reached = !traj.times.empty() && traj.times.back() >= t_min;
  report.checked_samples = 0;
  report.max_violation = 0.0;
  bool first = true;
  for (int i = 0; i < traj.sample_count(); ++i) {
    const double t = traj.times[i];
    if (t < t_min) continue;
    const double lhs = gevrey_norm(traj.state(i), norm_params);
    const double rhs = bound_at(t);
    const double violation = lhs - rhs * (1.0 + kBoundSlack);
    if (first || violation > report.max_violation) report.max_violation = violation;
    first = false;
    ++report.checked_samples;
  }
  report.pass = report.hypothesis_met && report.window_reached && report.checked_samples > 0 &&
                report.max_violation <= 0.0;
}

}  // namespace

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values, double t_start,
                        double t_end, double floor_factor) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  if (t_start >= t_end) throw std::invalid_argument("fit_decay_rate: empty window");
  double series_max = 0.0;
  for (double v : values) series_max = std::max(series_max, v);
  const double floor = floor_factor * series_max;

  std::vector<double> ts, logs;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_start || times[i] > t_end) continue;
    if (values[i] <= floor) continue;
    if (values[i] <= 0.0) throw NumericalError("fit_decay_rate: nonpositive value in window");
    ts.push_back(times[i]);
    logs.push_back(std::log(values[i]));
  }
  if (ts.size() < 10) throw NumericalError("fit_decay_rate: fewer than 10 samples above floor");

  const double n = static_cast<double>(ts.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += logs[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * logs[i];
  }
  const double denom = n * stt - st * st;
  if (denom == 0.0) throw NumericalError("fit_decay_rate: degenerate abscissae");
  const double slope = (n * stl - st * sl) / denom;
  const double intercept = (sl - slope * st) / n;

  DecayFit fit;
  fit.rate = -slope;
  fit.amplitude = std::exp(intercept);
  fit.t_start = ts.front();
  fit.t_end = ts.back();
  fit.n_samples = static_cast<int>(ts.size());
  double ss = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    const double r = logs[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

LemmaReport verify_small_data_decay(const Trajectory& traj, double alpha, double sigma, double delta, double k_emp) {
  if (alpha < 0.5) throw std::invalid_argument("verify_small_data_decay: alpha must be >= 1/2");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("verify_small_data_decay: delta must be in (0,1)");
  if (traj.sample_count() == 0) throw std::invalid_argument("verify_small_data_decay: empty trajectory");

  LemmaReport report;
  report.lemma = "small_data_decay";
  report.alpha = alpha;
  report.sigma = sigma;
  report.delta = delta;
  report.k_emp = k_emp;
  const double initial = gevrey_norm(traj.state(0), {alpha, 0.0});
  report.initial_norm = initial;
  report.hypothesis_value = initial;
  report.hypothesis_threshold = delta / (2.0 * std::pow(k_emp, alpha));
  report.hypothesis_met = initial < report.hypothesis_threshold;

  check_bound(traj, {alpha, sigma}, 4.0 * sigma / delta,
              [&](double t) { return std::exp(-(1.0 - delta) * t) * initial; }, report);
  return report;
}

LemmaReport verify_improved_decay(const Trajectory& traj, double alpha, double sigma, double k_emp) {
  if (alpha < 0.5) throw std::invalid_argument("verify_improved_decay: alpha must be >= 1/2");
  if (traj.sample_count() == 0) throw std::invalid_argument("verify_improved_decay: empty trajectory");

  LemmaReport report;
  report.lemma = "improved_decay";
  report.alpha = alpha;
  report.sigma = sigma;
  report.k_emp = k_emp;
  const double initial = gevrey_norm(traj.state(0), {alpha + 0.5, 0.0});
  report.initial_norm = initial;
  report.hypothesis_value = initial;
  report.hypothesis_threshold = 1.0 / (12.0 * std::pow(k_emp, alpha + 0.5));
  report.hypothesis_met = initial < report.hypothesis_threshold;

  const double prefactor = std::sqrt(2.0) * std::exp(4.0 * sigma) * initial;
  check_bound(traj, {alpha, sigma}, 24.0 * sigma, [&](double t) { return prefactor * std::exp(-t); }, report);
  return report;
}

double weak_decay_entry_time(double sigma, double k_emp, double initial_l2_norm) {
  return 24.0 * sigma + 34.0 + positive_part(std::log(12.0 * k_emp * initial_l2_norm));
}

std::pair<LemmaReport, LemmaReport> verify_weak_decay_constants(const Trajectory& traj, double sigma, double alpha,
                                                                double k_emp) {
  if (alpha < 0.0) throw std::invalid_argument("verify_weak_decay_constants: alpha must be >= 0");
  if (traj.sample_count() == 0) throw std::invalid_argument("verify_weak_decay_constants: empty trajectory");

  const double initial_l2 = l2_norm(traj.state(0));
  const double entry_time = weak_decay_entry_time(sigma, k_emp, initial_l2);
  const double d_sigma = std::sqrt(2.0) * std::exp(4.0 * sigma + 14.0) * std::max(initial_l2, 1.0 / (12.0 * k_emp));
  const double d_alpha_sigma = std::pow(2.0 * alpha / std::exp(1.0), 2.0 * alpha) * d_sigma;

  LemmaReport base;
  base.lemma = "weak_decay_base";
  base.alpha = 0.5;
  base.sigma = sigma;
  base.k_emp = k_emp;
  base.initial_norm = initial_l2;
  base.hypothesis_value = initial_l2;
  base.hypothesis_threshold = initial_l2 + 1.0;  // unconditional
  base.hypothesis_met = true;
  check_bound(traj, {0.5, sigma + 1.0}, entry_time, [&](double t) { return d_sigma * std::exp(-t); }, base);

  LemmaReport lifted;
  lifted.lemma = "weak_decay_lifted";
  lifted.alpha = alpha;
  lifted.sigma = sigma;
  lifted.k_emp = k_emp;
  lifted.initial_norm = initial_l2;
  lifted.hypothesis_value = initial_l2;
  lifted.hypothesis_threshold = initial_l2 + 1.0;
  lifted.hypothesis_met = true;
  check_bound(traj, {alpha + 0.5, sigma}, entry_time, [&](double t) { return d_alpha_sigma * std::exp(-t); }, lifted);
  return {base, lifted};
}

}  // namespace gevrey
