#include <doctest.h>

#include <cmath>

#include "gevrey/analysis.hpp"
#include "gevrey/errors.hpp"

using namespace gevrey;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return out;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("fit recovers exact exponentials") {
    const auto times = linspace(0.0, 10.0, 201);
    std::vector<double> values(times.size());
    for (size_t i = 0; i < times.size(); ++i) values[i] = 2.0 * std::exp(-1.5 * times[i]);
    const DecayFit fit = fit_decay_rate(times, values, 0.0, 10.0);
    CHECK(fit.rate == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fit.amplitude == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.residual_rms < 1e-10);
    CHECK(fit.n_samples == 201);
  }

  TEST_CASE("fit tolerates small multiplicative ripple") {
    const auto times = linspace(0.0, 20.0, 401);
    std::vector<double> values(times.size());
    for (size_t i = 0; i < times.size(); ++i) values[i] = std::exp(-times[i]) * (1.0 + 0.01 * std::sin(times[i]));
    const DecayFit fit = fit_decay_rate(times, values, 0.0, 20.0);
    CHECK(std::abs(fit.rate - 1.0) < 0.02);
  }

  TEST_CASE("fit window, floor and error paths") {
    const auto times = linspace(0.0, 10.0, 101);
    std::vector<double> values(times.size());
    for (size_t i = 0; i < times.size(); ++i) values[i] = std::exp(-3.0 * times[i]) + 1e-300;
    // Values below 1e-13 * max are excluded: e^{-3t} < 1e-13 for t > 9.97.
    const DecayFit fit = fit_decay_rate(times, values, 5.0, 10.0);
    CHECK(fit.t_end <= 10.0);
    CHECK(fit.rate == doctest::Approx(3.0).epsilon(1e-6));

    CHECK_THROWS_AS(fit_decay_rate(times, values, 9.99, 10.0), NumericalError);  // everything under the floor
    CHECK_THROWS_AS(fit_decay_rate(times, values, 7.0, 3.0), std::invalid_argument);
    std::vector<double> negative(times.size(), -1.0);
    CHECK_THROWS_AS(fit_decay_rate(times, negative, 0.0, 10.0), NumericalError);
  }

  TEST_CASE("single-mode trajectory fits its eigenvalue decay rate") {
    auto table = ModeTable::get({4});
    const SpectralField u0 = single_mode_field(table, WaveVector(1, 1, 0), 0.4);
    const Trajectory traj = integrate(u0, {{4}, 1e-3, 4.0, 10});
    std::vector<double> series(traj.states.size());
    for (int i = 0; i < traj.sample_count(); ++i) series[static_cast<size_t>(i)] = l2_norm(traj.state(i));
    const DecayFit fit = fit_decay_rate(traj.times, series, 0.0, 4.0);
    CHECK(std::abs(fit.rate - 2.0) < 1e-4);
  }

  TEST_CASE("small-data bound holds on an exact shell-1 trajectory") {
    auto table = ModeTable::get({4});
    const SpectralField u0 = single_mode_field(table, WaveVector(0, 1, 0), 1e-3);
    const Trajectory traj = integrate(u0, {{4}, 1e-3, 3.0, 10});
    const LemmaReport report = verify_small_data_decay(traj, 0.5, 0.25, 0.5, 4.0);
    CHECK(report.hypothesis_met);
    CHECK(report.window_reached);
    CHECK(report.checked_samples > 0);
    CHECK(report.max_violation < 0.0);
    CHECK(report.pass);
    CHECK(report.t_min == doctest::Approx(2.0));  // 4 sigma / delta
  }

  TEST_CASE("hypothesis gate flags oversized data instead of checking it") {
    auto table = ModeTable::get({4});
    const SpectralField u0 = single_mode_field(table, WaveVector(0, 1, 0), 10.0);
    const Trajectory traj = integrate(u0, {{4}, 1e-2, 3.0, 10});
    const LemmaReport report = verify_small_data_decay(traj, 0.5, 0.25, 0.5, 4.0);
    CHECK_FALSE(report.hypothesis_met);
    CHECK_FALSE(report.pass);
    CHECK(report.hypothesis_value >= report.hypothesis_threshold);
  }

  TEST_CASE("improved decay bound on the ABC flow") {
    auto table = ModeTable::get({4});
    SpectralField u0 = beltrami_abc_field(table, 1.0, 1.0, 1.0);
    u0 *= 1e-4;  // far inside the hypothesis for any sane K
    const Trajectory traj = integrate(u0, {{4}, 1e-3, 4.0, 10});
    const LemmaReport report = verify_improved_decay(traj, 0.5, 0.1, 4.0);
    CHECK(report.hypothesis_met);
    CHECK(report.pass);
    CHECK(report.t_min == doctest::Approx(2.4));  // 24 sigma

    // Samples before 24 sigma are excluded from the window.
    int early = 0;
    for (double t : traj.times)
      if (t < report.t_min) ++early;
    CHECK(report.checked_samples == traj.sample_count() - early);
  }

  TEST_CASE("pass flag is the zero-tolerance reading of the recorded violation") {
    auto table = ModeTable::get({4});
    const SpectralField u0 = single_mode_field(table, WaveVector(0, 1, 0), 1e-3);
    const Trajectory traj = integrate(u0, {{4}, 1e-3, 4.0, 10});
    for (double delta : {0.3, 0.5, 0.7}) {
      const LemmaReport r = verify_small_data_decay(traj, 0.5, 0.25, delta, 4.0);
      REQUIRE(r.hypothesis_met);
      REQUIRE(r.window_reached);
      CHECK(r.pass == (r.max_violation <= 0.0));
      // Any looser reading of the recorded violation can only keep it passing.
      CHECK((r.max_violation <= 0.0 || !r.pass));
    }
  }

  TEST_CASE("parameter validation in the verifiers") {
    auto table = ModeTable::get({4});
    const SpectralField u0 = single_mode_field(table, WaveVector(0, 1, 0), 0.1);
    const Trajectory traj = integrate(u0, {{4}, 1e-2, 1.0, 10});
    CHECK_THROWS_AS(verify_small_data_decay(traj, 0.25, 0.1, 0.5, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(verify_small_data_decay(traj, 0.5, 0.1, 1.5, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(verify_improved_decay(traj, 0.3, 0.1, 4.0), std::invalid_argument);
  }

  TEST_CASE("weak-solution constants: entry time and constant ratios") {
    const double k_emp = 4.0;
    // Data small enough that the positive part vanishes: T = 24 sigma + 34.
    CHECK(weak_decay_entry_time(0.5, k_emp, 1e-3 / k_emp) == doctest::Approx(24.0 * 0.5 + 34.0));
    // (2 alpha / e)^{2 alpha} at alpha = 1.
    const double ratio = std::pow(2.0 / std::exp(1.0), 2.0);
    CHECK(ratio == doctest::Approx(0.54134).epsilon(1e-4));

    auto table = ModeTable::get({1});
    const SpectralField u0 = beltrami_abc_field(table, 1.0, 1.0, 1.0);
    const Trajectory traj = integrate(u0, {{1}, 2e-3, 40.0, 100});
    const auto [base, lifted] = verify_weak_decay_constants(traj, 0.1, 1.0, k_emp);
    CHECK_FALSE(base.window_reached);  // T ~ 43.8 exceeds the horizon
    CHECK_FALSE(base.pass);

    const Trajectory longer = integrate(u0, {{1}, 2e-3, 48.0, 100});
    const auto [base2, lifted2] = verify_weak_decay_constants(longer, 0.1, 1.0, k_emp);
    CHECK(base2.window_reached);
    CHECK(base2.pass);
    CHECK(lifted2.pass);
  }
}
