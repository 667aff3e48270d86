#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gevrey/bilinear.hpp"
#include "gevrey/field.hpp"

using namespace gevrey;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kVolume = 8.0 * kPi * kPi * kPi;

std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("field") {
  TEST_CASE("leray projection annihilates gradients and keeps transverse parts") {
    auto table = ModeTable::get({4});
    SpectralField f(table);
    const WaveVector k(1, 0, 0);

    f.set_coeff(k, Eigen::Vector3cd(1.0, 0.0, 0.0));  // parallel to k
    CHECK(leray_project(f).coeff(k).norm() == doctest::Approx(0.0).epsilon(1e-15));

    f = SpectralField(table);
    f.set_coeff(k, Eigen::Vector3cd(0.0, 2.0, -1.0));  // already transverse
    CHECK((leray_project(f).coeff(k) - Eigen::Vector3cd(0.0, 2.0, -1.0)).norm() < 1e-15);

    f = SpectralField(table);
    f.set_coeff(k, Eigen::Vector3cd(1.0, 1.0, 0.0));
    const Eigen::Vector3cd projected = leray_project(f).coeff(k);
    CHECK((projected - Eigen::Vector3cd(0.0, 1.0, 0.0)).norm() < 1e-15);
  }

  TEST_CASE("leray projection is idempotent and self-adjoint") {
    auto table = ModeTable::get({6});
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      SpectralField raw(table);
      {
        SpectralField noise = random_solenoidal_field(table, seed, 0.5);
        raw = noise;
        raw.set_coeff(WaveVector(1, 1, 0), Eigen::Vector3cd(0.3, 0.1, -0.2));  // break solenoidality
      }
      const SpectralField once = leray_project(raw);
      const SpectralField twice = leray_project(once);
      SpectralField diff = twice;
      diff -= once;
      CHECK(l2_norm(diff) <= 1e-12 * l2_norm(once));

      const SpectralField other = random_solenoidal_field(table, seed + 100, 0.5);
      SpectralField other_raw = other;
      other_raw.set_coeff(WaveVector(0, 1, 1), Eigen::Vector3cd(0.0, 0.5, 0.1));
      CHECK(inner_product(leray_project(raw), other_raw) ==
            doctest::Approx(inner_product(raw, leray_project(other_raw))).epsilon(1e-12));
    }
  }

  TEST_CASE("gevrey multiplier scales single modes by |k|^{2a} e^{s|k|}") {
    auto table = ModeTable::get({4});
    SpectralField u = single_mode_field(table, WaveVector(0, 2, 0), 1.0);  // |k|^2 = 4
    const SpectralField scaled = apply_gevrey_multiplier(u, {1.0, 0.5});
    const double expected = 4.0 * std::exp(1.0);
    CHECK(gevrey_norm(scaled, {0.0, 0.0}) == doctest::Approx(expected * l2_norm(u)).epsilon(1e-14));

    const SpectralField identity = apply_gevrey_multiplier(u, {0.0, 0.0});
    CHECK(l2_norm(identity) == doctest::Approx(l2_norm(u)).epsilon(1e-15));
  }

  TEST_CASE("multiplier composition adds exponents") {
    auto table = ModeTable::get({8});
    const SpectralField u = random_solenoidal_field(table, 21, 0.3);
    const SpectralField composed =
        apply_gevrey_multiplier(apply_gevrey_multiplier(u, {0.75, 0.2}), {0.5, 0.3});
    const SpectralField direct = apply_gevrey_multiplier(u, {1.25, 0.5});
    SpectralField diff = composed;
    diff -= direct;
    CHECK(l2_norm(diff) <= 1e-12 * l2_norm(direct));
  }

  TEST_CASE("smoothing bound |A^a e^{-A^{1/2}} u| <= (2a/e)^{2a} |u|") {
    auto table = ModeTable::get({16});
    for (std::uint64_t seed : {3u, 4u}) {
      const SpectralField u = random_solenoidal_field(table, seed, 0.2);
      for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
        const double bound = alpha == 0.0 ? 1.0 : std::pow(2.0 * alpha / std::exp(1.0), 2.0 * alpha);
        CHECK(l2_norm(apply_smoothing(u, alpha)) <= bound * l2_norm(u) * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("norms: Parseval value, unit-shell factor, Poincare, exponential bound") {
    auto table = ModeTable::get({6});
    const SpectralField mode = single_mode_field(table, WaveVector(1, 0, 0), 0.7);
    // One stored pair of amplitude 0.7: |u|^2 = 8 pi^3 * 2 * 0.49.
    CHECK(l2_norm(mode) == doctest::Approx(std::sqrt(kVolume * 2.0 * 0.49)).epsilon(1e-14));
    for (double alpha : {0.0, 0.5, 2.0})
      CHECK(gevrey_norm(mode, {alpha, 0.3}) == doctest::Approx(std::exp(0.3) * l2_norm(mode)).epsilon(1e-13));

    const SpectralField u = random_solenoidal_field(table, 77, 0.4);
    for (double alpha : {0.25, 0.5, 1.0})
      CHECK(l2_norm(u) <= gevrey_norm(u, {alpha, 0.0}) * (1.0 + 1e-12));
    for (double sigma : {0.1, 0.7})
      CHECK(l2_norm(u) <= std::exp(-sigma) * gevrey_norm(u, {0.0, sigma}) * (1.0 + 1e-12));
  }

  TEST_CASE("norm is monotone in alpha and sigma") {
    auto table = ModeTable::get({8});
    const SpectralField u = random_solenoidal_field(table, 5, 0.6);
    double prev = gevrey_norm(u, {0.0, 0.0});
    for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
      const double cur = gevrey_norm(u, {alpha, 0.0});
      CHECK(cur >= prev * (1.0 - 1e-12));
      prev = cur;
    }
    prev = gevrey_norm(u, {0.5, 0.0});
    for (double sigma : {0.1, 0.3, 0.8}) {
      const double cur = gevrey_norm(u, {0.5, sigma});
      CHECK(cur >= prev * (1.0 - 1e-12));
      prev = cur;
    }
  }

  TEST_CASE("shell projections: R_7 vanishes, R_1 fixes unit-shell fields, P_2 = R_1 + R_2") {
    auto table = ModeTable::get({8});
    const SpectralField u = random_solenoidal_field(table, 9, 0.2);
    CHECK(l2_norm(shell_project(u, 7)) == 0.0);

    const SpectralField unit = single_mode_field(table, WaveVector(0, 0, 1), 1.3);
    SpectralField diff = shell_project(unit, 1);
    diff -= unit;
    CHECK(l2_norm(diff) == 0.0);

    SpectralField p2 = shell_project(u, 1);
    p2 += shell_project(u, 2);
    SpectralField low = low_pass_project(u, 2);
    low -= p2;
    CHECK(l2_norm(low) == 0.0);
  }

  TEST_CASE("shell projections are mutually orthogonal") {
    auto table = ModeTable::get({6});
    const SpectralField u = random_solenoidal_field(table, 31, 0.1);
    const SpectralField v = random_solenoidal_field(table, 32, 0.1);
    for (int m : {1, 2, 3})
      for (int n : {4, 5, 6}) CHECK(std::abs(inner_product(shell_project(u, m), shell_project(v, n))) == 0.0);
  }

  TEST_CASE("inner products: orthogonality, norm identity, Stokes pairing") {
    auto table = ModeTable::get({6});
    const SpectralField a = single_mode_field(table, WaveVector(1, 0, 0), 1.0);
    const SpectralField b = single_mode_field(table, WaveVector(0, 1, 1), 1.0);
    CHECK(inner_product(a, b) == 0.0);

    const SpectralField u = random_solenoidal_field(table, 41, 0.3);
    CHECK(inner_product(u, u) == doctest::Approx(l2_norm(u) * l2_norm(u)).epsilon(1e-13));
    const double dn = dirichlet_norm(u);
    CHECK(inner_product(apply_gevrey_multiplier(u, {1.0, 0.0}), u) == doctest::Approx(dn * dn).epsilon(1e-13));
    CHECK(inner_product(u, a) == doctest::Approx(inner_product(a, u)).epsilon(1e-14));
  }

  TEST_CASE("coefficients honor the reality pairing") {
    auto table = ModeTable::get({4});
    SpectralField u(table);
    const WaveVector k(1, -1, 0);
    const Eigen::Vector3cd value(0.2, std::complex<double>(0.0, 0.4), 0.0);
    u.set_coeff(k, value);
    CHECK((u.coeff(k) - value).norm() < 1e-16);
    CHECK((u.coeff(WaveVector(-k)) - value.conjugate()).norm() < 1e-16);
  }

  TEST_CASE("snapshot round-trip is bit-exact") {
    auto table = ModeTable::get({8});
    const SpectralField u = random_solenoidal_field(table, 123, 0.7);
    const auto dir = std::filesystem::temp_directory_path() / "gevrey_field_test";
    std::filesystem::create_directories(dir);
    const auto file_a = dir / "a.bin";
    const auto file_b = dir / "b.bin";
    save_snapshot(u, file_a);
    const SpectralField loaded = load_snapshot(file_a);
    CHECK(loaded.solenoidal());
    save_snapshot(loaded, file_b);
    CHECK(read_bytes(file_a) == read_bytes(file_b));
    SpectralField diff = loaded;
    diff -= u;
    CHECK(l2_norm(diff) == 0.0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("random presets are solenoidal and hit the requested norm") {
    auto table = ModeTable::get({8});
    const SpectralField u = random_small_field(table, 7, 0.05, 1.0);
    CHECK(u.solenoidal());
    CHECK(divergence_free_within(u, 1e-12));
    CHECK(dirichlet_norm(u) == doctest::Approx(0.05).epsilon(1e-12));
    const SpectralField again = random_small_field(table, 7, 0.05, 1.0);
    SpectralField diff = again;
    diff -= u;
    CHECK(l2_norm(diff) == 0.0);
  }
}
